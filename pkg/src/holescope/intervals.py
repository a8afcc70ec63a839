"""Finite unions of closed intervals in [0,1] or on the circle.

Circle sets are stored as subsets of [0,1] with 1 identified with 0.  A set
that contains 1 always contains 0 as well; a bare ``[1,1]`` component is
folded into ``[0,0]``.  Sets are closed, so a wrapping arc is stored as the
two pieces ``[x,1]`` and ``[0,y]``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .phase import Hole, Space, format_scalar, parse_scalar
from .errors import UsageError


class IntervalSet:
    __slots__ = ("space", "components", "_measure")

    def __init__(self, components: Iterable[Sequence] = (), space: Space = Space.INTERVAL):
        self.space = space
        self.components = _canonical(list(components), space)
        self._measure = None

    @classmethod
    def empty(cls, space=Space.INTERVAL):
        return cls((), space)

    @classmethod
    def full(cls, space=Space.INTERVAL):
        return cls([(Fraction(0), Fraction(1))], space)

    @classmethod
    def outside_hole(cls, h: Hole):
        """Closed complement of the open hole h."""
        if h.space is Space.INTERVAL or not h.wraps:
            return cls([(0 * h.a, h.a), (h.b, 0 * h.b + 1)], h.space)
        return cls([(h.b, h.a)], h.space)

    @property
    def measure(self):
        if self._measure is None:
            self._measure = sum((hi - lo for lo, hi in self.components), Fraction(0))
        return self._measure

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.space is other.space and self.components == other.components

    def __hash__(self):
        return hash((self.space, tuple(self.components)))

    def __repr__(self):
        body = " ∪ ".join(f"[{format_scalar(lo)}, {format_scalar(hi)}]" for lo, hi in self.components)
        return f"IntervalSet({body or '∅'}, {self.space.value})"

    def __contains__(self, x):
        if self.space is Space.CIRCLE and x == 1:
            x = 0 * x
        lo_i, hi_i = 0, len(self.components)
        while lo_i < hi_i:
            mid = (lo_i + hi_i) // 2
            if self.components[mid][1] < x:
                lo_i = mid + 1
            else:
                hi_i = mid
        return lo_i < len(self.components) and self.components[lo_i][0] <= x

    def _check(self, other):
        if self.space is not other.space:
            raise UsageError("interval sets live in different spaces")

    def __and__(self, other: "IntervalSet"):
        self._check(other)
        out = []
        A, B = self.components, other.components
        i = j = 0
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out, self.space)

    def __or__(self, other: "IntervalSet"):
        self._check(other)
        return IntervalSet(self.components + other.components, self.space)

    def issubset(self, other: "IntervalSet") -> bool:
        self._check(other)
        return (self & other) == self

    __le__ = issubset

    def to_pairs(self):
        return [f"{format_scalar(lo)},{format_scalar(hi)}" for lo, hi in self.components]

    @classmethod
    def from_pairs(cls, pairs, space=Space.INTERVAL, mode=None):
        comps = []
        for p in pairs:
            lo, hi = p.split(",")
            comps.append((parse_scalar(lo), parse_scalar(hi)) if mode is None
                         else (parse_scalar(lo, mode), parse_scalar(hi, mode)))
        return cls(comps, space)


def _canonical(comps, space):
    for lo, hi in comps:
        if lo > hi or lo < 0 or hi > 1:
            raise UsageError(f"bad component [{lo}, {hi}]")
    if space is Space.CIRCLE:
        fixed = []
        for lo, hi in comps:
            if lo == 1:
                fixed.append((0 * lo, 0 * hi))
            else:
                fixed.append((lo, hi))
        comps = fixed
        if any(hi == 1 for _, hi in comps) and not any(lo == 0 for lo, _ in comps):
            z = comps[0][0] * 0
            comps.append((z, z))
    comps.sort()
    merged = []
    for lo, hi in comps:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged
