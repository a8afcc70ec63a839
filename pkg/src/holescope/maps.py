"""Continuous piecewise-linear maps of [0,1] or of the circle.

On branch ``l`` the map is ``f(x) = slopes[l] * x + intercepts[l]``.  Circle
maps are stored in lifted form: branches are refined at construction so that
each branch image is a sub-interval of [0,1], and the value 1 is read as 0.
"""
from __future__ import annotations

import json
import math
import re
from bisect import bisect_left, bisect_right
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import config
from .errors import UsageError
from .intervals import IntervalSet
from .phase import Mode, Space, check_budget, format_scalar, is_exact, parse_scalar


def _tolerance(values):
    """Comparison tolerance suited to the number type of ``values``."""
    if all(is_exact(v) for v in values):
        return 0
    try:
        import mpmath
        if any(isinstance(v, mpmath.mpf) for v in values):
            return mpmath.mpf(10) ** (-(mpmath.mp.dps - 8))
    except ImportError:  # pragma: no cover
        pass
    return config.get("eps_tol")


def _floor(y, tol):
    k = math.floor(y)
    if y - k >= 1 - tol:  # y is an integer up to rounding
        k += 1
    return int(k)


class PiecewiseLinearMap:
    """Immutable continuous piecewise-affine self-map."""

    __slots__ = ("space", "breakpoints", "slopes", "intercepts", "label", "tol",
                 "critical_points", "_frozen")

    def __init__(self, space: Space, breakpoints, slopes, intercepts, label="", tol=None):
        bp = list(breakpoints)
        sl = list(slopes)
        ic = list(intercepts)
        n = len(sl)
        if n < 1 or len(ic) != n or len(bp) != n + 1:
            raise UsageError("need n+1 breakpoints and n (slope, intercept) pairs")
        if bp[0] != 0 or bp[-1] != 1:
            raise UsageError("breakpoints must start at 0 and end at 1")
        for lo, hi in zip(bp, bp[1:]):
            if not lo < hi:
                raise UsageError(f"degenerate or unordered branch [{lo}, {hi}]")
        if any(s == 0 for s in sl):
            raise UsageError("branch slopes must be nonzero")
        tol = _tolerance(bp + sl + ic) if tol is None else tol

        crit = []
        for i in range(1, n):
            left = sl[i - 1] * bp[i] + ic[i - 1]
            right = sl[i] * bp[i] + ic[i]
            gap = left - right
            if space is Space.CIRCLE:
                gap -= round(gap)
            if abs(gap) > tol:
                raise UsageError(f"map is discontinuous at breakpoint {format_scalar(bp[i])}")
            if (sl[i - 1] > 0) != (sl[i] > 0):
                crit.append(bp[i])
        if space is Space.CIRCLE:
            gap = (sl[-1] + ic[-1]) - ic[0]
            gap -= round(gap)
            if abs(gap) > tol:
                raise UsageError("circle map does not close up at the wrap point")
            if (sl[-1] > 0) != (sl[0] > 0):
                crit.insert(0, bp[0])
            bp, sl, ic = _refine_circle(bp, sl, ic, tol)
        else:
            for i in range(n):
                for x in (bp[i], bp[i + 1]):
                    y = sl[i] * x + ic[i]
                    if y < -tol or y > 1 + tol:
                        raise UsageError(f"map leaves [0,1] at x={format_scalar(x)}")

        self.space = space
        self.breakpoints = tuple(bp)
        self.slopes = tuple(sl)
        self.intercepts = tuple(ic)
        self.label = label
        self.tol = tol
        self.critical_points = tuple(crit)
        self._frozen = True

    def __setattr__(self, key, value):
        if getattr(self, "_frozen", False):
            raise AttributeError("PiecewiseLinearMap is immutable")
        object.__setattr__(self, key, value)

    def __repr__(self):
        return f"PiecewiseLinearMap({self.label or '?'}, {self.space.value}, {self.n_branches} branches)"

    # -- structure ---------------------------------------------------------
    @property
    def n_branches(self):
        return len(self.slopes)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.breakpoints + self.slopes + self.intercepts)

    @property
    def mode(self) -> Mode:
        return Mode.EXACT if self.exact else Mode.FLOAT

    @property
    def expanding(self) -> bool:
        """Piecewise uniformly expanding: every |slope| > 1."""
        return min(abs(s) for s in self.slopes) > 1

    def branch_of(self, x) -> int:
        i = bisect_right(self.breakpoints, x) - 1
        return min(max(i, 0), self.n_branches - 1)

    def snap(self, x):
        """Replace x by a breakpoint lying within the tolerance, if any."""
        if not self.tol:
            return x
        i = bisect_left(self.breakpoints, x)
        for j in (i - 1, i):
            if 0 <= j < len(self.breakpoints) and abs(self.breakpoints[j] - x) <= self.tol:
                return self.breakpoints[j]
        return x

    def branch_right(self, x):
        """Index of the branch containing [x, x+eps), or None at the right end of [0,1]."""
        i = bisect_right(self.breakpoints, x) - 1
        if i >= self.n_branches:
            return 0 if self.space is Space.CIRCLE else None
        return i

    def branch_left(self, x):
        """Index of the branch containing (x-eps, x], or None at the left end of [0,1]."""
        i = bisect_left(self.breakpoints, x) - 1
        if i < 0:
            return self.n_branches - 1 if self.space is Space.CIRCLE else None
        return i

    # -- evaluation --------------------------------------------------------
    def apply_branch(self, i, x):
        y = self.slopes[i] * x + self.intercepts[i]
        if self.space is Space.CIRCLE:
            if y >= 1 or y < 0:
                y -= _floor(y, 0) if self.exact else math.floor(y)
        return y

    def __call__(self, x):
        return self.apply_branch(self.branch_of(x), x)

    def iterate(self, x, n: int, budget=None):
        """f^n(x); exact maps check the bit budget at every step."""
        if n < 0:
            raise UsageError("n must be >= 0")
        exact = self.exact and is_exact(x)
        if self.space is Space.CIRCLE and (x >= 1 or x < 0):
            x -= math.floor(x)
        for _ in range(n):
            x = self(x)
            if exact:
                check_budget(x, budget)
        return x

    def orbit(self, x, n: int, budget=None):
        out = [x]
        for _ in range(n):
            x = self(x)
            if self.exact:
                check_budget(x, budget)
            out.append(x)
        return out

    # -- set algebra -------------------------------------------------------
    def preimage(self, s: IntervalSet) -> IntervalSet:
        """Exact f^{-1}(s) by inverting every branch."""
        if s.space is not self.space:
            raise UsageError("interval set and map live in different spaces")
        comps = list(s.components)
        if not comps:
            return IntervalSet.empty(self.space)
        if self.space is Space.CIRCLE and comps[0][0] == 0:
            comps.append((comps[0][0] + 1, comps[0][0] + 1))  # lifted copy of 0
        los = [c[0] for c in comps]
        his = [c[1] for c in comps]
        out = []
        bp = self.breakpoints
        for i, (sl, ic) in enumerate(zip(self.slopes, self.intercepts)):
            p, q = bp[i], bp[i + 1]
            y0, y1 = sl * p + ic, sl * q + ic
            m, M = (y0, y1) if y0 <= y1 else (y1, y0)
            j = bisect_left(his, m)
            while j < len(comps) and los[j] <= M:
                u, v = comps[j]
                if sl > 0:
                    lo, hi = (u - ic) / sl, (v - ic) / sl
                else:
                    lo, hi = (v - ic) / sl, (u - ic) / sl
                lo, hi = max(lo, p), min(hi, q)
                if lo <= hi:
                    out.append((lo, hi))
                j += 1
        return IntervalSet(out, self.space)

    def itinerary_interval(self, w):
        """Closed lifted interval {x : f^k(x) in I_{w_k}}, or None if empty."""
        if len(w) < 1:
            raise UsageError("itinerary must be nonempty")
        bp = self.breakpoints
        lo, hi = bp[0], bp[-1]
        for k in reversed(range(len(w))):
            i = w[k]
            if not 0 <= i < self.n_branches:
                raise UsageError(f"branch index {i} out of range")
            sl, ic = self.slopes[i], self.intercepts[i]
            a, b = (lo - ic) / sl, (hi - ic) / sl
            if a > b:
                a, b = b, a
            lo, hi = max(a, bp[i]), min(b, bp[i + 1])
            if lo > hi:
                return None
        return lo, hi

    def itinerary_domain(self, w) -> IntervalSet:
        iv = self.itinerary_interval(w)
        return IntervalSet([iv] if iv else [], self.space)

    # -- conversions -------------------------------------------------------
    def as_arrays(self):
        """Float64 arrays (breakpoints, slopes, intercepts) for compiled kernels."""
        return (np.array([float(v) for v in self.breakpoints]),
                np.array([float(v) for v in self.slopes]),
                np.array([float(v) for v in self.intercepts]))

    def to_float(self):
        bp, sl, ic = self.as_arrays()
        return PiecewiseLinearMap(self.space, list(bp), list(sl), list(ic), self.label)

    def to_config(self) -> dict:
        return {
            "label": self.label,
            "space": self.space.value,
            "breakpoints": [format_scalar(v) for v in self.breakpoints],
            "branches": [{"slope": format_scalar(s), "intercept": format_scalar(c)}
                         for s, c in zip(self.slopes, self.intercepts)],
        }


def _refine_circle(bp, sl, ic, tol):
    """Split circle branches so every lifted branch image lies in [0,1]."""
    nbp, nsl, nic = [bp[0]], [], []
    for i in range(len(sl)):
        p, q, s, c = bp[i], bp[i + 1], sl[i], ic[i]
        y0, y1 = s * p + c, s * q + c
        m, M = min(y0, y1), max(y0, y1)
        cuts = []
        for k in range(math.floor(m) + 1, math.ceil(M)):
            x = (k - c) / s
            if p + tol < x < q - tol:
                cuts.append(x)
        cuts.sort()
        pieces = [p] + cuts + [q]
        for lo, hi in zip(pieces, pieces[1:]):
            ya, yb = s * lo + c, s * hi + c
            k = _floor(min(ya, yb), tol)
            nsl.append(s)
            nic.append(c - k)
            nbp.append(hi)
    return nbp, nsl, nic


# -- built-in maps ---------------------------------------------------------
def doubling():
    F = Fraction
    return PiecewiseLinearMap(Space.CIRCLE, [F(0), F(1, 2), F(1)], [F(2), F(2)], [F(0), F(-1)],
                              label="doubling")


def full_tent():
    F = Fraction
    return PiecewiseLinearMap(Space.INTERVAL, [F(0), F(1, 2), F(1)], [F(2), F(-2)], [F(0), F(2)],
                              label="full-tent")


def restricted_tent(s):
    """Tent map of slope s renormalized to its core, critical point c_s = 1 - 1/s."""
    if isinstance(s, str):
        s = parse_scalar(s)
    elif isinstance(s, int):
        s = Fraction(s)
    if not 1 < s <= 2:
        raise UsageError(f"restricted tent needs s in (1, 2], got {s}")
    one = s / s
    c = one - one / s
    return PiecewiseLinearMap(Space.INTERVAL, [0 * s, c, one], [s, -s], [2 * one - s, s],
                              label=f"restricted-tent({format_scalar(s)})")


def two_block():
    """Map with the two transitive invariant blocks [0,1/2] and [1/2,1]."""
    F = Fraction
    bp = [F(0), F(1, 6), F(1, 3), F(2, 3), F(5, 6), F(1)]
    sl = [F(3), F(-3), F(3), F(-3), F(3)]
    ic = [F(0), F(1), F(-1), F(3), F(-2)]
    return PiecewiseLinearMap(Space.INTERVAL, bp, sl, ic, label="two-block")


def from_config(doc: dict, mode=Mode.EXACT):
    try:
        space = Space.parse(doc["space"])
        bp = [parse_scalar(v, mode) for v in doc["breakpoints"]]
        sl = [parse_scalar(b["slope"], mode) for b in doc["branches"]]
        ic = [parse_scalar(b["intercept"], mode) for b in doc["branches"]]
    except (KeyError, TypeError) as e:
        raise UsageError(f"malformed map config: missing {e}") from None
    return PiecewiseLinearMap(space, bp, sl, ic, label=doc.get("label", "user"))


def load_map(path, mode=Mode.EXACT):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read map config {path}: {e}") from None
    return from_config(doc, mode)


def save_map(f: PiecewiseLinearMap, path):
    Path(path).write_text(json.dumps(f.to_config(), indent=2) + "\n", encoding="utf-8")


_TENT_RE = re.compile(r"^(?:restricted-tent|tent)[(:]\s*([^)]+?)\s*\)?$")


def builtin(name: str, mode=Mode.EXACT):
    """Look up a map by name, or load a JSON config if ``name`` is a file path."""
    key = name.strip().lower()
    if key == "doubling":
        f = doubling()
    elif key in ("full-tent", "tent2"):
        f = full_tent()
    elif key == "two-block":
        f = two_block()
    elif m := _TENT_RE.match(key):
        f = restricted_tent(parse_scalar(m.group(1), mode))
    elif Path(name).is_file():
        return load_map(name, mode)
    else:
        raise UsageError(f"unknown map {name!r}")
    return f if mode is Mode.EXACT else f.to_float()
