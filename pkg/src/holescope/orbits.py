"""Periodic orbits of piecewise-linear maps via branch itineraries."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from . import config
from .errors import ResourceCapError, UsageError
from .maps import PiecewiseLinearMap
from .phase import Space, check_budget, format_scalar, frac_part

PRESERVES, REVERSES, NA = "preserves", "reverses", "not-applicable"
POSITIVE, NEGATIVE = "positive", "negative"


def _require_exact(f):
    if not f.exact:
        raise UsageError("periodic-orbit enumeration needs an exact (rational) map")


def _power_table(f: PiecewiseLinearMap, n_max: int, node_cap=None, budget=None):
    """Fixed points of f^n for n = 1..n_max from one depth-first itinerary search.

    Each node carries the affine composition F(x) = S*x + C valid on the closed
    interval D of points following the itinerary so far.  At depth n the
    equation F(x) = x + k is solved (k in {-1, 0, 1} on the circle, where the
    lifted branch images lie in [0,1]).
    """
    _require_exact(f)
    cap = config.get("node_cap", node_cap)
    bp, sl, ic = f.breakpoints, f.slopes, f.intercepts
    nb = f.n_branches
    circle = f.space is Space.CIRCLE
    shifts = (-1, 0, 1) if circle else (0,)
    found = [set() for _ in range(n_max + 1)]
    nodes = 0
    zero, one = bp[0], bp[-1]
    stack = [(0, zero, one, one, zero)]  # depth, lo, hi, S, C
    while stack:
        depth, lo, hi, S, C = stack.pop()
        if depth:
            for k in shifts:
                if S == 1:
                    if C == k:
                        raise UsageError(f"f^{depth} fixes a whole interval; fixed points are not isolated")
                    continue
                x = (C - k) / (1 - S)
                if lo <= x <= hi:
                    found[depth].add(frac_part(x) if circle else x)
        if depth == n_max:
            continue
        for i in range(nb):
            # points of D whose current image S*x + C lies in branch i
            u, v = bp[i], bp[i + 1]
            a, b = (u - C) / S, (v - C) / S
            if a > b:
                a, b = b, a
            nlo, nhi = max(lo, a), min(hi, b)
            if nlo > nhi:
                continue
            nodes += 1
            if nodes > cap:
                raise ResourceCapError(f"itinerary search exceeded {cap} nodes")
            S2, C2 = sl[i] * S, sl[i] * C + ic[i]
            check_budget(C2, budget)
            stack.append((depth + 1, nlo, nhi, S2, C2))
    return [sorted(s) for s in found]


def fixed_points_of_power(f: PiecewiseLinearMap, n: int, node_cap=None):
    if n < 1:
        raise UsageError("n must be >= 1")
    return _power_table(f, n, node_cap)[n]


# -- orientation -----------------------------------------------------------
def side_flow(f: PiecewiseLinearMap, x, side: int, p: int):
    """Follow a one-sided neighbourhood of x through p steps.

    Returns (final_side, |slope product|) where final_side = +1 means the
    image of the ``side`` half-neighbourhood of x lies to the right of f^p(x).
    Returns None when the side does not exist (x at an end of [0,1]).
    """
    mult = 1
    y = x
    for _ in range(p):
        y = f.snap(y)
        i = f.branch_right(y) if side > 0 else f.branch_left(y)
        if i is None:
            return None
        s = f.slopes[i]
        if f.space is Space.CIRCLE and side < 0 and y == 0:
            y = y + 1  # the left branch at 0 is the last branch at the lifted point 1
        y = f.apply_branch(i, y)
        side = side if s > 0 else -side
        mult *= abs(s)
    return side, mult


@dataclass
class PeriodicOrbit:
    """A periodic orbit with one-sided orientation data of f^p at each point.

    ``cycle`` lists the points in dynamical order starting from the smallest.
    """
    cycle: tuple
    minimal_period: int
    orientation_at: dict
    critical: bool
    signs_at: dict
    multiplier: object
    space: Space = Space.INTERVAL

    @property
    def points(self):
        return tuple(sorted(self.cycle))

    @property
    def hyperbolic(self) -> bool:
        return self.multiplier > 1

    @classmethod
    def from_point(cls, f: PiecewiseLinearMap, x, period: int | None = None, max_period=10_000):
        """Build the orbit of a periodic point x (exact, or within the map tolerance)."""
        x = f.snap(x)
        cyc = [x]
        y = x
        for k in range(1, (period or max_period) + 1):
            y = f.snap(f(y))
            if _same_point(f, x, y):
                if period is not None and k != period:
                    break
                return cls._build(f, cyc)
            cyc.append(y)
        raise UsageError(f"point {format_scalar(x)} is not periodic with the given period")

    @classmethod
    def _build(cls, f, cyc):
        p = len(cyc)
        start = min(range(p), key=lambda j: cyc[j])
        cyc = cyc[start:] + cyc[:start]
        crit_set = set(f.critical_points)
        if f.tol:
            critical = any(min((abs(c - y) for c in crit_set), default=1) <= f.tol for y in cyc)
        else:
            critical = any(y in crit_set for y in cyc)
        orient, signs = {}, {}
        mult = None
        for y in cyc:
            right = side_flow(f, y, +1, p)
            left = side_flow(f, y, -1, p)
            ms = [r[1] for r in (left, right) if r is not None]
            m = min(ms)
            mult = m if mult is None else min(mult, m)
            if critical:
                orient[y] = NA
                signs[y] = _sign_label(left, right)
            else:
                d = right[0] if right is not None else -left[0]
                orient[y] = PRESERVES if d > 0 else REVERSES
                signs[y] = NA
        return cls(tuple(cyc), p, orient, critical, signs, mult, f.space)

    def step_pairs(self, boundary=()):
        """Adjacent pairs of points off the boundary; on the circle the wrap pair too."""
        pts = [y for y in self.points if y not in boundary]
        pairs = list(zip(pts, pts[1:]))
        if self.space is Space.CIRCLE and len(pts) >= 2:
            pairs.append((pts[-1], pts[0]))
        return pairs


def _same_point(f, x, y):
    if not f.tol:
        return x == y
    d = abs(y - x)
    if f.space is Space.CIRCLE:
        d = min(d, 1 - d)
    return d <= f.tol


def _sign_label(left, right):
    """Positive/negative in the sense of one-sided images of f^p.

    Positive: both one-sided neighbourhoods land on the right of the point;
    negative: both land on the left.  Mixed data means f^p is locally
    monotone, reported by direction.
    """
    sides = {r[0] for r in (left, right) if r is not None}
    if left is not None and right is not None:
        if left[0] == right[0]:
            return POSITIVE if right[0] > 0 else NEGATIVE
        return PRESERVES if right[0] > 0 else REVERSES
    # one-sided point at an end of [0,1]: images stay inside [0,1]
    (s,) = sides
    return POSITIVE if s > 0 else NEGATIVE


def periodic_orbits(f: PiecewiseLinearMap, p_max: int, node_cap=None):
    """All periodic orbits with minimal period <= p_max, sorted by (period, points)."""
    if p_max < 1:
        return []
    table = _power_table(f, p_max, node_cap)
    sets = [set(t) for t in table]
    seen = set()
    out = []
    for p in range(1, p_max + 1):
        for x in table[p]:
            if x in seen:
                continue
            # minimal period: smallest divisor d of p with x fixed by f^d
            d = next(d for d in range(1, p + 1) if p % d == 0 and x in sets[d])
            if d != p:
                continue
            orb = PeriodicOrbit.from_point(f, x, p)
            seen.update(orb.cycle)
            out.append(orb)
    out.sort(key=lambda o: (o.minimal_period, o.points))
    return out


def orbits_to_csv(orbits) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["period", "points", "orientation", "critical", "signs"])
    for o in orbits:
        pts = o.points
        w.writerow([o.minimal_period,
                    " ".join(format_scalar(x) for x in pts),
                    " ".join(o.orientation_at[x] for x in pts),
                    int(o.critical),
                    " ".join(o.signs_at[x] for x in pts)])
    return buf.getvalue()


# -- entropy ---------------------------------------------------------------
@dataclass
class EntropyEstimate:
    counts: list
    estimates: list
    reported: float
    expanding: bool
    rule: str = "max of (1/n) log #Fix(f^n) over the last three n"


def entropy_estimate(f: PiecewiseLinearMap, n_max: int, node_cap=None) -> EntropyEstimate:
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    table = _power_table(f, n_max, node_cap)
    counts = [(n, len(table[n])) for n in range(1, n_max + 1)]
    est = [math.log(c) / n if c > 0 else -math.inf for n, c in counts]
    return EntropyEstimate(counts, est, max(est[-3:]), f.expanding)
