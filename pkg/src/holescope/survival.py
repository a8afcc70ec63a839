"""Finite-horizon surviving sets, escape times and escape rates."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import config
from .errors import ResourceCapError, UsageError
from .intervals import IntervalSet
from .maps import PiecewiseLinearMap
from .phase import Hole, Space, check_budget, format_scalar, frac_part, hole_contains, is_exact


@dataclass(frozen=True)
class EscapeVerdict:
    escaped: bool
    time: int | None
    horizon: int


def escape_time(f: PiecewiseLinearMap, h: Hole, x, N: int, budget=None) -> EscapeVerdict:
    """First n in [0, N] with f^n(x) inside the open hole."""
    if h.space is not f.space:
        raise UsageError("hole and map live in different spaces")
    exact = f.exact and is_exact(x)
    if f.space is Space.CIRCLE:
        x = frac_part(x)
    for n in range(N + 1):
        if hole_contains(h, x):
            return EscapeVerdict(True, n, N)
        if n < N:
            x = f(x)
            if exact:
                check_budget(x, budget)
    return EscapeVerdict(False, None, N)


def _require_exact(f, h):
    if not (f.exact and is_exact(h.a) and is_exact(h.b)):
        raise UsageError("exact surviving sets need a rational map and hole")
    if h.space is not f.space:
        raise UsageError("hole and map live in different spaces")


def iter_surviving_sets(f: PiecewiseLinearMap, h: Hole, cap=None, budget=None):
    """Yield S^0, S^1, ... by the pullback recursion A_{k+1} = A_0 ∩ f^{-1}(A_k)."""
    _require_exact(f, h)
    cap = config.get("component_cap", cap)
    base = IntervalSet.outside_hole(h)
    cur = base
    while True:
        yield cur
        cur = base & f.preimage(cur)
        if len(cur) > cap:
            raise ResourceCapError(f"surviving set has more than {cap} components")
        for lo, hi in cur.components:
            check_budget(lo, budget)
            check_budget(hi, budget)


def surviving_set(f: PiecewiseLinearMap, h: Hole, N: int, cap=None) -> IntervalSet:
    """Exact S^N: points whose first N+1 positions avoid the hole."""
    if N < 0:
        raise UsageError("N must be >= 0")
    for k, s in enumerate(iter_surviving_sets(f, h, cap)):
        if k == N or not s:
            return s


def _log(q):
    if isinstance(q, Fraction):
        return math.log(q.numerator) - math.log(q.denominator)
    return math.log(q)


@dataclass
class EscapeRateSeries:
    hole: Hole
    horizons: list
    measures: list
    rates: list
    fitted_rate: float
    fit_window: str = "least squares of -log(measure) against N over the tail half of horizons"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "measure", "rate"])
        for n, m, r in zip(self.horizons, self.measures, self.rates):
            w.writerow([n, format_scalar(m), repr(r)])
        return buf.getvalue()


def fit_rate(horizons, measures):
    """Slope of -log(measure) against N over the tail half of the series."""
    if any(m == 0 for m in measures):
        return math.inf
    k = len(horizons)
    if k < 2:
        raise UsageError("need at least two horizons to fit an escape rate")
    tail = slice(min(k // 2, k - 2), k)
    xs = np.array(horizons[tail], dtype=float)
    ys = np.array([-_log(m) for m in measures[tail]])
    return float(np.polyfit(xs, ys, 1)[0])


def escape_rate(f: PiecewiseLinearMap, h: Hole, horizons, cap=None) -> EscapeRateSeries:
    horizons = sorted(set(int(n) for n in horizons))
    if not horizons or horizons[0] < 0:
        raise UsageError("horizons must be non-negative")
    want = set(horizons)
    hs, ms = [], []
    for k, s in enumerate(iter_surviving_sets(f, h, cap)):
        if k in want:
            hs.append(k)
            ms.append(s.measure)
            if s.measure == 0:
                break
        if k >= horizons[-1]:
            break
    rates = [(-_log(m) / n if m > 0 else math.inf) if n > 0 else math.nan
             for n, m in zip(hs, ms)]
    fitted = fit_rate(hs, ms) if len(hs) > 1 or ms[-1] == 0 else math.nan
    return EscapeRateSeries(h, hs, ms, rates, fitted)


# -- stability window ------------------------------------------------------
def ball(x, eps, space: Space) -> IntervalSet:
    """Closed ball of radius eps around x, clipped to [0,1] or wrapped on the circle."""
    lo, hi = x - eps, x + eps
    if space is Space.INTERVAL:
        return IntervalSet([(max(lo, 0 * x), min(hi, 0 * x + 1))], space)
    if eps >= Fraction(1, 2):
        return IntervalSet.full(space)
    comps = []
    if lo < 0:
        comps += [(lo + 1, 0 * x + 1), (0 * x, hi)]
    elif hi > 1:
        comps += [(lo, 0 * x + 1), (0 * x, hi - 1)]
    else:
        comps.append((lo, hi))
    return IntervalSet(comps, space)


def _shrunk_hole_set(h: Hole, eps):
    """The closed arc [a+eps, b-eps] inside the hole, or None if it is empty."""
    if 2 * eps >= h.length:
        return None
    a, b = h.a + eps, h.b - eps
    if h.space is Space.CIRCLE:
        a, b = frac_part(a), frac_part(b)
        if a > b:
            return IntervalSet([(a, 0 * a + 1), (0 * a, b)], h.space)
    return IntervalSet([(a, b)], h.space)


@dataclass(frozen=True)
class StabilityWindow:
    hole: Hole
    eps: Fraction
    L: int
    ell_a: int
    ell_b: int


def stability_window(f: PiecewiseLinearMap, h: Hole, N: int, max_halvings=64) -> StabilityWindow | None:
    """Radius eps and lag L for which nearby holes have sandwiched surviving sets.

    Both endpoints must escape within N steps (so the hole is certified to lie
    off the bifurcation set at that horizon).  L is the larger escape time and
    eps is halved from (b-a)/8 until the eps-ball around each endpoint is mapped
    by f^l into the closed arc [a+2eps, b-2eps].  Returns None when no such
    radius is found.
    """
    _require_exact(f, h)
    va, vb = escape_time(f, h, h.a, N), escape_time(f, h, h.b, N)
    if not (va.escaped and vb.escaped):
        return None
    eps = Fraction(h.length) / 8
    for _ in range(max_halvings):
        target = _shrunk_hole_set(h, 2 * eps)
        if target is not None:
            ok = True
            for x, ell in ((h.a, va.time), (h.b, vb.time)):
                pre = target
                for _ in range(ell):
                    pre = f.preimage(pre)
                if not ball(x, eps, h.space).issubset(pre):
                    ok = False
                    break
            if ok:
                return StabilityWindow(h, eps, max(va.time, vb.time), va.time, vb.time)
        eps /= 2
    return None


def sandwich_holds(f: PiecewiseLinearMap, h: Hole, h2: Hole, L: int, N: int) -> bool:
    """Check S^{N+2L}(h) ⊆ S^{N+L}(h2) ⊆ S^N(h) exactly."""
    inner = surviving_set(f, h, N + 2 * L)
    mid = surviving_set(f, h2, N + L)
    outer = surviving_set(f, h, N)
    return inner.issubset(mid) and mid.issubset(outer)
