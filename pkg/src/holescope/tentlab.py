"""Experiments on the restricted tent family T_s, s in [sqrt 2, 2].

T_s(x) = s*x + 2 - s on [0, c_s] and s - s*x on [c_s, 1], with critical
point c_s = 1 - 1/s, so that c_s -> 1 -> 0 -> 2 - s.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import config
from .bifset import (ACCUMULATED_FROM_BELOW, BifRaster, classify_step, hausdorff_distance, rasterize,
                     stair_of_orbit)
from .errors import BitBudgetError, DerivativeUndefinedError, UsageError
from .maps import restricted_tent
from .orbits import PeriodicOrbit
from .phase import check_budget, format_scalar, is_exact

SQRT2 = math.sqrt(2.0)


def _one(s):
    return Fraction(1) if isinstance(s, (int, Fraction)) else s / s


def critical_point(s):
    if isinstance(s, int):
        s = Fraction(s)
    return _one(s) - 1 / s


def tent(s, x):
    """T_s(x) for any scalar type."""
    c = critical_point(s)
    return s * x + 2 - s if x <= c else s - s * x


def x_s(s):
    """The point with T_s^2(x_s) = c_s used to build negative/positive steps."""
    if isinstance(s, int):
        s = Fraction(s)
    one = _one(s)
    return one - 1 / s - 1 / s ** 2 + 1 / s ** 3


def _check_param(s, lo=1.0, closed_lo=False):
    v = float(s)
    if not ((lo <= v if closed_lo else lo < v) and v <= 2.0 + 1e-15):
        raise UsageError(f"parameter s={s} outside ({lo}, 2]")


# -- critical orbit ------------------------------------------------------------
@dataclass
class CriticalOrbitReport:
    s: object
    c_s: object
    orbit_prefix: list
    verdict: str                 # periodic | preperiodic | undecided
    period: int | None = None
    tail: int | None = None
    n0c: int | None = None       # first n >= 1 with T^n(0) = c_s
    tolerance: object = 0
    note: str = ""

    def describe(self):
        if self.verdict == "periodic":
            return f"periodic({self.period})"
        if self.verdict == "preperiodic":
            return f"preperiodic(tail={self.tail},p={self.period})"
        return "undecided"


def critical_orbit(s, n_max=None, tol=None, prefix=12, budget=None) -> CriticalOrbitReport:
    """Iterate c_s and classify its orbit.

    Rational s is handled exactly (bit budget applies).  For float or mpf s,
    periodicity needs the return to within ``tol`` of c_s to repeat over three
    periods, and preperiodicity needs an earlier orbit point to recur the same
    way.  "undecided" after n_max steps is the working stand-in for a
    transitive critical point.
    """
    if isinstance(s, int):
        s = Fraction(s)
    _check_param(s)
    n_max = config.get("tent_nmax", n_max)
    exact = is_exact(s)
    tol = 0 if exact else config.get("tent_periodic_tol", tol)
    c = critical_point(s)
    orbit = [c]
    x = c
    seen = {c: 0} if exact else None
    buckets = {} if not exact else None
    verdict, period, tail = "undecided", None, None

    def key(v):
        return int(math.floor(float(v) / tol))

    if not exact:
        buckets.setdefault(key(c), []).append(0)
    for k in range(1, n_max + 1):
        x = tent(s, x)
        if exact:
            check_budget(x, budget)
        orbit.append(x)
        if exact:
            if x in seen:
                j = seen[x]
                verdict, period, tail = ("periodic", k, 0) if j == 0 else ("preperiodic", k - j, j)
                break
            seen[x] = k
        else:
            hit = None
            for kk in (key(x) - 1, key(x), key(x) + 1):
                for j in buckets.get(kk, ()):
                    if abs(orbit[j] - x) <= tol:
                        hit = j
                        break
                if hit is not None:
                    break
            if hit is not None and _recurs(s, orbit[hit], k - hit, tol):
                p = k - hit
                verdict, period, tail = ("periodic", p, 0) if hit == 0 else ("preperiodic", p, hit)
                break
            buckets.setdefault(key(x), []).append(k)
    n0c = _first_hit_of_c(s, c, n_max, tol)
    note = "" if verdict != "undecided" else \
        f"no periodic or preperiodic structure within {n_max} steps (proxy for a transitive critical point)"
    return CriticalOrbitReport(s, c, orbit[:prefix], verdict, period, tail, n0c, tol, note)


def _recurs(s, x0, p, tol):
    """x0 returns within tol after p, 2p and 3p steps."""
    x = x0
    for m in range(1, 4):
        for _ in range(p):
            x = tent(s, x)
        if abs(x - x0) > tol * m:
            return False
    return True


def _first_hit_of_c(s, c, n_max, tol):
    x = 0 * c
    for n in range(1, n_max + 1):
        x = tent(s, x)
        if (x == c) if not tol else abs(x - c) <= tol:
            return n
    return None


# -- parameter derivative --------------------------------------------------------
@dataclass
class ParamDerivative:
    s: object
    n: int
    value: object
    branch_history: list        # 0 for [0, c_s), 1 for (c_s, 1]
    values: list = field(default_factory=list)   # d/ds T^j(0), j = 0..n

    @property
    def x_derivative(self):
        """d/dx T_s^n at 0: the product of the branch slopes along the orbit."""
        sign = -1 if sum(self.branch_history) % 2 else 1
        return sign * self.s ** self.n


def dds_iterate_zero(s, n: int, tol=None) -> ParamDerivative:
    """d/ds T_s^n(0) by the two-branch recursion along the orbit of 0."""
    if isinstance(s, int):
        s = Fraction(s)
    _check_param(s)
    if n < 0:
        raise UsageError("n must be >= 0")
    exact = is_exact(s)
    tol = 0 if exact else config.get("eps_tol", tol)
    c = critical_point(s)
    x, d = 0 * c, 0 * c
    hist, vals = [], [d]
    for ell in range(n):
        if (x == c) if exact else abs(x - c) <= tol:
            raise DerivativeUndefinedError(ell)
        if x < c:
            d = -1 + x + s * d
            hist.append(0)
        else:
            d = 1 - x - s * d
            hist.append(1)
        x = tent(s, x)
        vals.append(d)
    return ParamDerivative(s, n, d, hist, vals)


def growth_bound_holds(pd: ParamDerivative) -> bool:
    """Once |d/ds T^j(0)| >= 1/(s-1) it stays so for all later j of the history."""
    bound = 1 / (pd.s - 1)
    reached = False
    for v in pd.values:
        if abs(v) >= bound:
            reached = True
        elif reached:
            return False
    return True


def sign_law_holds(s, n0c: int) -> bool:
    """At a periodic-critical parameter: d/ds(T^n(0) - c_s) > 0 iff (T^n)'(0) = -s^n."""
    pd = dds_iterate_zero(s, n0c)
    dd = pd.value - 1 / s ** 2   # d/ds c_s = 1/s^2
    if dd == 0:
        return False
    return (pd.x_derivative < 0) == (dd > 0)


# -- J-witness search ---------------------------------------------------------------
@dataclass
class JWitness:
    s: object                 # high-precision parameter
    period: int
    orbit: PeriodicOrbit
    step: object              # classified Step, accumulated from below
    residual: float
    dps: int

    @property
    def s_float(self):
        return float(self.s)

    def as_dict(self):
        a, b = self.step.corner
        return {"s": mpmath.nstr(self.s, 30), "period": self.period,
                "corner": [mpmath.nstr(a, 20), mpmath.nstr(b, 20)],
                "classification": self.step.classification, "residual": self.residual}


def _g_grid(s, p):
    """T_s^p(c_s) - c_s on an array of parameters (float64)."""
    c = 1.0 - 1.0 / s
    x = c.copy()
    for _ in range(p):
        x = np.where(x <= c, s * x + 2.0 - s, s - s * x)
    return x - c


def _orbit_mp(s, p):
    c = 1 - 1 / s
    x = c
    for _ in range(p):
        x = tent(s, x)
    return x - c


def find_J_parameter(s_lo, s_hi, p_max: int, method="roots", grid=4000, denom_budget=200,
                     p_min=3):
    """First parameter in [s_lo, s_hi] with a step accumulated from below.

    ``method="roots"`` scans g_p(s) = T_s^p(c_s) - c_s for sign changes, one
    period at a time, refines each root in high precision, and checks the
    critical orbit's steps for the negative-at-a / positive-at-b pattern.
    ``method="rational"`` tries s = p/q for q up to ``denom_budget``.
    Returns a JWitness or None.
    """
    lo, hi = float(s_lo), float(s_hi)
    if lo < SQRT2 - 1e-12 or hi > 2.0 + 1e-12:
        raise UsageError("search window must lie inside [sqrt 2, 2]")
    if not lo < hi:
        return None
    if method == "rational":
        return _find_J_rational(s_lo, s_hi, p_max, denom_budget)
    if method != "roots":
        raise UsageError(f"unknown search method {method!r}")
    ss = np.linspace(lo, hi, grid)
    for p in range(p_min, p_max + 1):
        g = _g_grid(ss, p)
        idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
        for k in idx:
            w = _witness_from_bracket(ss[k], ss[k + 1], p)
            if w is not None:
                return w
    return None


def _witness_from_bracket(a, b, p):
    dps = 40 + 2 * p
    with mpmath.workdps(dps):
        try:
            s = mpmath.findroot(lambda t: _orbit_mp(t, p), (mpmath.mpf(a), mpmath.mpf(b)),
                                solver="anderson")
        except (ValueError, ZeroDivisionError):
            return None
        if not (a - 1e-9 <= s <= b + 1e-9):
            return None
        res = abs(_orbit_mp(s, p))
        if res > mpmath.mpf(10) ** (-(dps - 15)):
            return None
        c = 1 - 1 / s
        # minimal period must be exactly p
        x = c
        for q in range(1, p):
            x = tent(s, x)
            if abs(x - c) < mpmath.mpf(10) ** (-(dps // 2)):
                return None
        f = restricted_tent(s)
        try:
            orbit = PeriodicOrbit.from_point(f, c, p)
        except UsageError:
            return None
        st = stair_of_orbit(f, orbit)
        if st is None:
            return None
        for step in st.steps:
            cs = classify_step(f, step)
            if cs.classification == ACCUMULATED_FROM_BELOW:
                return JWitness(s, p, orbit, cs, float(res), dps)
    return None


def _find_J_rational(s_lo, s_hi, p_max, denom_budget):
    lo, hi = Fraction(str(s_lo)) if not is_exact(s_lo) else Fraction(s_lo), \
        Fraction(str(s_hi)) if not is_exact(s_hi) else Fraction(s_hi)
    tried = set()
    for q in range(1, denom_budget + 1):
        for p_ in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            s = Fraction(p_, q)
            if s in tried or not lo <= s <= hi or s <= 1:
                continue
            tried.add(s)
            rep = critical_orbit(s, n_max=p_max)
            if rep.verdict != "periodic":
                continue
            f = restricted_tent(s)
            orbit = PeriodicOrbit.from_point(f, rep.c_s, rep.period)
            st = stair_of_orbit(f, orbit)
            for step in (st.steps if st else []):
                cs = classify_step(f, step)
                if cs.classification == ACCUMULATED_FROM_BELOW:
                    return JWitness(s, rep.period, orbit, cs, 0.0, 0)
    return None


# -- continuity scans -----------------------------------------------------------------
@dataclass
class ScanReport:
    s0: object
    verdict: str
    deltas: list
    distances: list
    side: int
    rect_b: float | None = None
    rect_eps: float | None = None
    rect_cells_s0: int | None = None
    rect_cells: list = field(default_factory=list)
    resolution: int = 0
    horizon: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s0", "verdict", "delta", "s", "hausdorff", "rect_in_set_cells"])
        for k, (d, h) in enumerate(zip(self.deltas, self.distances)):
            rc = self.rect_cells[k] if self.rect_cells else ""
            w.writerow([repr(float(self.s0)), self.verdict, repr(d), repr(float(self.s0) + self.side * d),
                        repr(h), rc])
        return buf.getvalue()


def rectangle_cells(r: BifRaster, eps, b):
    """In-set cells of the rectangle (0, eps) x [b - eps, b + eps]."""
    ca = r.a_edges
    cb = r.b_edges
    ia = (ca[:-1] > 0) & (ca[1:] < eps)
    jb = (cb[:-1] >= b - eps) & (cb[1:] <= b + eps)
    return int((r.in_set & ia[:, None] & jb[None, :]).sum())


def _rect_point(rep: CriticalOrbitReport):
    """The point b whose horizontal segment the rectangle probe watches.

    Smallest nonzero point of the orbit of 0 when 0 is periodic; otherwise
    (0 fixed, as at s = 2) the smallest nonzero point of the critical orbit.
    """
    s = rep.s
    x, pts = 0 * rep.c_s, []
    for _ in range((rep.period or 0) + (rep.tail or 0) + 2):
        x = tent(s, x)
        pts.append(x)
    nz = [float(v) for v in pts if float(v) > 1e-12]
    if nz and rep.verdict == "periodic":
        return min(nz)
    crit = [float(v) for v in rep.orbit_prefix if float(v) > 1e-12]
    return min(crit) if crit else None


def continuity_scan(s0, deltas, resolution=None, N=None, side=-1, eps=None, n_max=None,
                    threads=None) -> ScanReport:
    """Hausdorff distance between rasters of T_{s0} and T_{s0 + side*delta}.

    When the critical orbit at s0 is periodic or preperiodic, also counts
    in-set cells in the rectangle (0, eps) x B_eps(b) for every raster.
    """
    resolution = config.get("resolution", resolution)
    N = config.get("horizon", N)
    eps = config.get("tent_rect_eps", eps)
    v0 = float(s0)
    for d in deltas:
        if not (SQRT2 - 1e-12 <= v0 + side * float(d) <= 2.0 + 1e-12) or not (SQRT2 - 1e-12 <= v0 <= 2.0 + 1e-12):
            raise UsageError(f"s0 and s0{'+' if side > 0 else '-'}delta must lie in [sqrt 2, 2]")
    try:
        rep = critical_orbit(s0, n_max=n_max)
    except BitBudgetError:
        # exact denominators blow up without structure; decide in float arithmetic
        rep = critical_orbit(v0, n_max=n_max)
    r0 = rasterize(restricted_tent(v0), resolution, N, threads=threads)
    out = ScanReport(s0, rep.describe(), [float(d) for d in deltas], [], side, resolution=resolution,
                     horizon=N)
    b = _rect_point(rep) if rep.verdict != "undecided" else None
    if b is not None:
        out.rect_b, out.rect_eps = b, eps
        out.rect_cells_s0 = rectangle_cells(r0, eps, b)
    for d in deltas:
        if float(d) == 0:
            r1 = r0
        else:
            r1 = rasterize(restricted_tent(v0 + side * float(d)), resolution, N, threads=threads)
        out.distances.append(hausdorff_distance(r0, r1))
        if b is not None:
            out.rect_cells.append(rectangle_cells(r1, eps, b))
    return out


def transitive_window():
    return SQRT2, 2.0
