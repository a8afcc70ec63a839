"""Acceptance criteria, one test per criterion (item 4 is split into its parts).

Each test logs a PASS/FAIL line; the lines are repeated in the terminal
summary.  Criteria that cannot hold in this setting are marked xfail(strict)
so that they keep asserting the original target.
"""
import math
import os
import time
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from holescope import doubling, full_tent, restricted_tent
from holescope.bifset import (ACCUMULATED_FROM_BELOW, PASS, classify_step, exact_anchor, probe_step_scales,
                              raster_step_neighborhood_probe, rasterize, stair_of_orbit, stairs_from_orbits,
                              structure_checks)
from holescope.errors import DerivativeUndefinedError
from holescope.orbits import entropy_estimate, fixed_points_of_power, periodic_orbits
from holescope.phase import Hole, Space
from holescope.survival import escape_rate, surviving_set
from holescope.tentlab import (SQRT2, continuity_scan, critical_orbit, critical_point, dds_iterate_zero,
                               find_J_parameter, tent)

# frozen after the first run (resolution 512, N = 2000, s0 = 2, delta = 1e-2, 1e-3, 1e-4)
S2_DISTANCES = [0.103515625, 0.1015625, 0.1015625]
S2_THRESHOLD = 0.05
CONTROL_S0 = 1.9


@pytest.fixture(scope="module")
def r512():
    return rasterize(doubling(), 512, 1000)


@pytest.fixture(scope="module")
def checks(r512):
    return structure_checks(doubling(), r512, 5)


@pytest.fixture(scope="module")
def witness():
    return find_J_parameter(SQRT2, 2, 30)


# -- 1 ---------------------------------------------------------------------------
def test_1_periodic_counts_and_entropy(record):
    f = doubling()
    t0 = time.perf_counter()
    counts = [len(fixed_points_of_power(f, n)) for n in range(1, 13)]
    dt = time.perf_counter() - t0
    est = entropy_estimate(f, 12)
    ok = counts == [2 ** n - 1 for n in range(1, 13)] and dt < 5 and abs(est.reported - math.log(2)) < 0.02
    record("1", ok, f"counts exact, {dt:.2f}s, entropy {est.reported:.5f} vs log2 {math.log(2):.5f}")
    assert ok


# -- 2 ---------------------------------------------------------------------------
def _mobius(n):
    res, k, m = 1, 2, n
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            res = -res
        k += 1
    return -res if m > 1 else res


def _necklaces(p):
    """Doubling orbits of exact period p: (1/p) sum_{d|p} mu(d) (2^(p/d) - 1)."""
    return sum(_mobius(d) * (2 ** (p // d) - 1) for d in range(1, p + 1) if p % d == 0) // p


def test_2_stair_correspondence(record):
    f = doubling()
    orbs = periodic_orbits(f, 5)
    stairs = stairs_from_orbits(f, 5, orbits=orbs)
    multi = [o for o in orbs if len(o.cycle) >= 2]
    by_len = {}
    for st in stairs:
        by_len[st.length] = by_len.get(st.length, 0) + 1
    oracle = {p: _necklaces(p) for p in range(2, 6)}
    anchors = all(exact_anchor(f, s, horizon=10_000) for st in stairs for s in st.steps)
    ok = len(stairs) == len(multi) and by_len == oracle == {2: 1, 3: 2, 4: 3, 5: 6} and anchors
    record("2", ok, f"stairs by length {dict(sorted(by_len.items()))}, necklace oracle {oracle}, "
                    f"exact anchors at 10^4: {anchors}")
    assert ok


# -- 3 ---------------------------------------------------------------------------
def test_3_escape_rate(record, r512):
    f = doubling()
    ser = escape_rate(f, Hole(F(1, 2), F(1), Space.CIRCLE), range(21))
    exact = ser.measures == [F(1, 2 ** (n + 1)) for n in range(21)]
    err = abs(ser.fitted_rate - math.log(2))
    # two holes on one straight path of out-of-set cells (same complementary component)
    h1, h2 = (F(1, 4), F(3, 4)), (F(9, 32), F(23, 32))
    path = [r512.cell_of(float(h1[0] + t * (h2[0] - h1[0])), float(h1[1] + t * (h2[1] - h1[1])))
            for t in np.linspace(0, 1, 200)]
    gap = all(not r512.in_set[c] and not r512.excluded[c] for c in path)
    hz = range(0, 41)
    r1 = escape_rate(f, Hole(*h1, Space.CIRCLE), hz).fitted_rate
    r2 = escape_rate(f, Hole(*h2, Space.CIRCLE), hz).fitted_rate
    ok = exact and err < 1e-9 and gap and abs(r1 - r2) < 1e-6
    record("3", ok, f"exact measures {exact}, |rate-log2|={err:.1e}, same gap {gap}, "
                    f"rates {r1:.12f} / {r2:.12f}")
    assert ok


# -- 4 ---------------------------------------------------------------------------
def test_4a_third_cell(record, r512):
    ok = bool(r512.in_set[r512.cell_of(1 / 3, 2 / 3)])
    record("4a", ok, "cell of (1/3, 2/3) in set")
    assert ok


@pytest.mark.xfail(strict=True, reason="the cell-level set is dense at 1/512 near the diagonal; see ledger")
def test_4b_no_full_block(record, checks):
    it = checks["1"]
    ok = it["verdict"] == PASS
    record("4b", ok, f"full 3x3 blocks {it['full_3x3_blocks']}, in-set fraction {it['in_set_fraction']:.3f}")
    assert ok


def test_4c_runs_reach_diagonal(record, checks):
    it = checks["2"]
    ok = it["verdict"] == PASS
    record("4c", ok, f"cells without a run to the band: {it['cells_without_run']}")
    assert ok


def test_4d_symmetry(record, checks):
    it = checks["symmetry"]
    ok = it["verdict"] == PASS
    record("4d", ok, f"symmetry defects beyond one cell: {it['defects']}")
    assert ok


def test_4e_runtime_single_thread(record):
    rasterize(doubling(), 32, 10, threads=1)   # compile outside the timing
    t0 = time.perf_counter()
    rasterize(doubling(), 512, 1000, threads=1)
    dt = time.perf_counter() - t0
    ok = dt < 60
    record("4e", ok, f"512^2 at N=1000 in {dt:.2f}s on one thread")
    assert ok


def test_4f_thread_speedup(record):
    cpus = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    if cpus < 8:
        record("4f", None, f"not measurable: {cpus} CPU(s) available, 8 needed")
        pytest.skip(f"speedup to 8 threads needs 8 CPUs, found {cpus}")
    f = doubling()
    rasterize(f, 32, 10)
    times = {}
    for t in (1, 8):
        t0 = time.perf_counter()
        rasterize(f, 512, 1000, threads=t)
        times[t] = time.perf_counter() - t0
    speedup = times[1] / times[8]
    ok = speedup >= 6
    record("4f", ok, f"speedup {speedup:.2f}x at 8 threads")
    assert ok


# -- 5 ---------------------------------------------------------------------------
def test_5_derivative_recursion(record):
    rng = np.random.default_rng(0)
    h = mpmath.mpf("1e-6")
    C = 1e4
    worst, k = 0.0, 0
    with mpmath.workdps(50):
        while k < 100:
            s = mpmath.mpf(rng.uniform(SQRT2, 1.999))
            n = int(rng.integers(1, 9))
            try:
                pd = dds_iterate_zero(s, n)
                hi, lo = dds_iterate_zero(s + h, n), dds_iterate_zero(s - h, n)
            except DerivativeUndefinedError:
                continue
            if hi.branch_history != pd.branch_history or lo.branch_history != pd.branch_history:
                continue   # c_s crossed inside [s-h, s+h]: not a valid pair
            k += 1

            def it(t):
                x = 0 * t
                for _ in range(n):
                    x = tent(t, x)
                return x

            fd = (it(s + h) - it(s - h)) / (2 * h)
            worst = max(worst, float(abs(pd.value - fd) / h ** 2))
    case2 = all(abs(dds_iterate_zero(s, 2).value) == 2 * s - 1 for s in (F(3, 2), F(8, 5), F(7, 4), F(2)))
    s = F(13, 10)
    c = critical_point(s)
    orb = [F(0)]
    for _ in range(4):
        orb.append(tent(s, orb[-1]))
    valid = all(c < x <= 1 for x in orb[1:4])
    case3 = valid and orb[4] == s ** 4 - s ** 3 - s ** 2 + s and \
        dds_iterate_zero(s, 4).value == 4 * s ** 3 - 3 * s ** 2 - 2 * s + 1
    ok = worst <= C and case2 and case3
    record("5", ok, f"max |analytic - central diff| / h^2 = {worst:.1f} (C={C:g}, h=1e-6, 100 pairs); "
                    f"2s-1 law {case2}; T^4 closed form at s=13/10 {case3}")
    assert ok


# -- 6 ---------------------------------------------------------------------------
def test_6_tent_discontinuity(record):
    deltas = [1e-2, 1e-3, 1e-4]
    at2 = continuity_scan(2, deltas, resolution=512, N=2000)
    ctl = continuity_scan(CONTROL_S0, deltas, resolution=512, N=2000)
    above = min(at2.distances) > S2_THRESHOLD
    frozen = all(abs(d - e) <= 2 / 512 for d, e in zip(at2.distances, S2_DISTANCES))
    emptied = at2.rect_cells_s0 > 0 and all(c == 0 for c in at2.rect_cells)
    decreasing = ctl.verdict == "undecided" and all(
        b <= a for a, b in zip(ctl.distances, ctl.distances[1:])) and ctl.distances[-1] < ctl.distances[0]
    ok = above and frozen and emptied and decreasing
    record("6", ok, f"s0=2 distances {at2.distances} (> {S2_THRESHOLD}), rectangle cells "
                    f"{at2.rect_cells_s0} -> {at2.rect_cells}; control s0={CONTROL_S0} ({ctl.verdict}) "
                    f"{ctl.distances}")
    assert ok


# -- 7 ---------------------------------------------------------------------------
def test_7_step_classification(record, witness):
    bad, total = [], 0
    for f in (doubling(), full_tent()):
        for st in stairs_from_orbits(f, 5):
            for s in st.steps:
                agrees, _ = probe_step_scales(f, s, N=1000)
                total += 1
                if agrees is not True:
                    bad.append((f.label, s.classification, [str(v) for v in s.corner]))
    assert witness is not None
    f = restricted_tent(witness.s)
    r = rasterize(f, 1024, 2000)
    acc_ok, iso_ok = False, True
    for s in stair_of_orbit(f, witness.orbit).steps:
        c = classify_step(f, s)
        found = raster_step_neighborhood_probe(r, c, 8).found
        zoom, _ = probe_step_scales(f, c, N=2000)
        if c.classification == ACCUMULATED_FROM_BELOW:
            acc_ok = found and zoom
        else:
            iso_ok = iso_ok and zoom
    ok = not bad and acc_ok and iso_ok
    record("7", ok, f"{total - len(bad)}/{total} doubling+full-tent steps agree; witness "
                    f"s={float(witness.s):.12f} (period {witness.period}) accumulated step found below at "
                    f"1024: {acc_ok}; its other step empty below: {iso_ok}")
    assert ok, bad
