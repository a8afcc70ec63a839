import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from holescope import restricted_tent
from holescope.bifset import ACCUMULATED_FROM_BELOW, ISOLATED_FROM_BELOW, classify_step, stair_of_orbit
from holescope.errors import BitBudgetError, DerivativeUndefinedError, UsageError
from holescope.orbits import PeriodicOrbit
from holescope.tentlab import (SQRT2, continuity_scan, critical_orbit, critical_point, dds_iterate_zero,
                               find_J_parameter, growth_bound_holds, rectangle_cells, sign_law_holds, tent,
                               x_s)

GOLD = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def witness():
    return find_J_parameter(SQRT2, 2, 30)


def test_critical_orbit_s2():
    rep = critical_orbit(2)
    assert rep.c_s == F(1, 2)
    assert rep.orbit_prefix[:4] == [F(1, 2), 1, 0, 0]
    assert (rep.verdict, rep.tail, rep.period) == ("preperiodic", 2, 1)
    assert rep.n0c is None


def test_critical_orbit_golden_float():
    rep = critical_orbit(GOLD)
    assert rep.verdict == "periodic" and rep.period == 3 and rep.n0c == 1
    assert rep.tolerance == 1e-10


def test_three_halves_is_not_periodic_critical():
    """At s = 3/2: c = 1/3 and T(0) = 1/2, so T(0) != c; the exact orbit of c
    has growing dyadic denominators and runs into the bit budget."""
    s = F(3, 2)
    assert critical_point(s) == F(1, 3)
    assert tent(s, F(0)) == F(1, 2)
    with pytest.raises(BitBudgetError):
        critical_orbit(s)
    assert critical_orbit(1.5).verdict == "undecided"
    # orbit of 0 at 3/2: 0 -> 1/2 -> 3/4 -> 3/8 -> ..., never hits {0, 1/2, 1} as a cycle
    orb = [F(0)]
    for _ in range(8):
        orb.append(tent(s, orb[-1]))
    assert orb[:4] == [0, F(1, 2), F(3, 4), F(3, 8)]


def test_T0_equals_c_only_at_golden():
    ss = np.linspace(1.0001, 2.0, 200001)
    g = (2 - ss) - (1 - 1 / ss)
    roots = ss[:-1][np.sign(g[:-1]) != np.sign(g[1:])]
    assert len(roots) == 1 and abs(roots[0] - GOLD) < 1e-4


def test_critical_orbit_errors():
    with pytest.raises(UsageError):
        critical_orbit(F(5, 2))
    with pytest.raises(UsageError):
        critical_orbit(1)


def test_dds_case2_exact():
    for s in (F(3, 2), F(7, 4), F(19, 10), F(29, 20), F(2)):
        assert abs(dds_iterate_zero(s, 2).value) == 2 * s - 1


def test_dds_case3_closed_form():
    hits = 0
    for q in range(11, 60):
        for p in range(q + 1, 2 * q):
            s = F(p, q)
            if not (1 < s < F(3, 2)):
                continue
            c = critical_point(s)
            orb = [F(0)]
            for _ in range(4):
                orb.append(tent(s, orb[-1]))
            if not all(c < x <= 1 for x in orb[1:4]):
                continue
            hits += 1
            assert orb[4] == s ** 4 - s ** 3 - s ** 2 + s
            assert dds_iterate_zero(s, 4).value == 4 * s ** 3 - 3 * s ** 2 - 2 * s + 1
    assert hits > 20


def test_dds_case1_sign():
    # d/ds (T_s(0) - c_s) = -1 - 1/s^2 < 0
    for s in (F(7, 5), F(8, 5), F(2)):
        v = dds_iterate_zero(s, 1).value - 1 / s ** 2
        assert v == -1 - 1 / s ** 2 and v < 0


def test_dds_undefined_at_critical_hit():
    with pytest.raises(DerivativeUndefinedError) as e:
        dds_iterate_zero(GOLD, 3)
    assert e.value.step == 1
    dds_iterate_zero(GOLD, 1)


def test_dds_central_difference_small_sample():
    rng = np.random.default_rng(1)
    for _ in range(20):
        s, n = rng.uniform(1.45, 1.99), int(rng.integers(1, 9))
        h = 1e-6
        try:
            pd = dds_iterate_zero(s, n)
        except DerivativeUndefinedError:
            continue
        fd = (_it(s + h, n) - _it(s - h, n)) / (2 * h)
        assert abs(pd.value - fd) < 1e-4


def _it(s, n):
    x = 0.0
    for _ in range(n):
        x = tent(s, x)
    return x


def test_x_s():
    for s in (F(3, 2), F(13, 10), F(199, 100), F(2), F(41, 40)):
        x = x_s(s)
        assert tent(s, tent(s, x)) == critical_point(s)


def test_growth_bound_along_histories():
    for s in (F(3, 2), F(17, 10), F(19, 10)):
        pd = dds_iterate_zero(s, 12)
        assert growth_bound_holds(pd)


def test_sign_law_golden():
    assert sign_law_holds(GOLD, 1)
    assert dds_iterate_zero(GOLD, 1).x_derivative == pytest.approx(GOLD)


def test_find_J_witness(witness):
    assert witness is not None
    assert 1.72 < witness.s_float < 1.73 and witness.period == 5
    assert witness.step.classification == ACCUMULATED_FROM_BELOW
    with mpmath.workdps(witness.dps):
        rep = critical_orbit(witness.s, n_max=100, tol=mpmath.mpf(10) ** -30)
        assert rep.verdict == "periodic" and rep.period == 5
        assert sign_law_holds(witness.s, rep.n0c)
        assert growth_bound_holds(dds_iterate_zero(witness.s, rep.n0c))


def test_witness_other_step_isolated_from_below(witness):
    f = restricted_tent(witness.s)
    st = stair_of_orbit(f, witness.orbit)
    kinds = sorted(classify_step(f, s).classification for s in st.steps)
    assert kinds == [ACCUMULATED_FROM_BELOW, ISOLATED_FROM_BELOW]


def test_find_J_empty_and_bad_window():
    assert find_J_parameter(1.8, 1.8, 20) is None
    with pytest.raises(UsageError):
        find_J_parameter(1.2, 1.5, 10)
    with pytest.raises(UsageError):
        find_J_parameter(1.5, 1.9, 10, method="bisect")


def test_find_J_rational_budget_is_fruitless():
    # c_s is never periodic for non-integer rational s, so the rational search fails
    assert find_J_parameter(1.5, 1.9, 30, method="rational", denom_budget=40) is None


def test_three_halves_zero_not_periodic():
    f = restricted_tent(F(3, 2))
    with pytest.raises(UsageError):
        PeriodicOrbit.from_point(f, F(0), max_period=60)


def test_scan_delta_zero_and_window():
    rep = continuity_scan(1.9, [0.0], resolution=64, N=200)
    assert rep.distances == [0.0] and rep.verdict == "undecided"
    assert rep.rect_b is None
    with pytest.raises(UsageError):
        continuity_scan(1.42, [0.01], resolution=64, N=100)
    with pytest.raises(UsageError):
        continuity_scan(1.995, [0.01], resolution=64, N=100, side=+1)


def test_scan_rectangle_at_2():
    rep = continuity_scan(2, [0.0, 1e-2], resolution=128, N=500)
    assert rep.rect_b == 0.5 and rep.rect_cells_s0 > 0
    assert rep.rect_cells[0] == rep.rect_cells_s0 and rep.rect_cells[1] == 0
    assert rep.to_csv().splitlines()[0] == "s0,verdict,delta,s,hausdorff,rect_in_set_cells"
