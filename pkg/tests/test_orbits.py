import math
from fractions import Fraction as F

import pytest

from holescope import restricted_tent
from holescope.errors import ResourceCapError, UsageError
from holescope.orbits import (NA, NEGATIVE, POSITIVE, PRESERVES, REVERSES, PeriodicOrbit, entropy_estimate,
                              fixed_points_of_power, orbits_to_csv, periodic_orbits)


def test_fixed_points_examples(dbl, tent2):
    assert fixed_points_of_power(dbl, 3) == [F(k, 7) for k in range(7)]
    assert fixed_points_of_power(dbl, 1) == [F(0)]
    assert fixed_points_of_power(tent2, 2) == [F(0), F(2, 5), F(2, 3), F(4, 5)]


@pytest.mark.parametrize("n", range(1, 9))
def test_fixed_points_are_fixed(dbl, tent2, n):
    for f in (dbl, tent2):
        for x in fixed_points_of_power(f, n):
            assert f.iterate(x, n) == x


def test_periodic_orbits_doubling(dbl):
    orbs = periodic_orbits(dbl, 3)
    assert [o.points for o in orbs] == [
        (F(0),), (F(1, 3), F(2, 3)), (F(1, 7), F(2, 7), F(4, 7)), (F(3, 7), F(5, 7), F(6, 7))]
    for o in orbs:
        assert set(o.orientation_at.values()) == {PRESERVES}
        assert not o.critical and o.hyperbolic


def test_restricted_tent_2_fixed_points():
    orbs = periodic_orbits(restricted_tent(2), 1)
    assert [o.points for o in orbs] == [(F(0),), (F(2, 3),)]
    zero = orbs[0]
    assert zero.orientation_at[F(0)] == PRESERVES and zero.multiplier == 2
    assert orbs[1].orientation_at[F(2, 3)] == REVERSES


def test_critical_orbit_signs(tent2):
    # at the golden parameter the critical orbit is c -> 1 -> 0 -> c
    s = (1 + math.sqrt(5)) / 2
    f = restricted_tent(s)
    o = PeriodicOrbit.from_point(f, 1 - 1 / s, 3)
    assert o.critical and o.minimal_period == 3
    assert set(o.orientation_at.values()) == {NA}
    # f^3 has a local min at c; 0 and 1 are one-sided
    zero, c, one = o.cycle
    assert (o.signs_at[zero], o.signs_at[c], o.signs_at[one]) == (POSITIVE, POSITIVE, NEGATIVE)


def test_from_point_rejects_non_periodic(dbl):
    with pytest.raises(UsageError):
        PeriodicOrbit.from_point(dbl, F(1, 3), 3)


def test_orbit_partition(tent2):
    p = 6
    orbs = periodic_orbits(tent2, p)
    pts = [x for o in orbs for x in o.cycle]
    assert len(pts) == len(set(pts))
    union = set()
    for n in range(1, p + 1):
        union |= set(fixed_points_of_power(tent2, n))
    assert set(pts) == union


def test_orientation_cycle_independent(tent2):
    for o in periodic_orbits(tent2, 5):
        if not o.critical:
            flags = {o.orientation_at[x] for x in o.cycle}
            assert len(flags) == 1


def test_entropy_examples(dbl, tent2):
    e = entropy_estimate(dbl, 12)
    assert [c for _, c in e.counts] == [2 ** n - 1 for n in range(1, 13)]
    assert abs(e.reported - math.log(2)) < 0.02
    e = entropy_estimate(tent2, 12)
    assert [c for _, c in e.counts] == [2 ** n for n in range(1, 13)]
    assert abs(e.reported - math.log(2)) < 0.02
    e = entropy_estimate(restricted_tent(F(3, 2)), 10)
    assert abs(e.reported - math.log(1.5)) < 0.05


def test_node_cap(dbl):
    with pytest.raises(ResourceCapError):
        fixed_points_of_power(dbl, 12, node_cap=100)


def test_float_map_rejected(dbl):
    with pytest.raises(UsageError):
        periodic_orbits(dbl.to_float(), 3)


def test_csv_export(dbl):
    text = orbits_to_csv(periodic_orbits(dbl, 2))
    lines = text.splitlines()
    assert lines[0] == "period,points,orientation,critical,signs"
    assert lines[2].startswith("2,1/3 2/3,preserves preserves,0")
