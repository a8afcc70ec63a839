from fractions import Fraction as F

import pytest

from holescope.errors import BitBudgetError, UsageError
from holescope.intervals import IntervalSet
from holescope.phase import (Hole, Mode, Space, circle_dist, check_budget, format_scalar, hole_contains,
                             normalize, parse_scalar)

I, T = Space.INTERVAL, Space.CIRCLE


def test_interval_endpoint_not_contained():
    assert not hole_contains(Hole(0.3, 0.6, I), 0.3)
    assert hole_contains(Hole(0.3, 0.6, I), 0.45)


def test_wrapping_arc():
    h = Hole(0.8, 0.2, T)
    assert h.wraps
    assert hole_contains(h, 0.9)
    assert hole_contains(h, 0.1)
    assert not hole_contains(h, 0.5)


def test_exact_hole_and_lift():
    h = Hole(F(1, 2), F(1), T)
    assert h.b == 0 and h.wraps   # arc (1/2, 1) ends at 0 = 1
    assert hole_contains(h, F(3, 4))
    assert not hole_contains(h, F(1, 2))
    assert not hole_contains(h, F(0))


def test_mixed_space_is_usage_error():
    with pytest.raises(UsageError):
        hole_contains(Hole(0.3, 0.6, I), 0.4, space=T)


def test_invalid_holes():
    with pytest.raises(UsageError):
        Hole(0, F(1, 2), I)
    with pytest.raises(UsageError):
        Hole(F(1, 2), F(1, 3), I)
    with pytest.raises(UsageError):
        Hole(F(1, 3), F(4, 3), T)


def test_float_tie_toward_not_contained():
    h = Hole(0.3, 0.6, I)
    assert not hole_contains(h, 0.3 + 1e-14)
    assert not hole_contains(h, 0.6 - 1e-14)


def test_circle_dist_examples():
    assert circle_dist(0.1, 0.9) == pytest.approx(0.2)
    assert circle_dist(0.37, 0.37) == 0
    assert circle_dist(0.25, 0.5) == 0.25
    assert circle_dist(F(1, 10), F(9, 10)) == F(1, 5)


def test_parse_scalar():
    assert parse_scalar("0.3") == F(3, 10)
    assert parse_scalar("2/7") == F(2, 7)
    assert parse_scalar("2/7", Mode.FLOAT) == pytest.approx(2 / 7)
    with pytest.raises(UsageError):
        parse_scalar("x")
    with pytest.raises(UsageError):
        parse_scalar("")
    assert format_scalar(F(3, 4)) == "3/4"


def test_normalize_idempotent():
    for x in (F(5, 4), F(-1, 3), 2.75, -0.25):
        y = normalize(x, T)
        assert 0 <= y < 1
        assert normalize(y, T) == y


def test_bit_budget():
    check_budget(F(1, 2 ** 100))
    with pytest.raises(BitBudgetError):
        check_budget(F(1, 2 ** 5000))
    with pytest.raises(BitBudgetError):
        check_budget(F(1, 2 ** 70), budget=64)


def test_interval_set_algebra():
    a = IntervalSet([(F(0), F(1, 4)), (F(1, 2), F(3, 4))])
    b = IntervalSet([(F(1, 8), F(5, 8))])
    assert (a & b).to_pairs() == ["1/8,1/4", "1/2,5/8"]
    assert (a | b).to_pairs() == ["0,3/4"]
    assert a.measure == F(1, 2)
    assert (a & b).issubset(a)
    assert F(1, 4) in a and F(3, 8) not in a


def test_interval_set_circle_wrap():
    s = IntervalSet([(F(3, 4), F(1)), (F(0), F(1, 4))], T)
    assert s.measure == F(1, 2)
    assert F(0) in s and F(7, 8) in s and F(1, 2) not in s
    out = IntervalSet.outside_hole(Hole(F(1, 2), F(1), T))
    assert out.to_pairs() == ["0,1/2"]


def test_interval_set_adjacent_merge_and_points():
    s = IntervalSet([(F(0), F(1, 4)), (F(1, 4), F(1, 2)), (F(3, 4), F(3, 4))])
    assert len(s) == 2
    assert s.measure == F(1, 2)
    assert IntervalSet.from_pairs(s.to_pairs()) == s
