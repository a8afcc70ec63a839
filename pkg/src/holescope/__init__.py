"""Bifurcation sets of piecewise-linear maps with a hole."""
from .phase import Hole, Mode, Space, circle_dist, hole_contains, parse_scalar
from .intervals import IntervalSet
from .maps import PiecewiseLinearMap, builtin, doubling, full_tent, restricted_tent, two_block

__version__ = "0.1.0"
