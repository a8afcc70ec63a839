"""Phase-space arithmetic on [0,1] and on the circle R/Z.

Scalars are plain Python numbers.  ``Fraction`` (and ``int``) values are
exact; ``float`` and ``mpmath.mpf`` values are approximate and compared with a
tolerance.  Exact values are never rounded.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from . import config
from .errors import BitBudgetError, UsageError


class Space(enum.Enum):
    INTERVAL = "interval"
    CIRCLE = "circle"

    @property
    def boundary(self):
        """The boundary set of the phase space: {0, 1} on [0,1], empty on the circle."""
        return (Fraction(0), Fraction(1)) if self is Space.INTERVAL else ()

    @classmethod
    def parse(cls, text):
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise UsageError(f"unknown space {text!r} (expected 'interval' or 'circle')") from None


class Mode(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def mode_of(*xs) -> Mode:
    return Mode.EXACT if all(is_exact(x) for x in xs) else Mode.FLOAT


def parse_scalar(text, mode=Mode.EXACT):
    """Parse ``"p/q"`` or a decimal string.

    In exact mode decimals are read exactly, so ``"0.3"`` becomes 3/10.
    """
    if isinstance(text, (int, float, Fraction)) and not isinstance(text, bool):
        return Fraction(text) if mode is Mode.EXACT else float(text)
    s = str(text).strip()
    if not s:
        raise UsageError("empty scalar")
    try:
        if mode is Mode.EXACT:
            return Fraction(s)
        if "/" in s:
            num, den = s.split("/")
            return float(int(num)) / float(int(den))
        return float(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse scalar {text!r}") from None


def format_scalar(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def check_budget(x, budget=None):
    """Raise BitBudgetError if an exact value has grown past the bit budget."""
    if isinstance(x, Fraction):
        limit = config.get("bit_budget", budget)
        if x.numerator.bit_length() > limit or x.denominator.bit_length() > limit:
            raise BitBudgetError(
                f"exact value needs more than {limit} bits "
                f"(denominator has {x.denominator.bit_length()})")
    return x


def frac_part(x):
    """x mod 1 for any scalar type, returned in [0,1)."""
    if isinstance(x, Fraction):
        return x - (x.numerator // x.denominator)
    if isinstance(x, int):
        return Fraction(0)
    y = x - math.floor(x)
    return y if y < 1 else y - 1


def normalize(x, space: Space):
    """Circle values go to [0,1); interval values are returned unchanged."""
    return frac_part(x) if space is Space.CIRCLE else x


def approx_equal(x, y, tol=None) -> bool:
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(x - y) <= config.get("eps_tol", tol)


def to_float(x) -> float:
    return float(x)


def circle_dist(x, y):
    d = abs(frac_part(x) - frac_part(y))
    return min(d, 1 - d)


@dataclass(frozen=True)
class Hole:
    """Open hole from a to b.

    On the interval this is (a,b) with 0 < a < b < 1.  On the circle it is the
    positively oriented open arc from a to b; a > b means the arc wraps
    through 0.  Endpoints are stored normalized to [0,1).
    """
    a: object
    b: object
    space: Space

    def __post_init__(self):
        a, b = self.a, self.b
        if self.space is Space.INTERVAL:
            if not (0 < a < b < 1):
                raise UsageError(f"interval hole needs 0 < a < b < 1, got ({a}, {b})")
        else:
            a, b = frac_part(a), frac_part(b)
            if a == b:
                raise UsageError("circle hole needs a != b")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def wraps(self) -> bool:
        return self.space is Space.CIRCLE and self.a > self.b

    @property
    def length(self):
        if self.wraps:
            return 1 - self.a + self.b
        return self.b - self.a

    def __contains__(self, x):
        return hole_contains(self, x)

    def __str__(self):
        return f"({format_scalar(self.a)}, {format_scalar(self.b)})"


def hole_contains(h: Hole, x, space: Space | None = None, tol=None) -> bool:
    """True iff x lies strictly inside the open hole.

    Float inputs break ties toward "not contained": a point within the
    tolerance of an endpoint is treated as the endpoint.
    """
    if space is not None and space is not h.space:
        raise UsageError(f"point in {space.value} tested against a {h.space.value} hole")
    if h.space is Space.CIRCLE:
        x = frac_part(x)
    a, b = h.a, h.b
    if not (is_exact(x) and is_exact(a) and is_exact(b)):
        eps = config.get("eps_tol", tol)
        if abs(x - a) <= eps or abs(x - b) <= eps:
            return False
        if h.space is Space.CIRCLE and (abs(x - a) >= 1 - eps or abs(x - b) >= 1 - eps):
            return False
    if h.wraps:
        return x > a or x < b
    return a < x < b
