"""Interval arithmetic with outward rounding.

Rounding strategy: every operation is evaluated in IEEE round-to-nearest,
then the lower endpoint is moved one representable double down and the
upper endpoint one up (``math.nextafter``).  Basic operations and ``sqrt``
are correctly rounded (error at most half an ulp), so the nudged interval
is a true enclosure.  ``atan``/``arccos`` are not taken from libm: they are
evaluated as interval Taylor series with an explicit truncation bound, so
their enclosures depend only on the basic operations.
"""

from __future__ import annotations

import contextvars
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

ROUNDING_MODE = ("round-to-nearest with one-ulp outward nudge per operation (math.nextafter); "
                 "atan/arccos by interval Taylor series with alternating-remainder bound")

_inflation = contextvars.ContextVar("interval_inflation", default=0.0)


class IntervalDomainError(ArithmeticError):
    pass


@contextmanager
def inflated(width: float):
    """Widen every operation's result by ``width`` on each side.

    Only ever makes enclosures larger, so it is a soundness stress test.
    """
    token = _inflation.set(float(width))
    try:
        yield
    finally:
        _inflation.reset(token)


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf) - _inflation.get()


def _up(x: float) -> float:
    return math.nextafter(x, math.inf) + _inflation.get()


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise IntervalDomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Rational):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    def __add__(self, other):
        o = _coerce(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = _coerce(other)
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(p)), _up(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise IntervalDomainError(f"division by an interval containing zero {o}")
        q = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(q)), _up(max(q)))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = exact(1)
        for _ in range(k):
            out = out * self
        if k % 2 == 0 and self.lo < 0.0 < self.hi:
            out = Interval(0.0, out.hi)
        return out

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def exact(q) -> Interval:
    """Enclosure of an exact rational (int, Fraction, or decimal string)."""
    if isinstance(q, Interval):
        return q
    if isinstance(q, str):
        q = Fraction(q)
    if isinstance(q, float):
        return Interval(q, q)
    q = Fraction(q)
    f = float(q)
    if Fraction(f) == q:
        return Interval(f, f)
    return Interval(_down(f), _up(f))


def _coerce(x) -> Interval:
    return x if isinstance(x, Interval) else exact(x)


def pi_enclosure() -> Interval:
    # math.pi is the correctly rounded double of pi
    return Interval(_down(math.pi), _up(math.pi))


def sqrt(x) -> Interval:
    x = _coerce(x)
    if x.lo < 0.0:
        raise IntervalDomainError(f"sqrt of an interval reaching below zero {x}")
    return Interval(max(0.0, _down(math.sqrt(x.lo))), _up(math.sqrt(x.hi)))


def hull(*xs: Interval) -> Interval:
    return Interval(min(x.lo for x in xs), max(x.hi for x in xs))


_HUGE = 1e8   # above this use pi/2 - atan(1/x); keeps z*z far from overflow


def _atan_small(z: Interval, terms: int = 14) -> Interval:
    """atan on an interval with |z| <= 0.2 by the alternating series."""
    zmax = max(abs(z.lo), abs(z.hi))
    if zmax > 0.2:
        raise IntervalDomainError("series argument not reduced")
    z2 = z * z
    total = exact(0)
    power = z
    for k in range(terms):
        term = power / (2 * k + 1)
        total = total + term if k % 2 == 0 else total - term
        power = power * z2
    # |remainder| <= first omitted term
    r = _up(zmax ** (2 * terms + 1) / (2 * terms + 1) * (1 + 1e-12))
    return total + Interval(-r, r)


def atan(x) -> Interval:
    """Monotone endpoint evaluation: atan([a, b]) = [atan(a), atan(b)]."""
    x = _coerce(x)
    return Interval(_atan_point(x.lo).lo, _atan_point(x.hi).hi)


def _atan_point(a: float) -> Interval:
    if a < 0.0:
        return -_atan_point(-a)
    x = Interval(a, a)
    if a >= _HUGE:
        return pi_enclosure() / 2 - _atan_small(1 / x)
    # atan(z) = 2 atan(z / (1 + sqrt(1 + z^2))); three halvings take any z >= 0
    # below tan(pi/16) < 0.2
    z = x
    for _ in range(3):
        z = z / (1 + sqrt(1 + z * z))
    return 8 * _atan_small(z)


def arccos(x) -> Interval:
    """Monotone endpoint evaluation: arccos([a, b]) = [arccos(b), arccos(a)]."""
    x = _coerce(x)
    if x.lo < -1.0 or x.hi > 1.0:
        raise IntervalDomainError(f"arccos of an interval leaving [-1, 1]: {x}")
    return Interval(_arccos_point(x.hi).lo, _arccos_point(x.lo).hi)


def _arccos_point(a: float) -> Interval:
    if a == -1.0:
        return pi_enclosure()
    if a == 1.0:
        return Interval(0.0, 0.0)
    p = exact(a)
    # arccos(a) = 2 atan(sqrt((1 - a) / (1 + a)))
    return 2 * atan(sqrt((1 - p) / (1 + p)))


def profile(area: Interval) -> Interval:
    """Isoperimetric profile sqrt(A (4 pi - A)) over intervals.

    The radicand is non-negative on the domain 0 <= A <= 4 pi, so a lower
    end pushed below zero by outward rounding is clamped.
    """
    r = area * (4 * pi_enclosure() - area)
    if r.hi < 0.0:
        raise IntervalDomainError(f"area outside [0, 4pi]: {area}")
    return sqrt(Interval(max(r.lo, 0.0), r.hi))
