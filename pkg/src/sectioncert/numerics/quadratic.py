"""Exact arithmetic in real quadratic fields Q(sqrt(D)).

Two representations are used:

* :class:`QuadraticSurd` is the classical ``(P + sqrt(D)) / Q`` form with
  ``Q | D - P^2``. It is what the continued-fraction recurrence consumes and
  what users type on the command line.
* :class:`QuadraticNumber` is a general field element ``a + b*sqrt(D)`` with
  rational ``a`` and ``b``. Distances such as ``|(2k-1)*gamma - m|`` live here.

Every comparison is decided with integer arithmetic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


class SurdError(ValueError):
    """Base class for malformed surd input."""


class PerfectSquareD(SurdError):
    """The radicand is a perfect square, so the value is rational."""

    def __init__(self, value: Fraction):
        super().__init__(f"radicand is a perfect square; value {value} is rational")
        self.value = value


class ZeroQ(SurdError):
    """The denominator of a surd is zero."""


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _floor_fraction(x: Fraction) -> int:
    return x.numerator // x.denominator


def sign_of(a: Rational, b: Rational, D: int) -> int:
    """Sign of ``a + b*sqrt(D)`` computed exactly."""
    sa = _sign(a)
    sb = _sign(b) if D > 0 else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    c = a * a - b * b * D
    if c > 0:
        return sa
    if c < 0:
        return sb
    return 0


def sign_of_two_radicals(a: Rational, b: Rational, D1: int, c: Rational, D2: int) -> int:
    """Sign of ``a + b*sqrt(D1) + c*sqrt(D2)`` computed exactly."""
    sx = sign_of(a, b, D1)
    sy = _sign(c) if D2 > 0 else 0
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    # |X| against |Y| with X = a + b sqrt(D1), Y = c sqrt(D2)
    s2 = sign_of(a * a + b * b * D1 - c * c * D2, 2 * a * b, D1)
    if s2 > 0:
        return sx
    if s2 < 0:
        return sy
    return 0


def floor_of(a: Rational, b: Rational, D: int) -> int:
    """``floor(a + b*sqrt(D))`` computed exactly."""
    a = Fraction(a)
    b = Fraction(b)
    if b == 0 or D == 0:
        return _floor_fraction(a)
    d = math.lcm(a.denominator, b.denominator)
    n = a.numerator * (d // a.denominator)
    m = b.numerator * (d // b.denominator)
    M = m * m * D
    r = math.isqrt(M)
    if r * r == M:
        return (n + (r if m > 0 else -r)) // d
    if m > 0:
        return (n + r) // d
    return (n - r - 1) // d


@dataclass(frozen=True, eq=False)
class QuadraticNumber:
    """The number ``a + b*sqrt(D)``; ``D`` is a non-square or ``b == 0``."""

    a: Fraction
    b: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.D < 0:
            raise ValueError("negative radicand")
        if self.b != 0 and is_square(self.D):
            r = math.isqrt(self.D)
            object.__setattr__(self, "a", self.a + self.b * r)
            object.__setattr__(self, "b", Fraction(0))
        if self.b == 0:
            object.__setattr__(self, "D", 0)

    @classmethod
    def rational(cls, x: Rational) -> "QuadraticNumber":
        return cls(Fraction(x), Fraction(0), 0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            other_q = other
        elif isinstance(other, QuadraticSurd):
            other_q = other.to_number()
        elif isinstance(other, (int, Fraction)):
            return QuadraticNumber.rational(other)
        else:
            return NotImplemented
        if other_q.D and self.D and other_q.D != self.D:
            raise ValueError(f"mixed radicands {self.D} and {other_q.D}")
        return other_q

    def _radicand(self, other: "QuadraticNumber") -> int:
        return self.D or other.D

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticNumber(self.a - o.a, self.b - o.b, self._radicand(o))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self._radicand(o)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conjugate()
        return QuadraticNumber(num.a / n, num.b / n, num.D)

    def __rtruediv__(self, other):
        return QuadraticNumber.rational(other).__truediv__(self)

    def sign(self) -> int:
        return sign_of(self.a, self.b, self.D)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def floor(self) -> int:
        return floor_of(self.a, self.b, self.D)

    def __floor__(self) -> int:
        return self.floor()

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __eq__(self, other):
        try:
            return compare(self, other) == 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def to_surd(self) -> "QuadraticSurd":
        """Rewrite as ``(P + sqrt(D')) / Q``; requires an irrational value."""
        if self.b == 0:
            raise PerfectSquareD(self.a)
        d = math.lcm(self.a.denominator, self.b.denominator)
        n = self.a.numerator * (d // self.a.denominator)
        m = self.b.numerator * (d // self.b.denominator)
        # n + m sqrt(D) over d; a negative m moves into the sign of Q
        if m < 0:
            n, m, d = -n, -m, -d
        return surd_normalize(n, m * m * self.D, d)

    def __repr__(self):
        return f"QuadraticNumber({self.a} + {self.b}*sqrt({self.D}))"


@dataclass(frozen=True, eq=False)
class QuadraticSurd:
    """The irrational number ``(P + sqrt(D)) / Q`` with ``Q | D - P^2``.

    Construct instances with :func:`surd_normalize`; the dataclass
    constructor does not validate.
    """

    P: int
    D: int
    Q: int

    def to_number(self) -> QuadraticNumber:
        return QuadraticNumber(Fraction(self.P, self.Q), Fraction(1, self.Q), self.D)

    def floor(self) -> int:
        return floor_of(Fraction(self.P, self.Q), Fraction(1, self.Q), self.D)

    def __float__(self) -> float:
        return (self.P + math.sqrt(self.D)) / self.Q

    def __eq__(self, other):
        try:
            return compare(self, other) == 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.P, self.D, self.Q))

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __str__(self):
        return f"({self.P}+sqrt({self.D}))/{self.Q}"


def surd_normalize(P: int, D: int, Q: int) -> QuadraticSurd:
    """Return the canonical surd for ``(P + sqrt(D)) / Q``.

    When ``Q`` does not divide ``D - P^2`` the representation is rescaled to
    ``(P|Q| + sqrt(D Q^2)) / (Q|Q|)``, which leaves the value unchanged.

    Raises:
        ZeroQ: if ``Q == 0``.
        PerfectSquareD: if ``D`` is a perfect square (the value is rational).
        SurdError: if ``D < 0``.
    """
    P, D, Q = int(P), int(D), int(Q)
    if Q == 0:
        raise ZeroQ("surd denominator must be non-zero")
    if D < 0:
        raise SurdError("surd radicand must be non-negative")
    if is_square(D):
        raise PerfectSquareD(Fraction(P + math.isqrt(D), Q))
    if (D - P * P) % Q != 0:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    return QuadraticSurd(P, D, Q)


def surd_or_rational(P: int, D: int, Q: int) -> QuadraticSurd | Fraction:
    """Like :func:`surd_normalize` but demotes perfect-square radicands."""
    try:
        return surd_normalize(P, D, Q)
    except PerfectSquareD as exc:
        return exc.value


def _as_triple(x) -> tuple[Fraction, Fraction, int]:
    if isinstance(x, QuadraticSurd):
        return Fraction(x.P, x.Q), Fraction(1, x.Q), x.D
    if isinstance(x, QuadraticNumber):
        return x.a, x.b, x.D
    if isinstance(x, (int, Fraction)):
        return Fraction(x), Fraction(0), 0
    raise TypeError(f"cannot compare {type(x).__name__} exactly")


def compare(x, y) -> int:
    """Exact three-way comparison of rationals and quadratic numbers.

    Returns -1, 0 or 1. Operands may live in different quadratic fields.
    """
    a1, b1, D1 = _as_triple(x)
    a2, b2, D2 = _as_triple(y)
    if D1 == 0 or D2 == 0 or D1 == D2:
        D = D1 or D2
        b = (b1 if D1 else 0) - (b2 if D2 else 0)
        return sign_of(a1 - a2, b, D)
    return sign_of_two_radicals(a1 - a2, b1, D1, -b2, D2)


def surd_compare(x, y) -> int:
    """Exact ordering of two surds or rationals (-1 less, 0 equal, 1 greater)."""
    return compare(x, y)
