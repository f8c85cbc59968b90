"""Outward-rounded interval arithmetic at arbitrary binary precision.

Endpoints are raw mpmath mantissa/exponent tuples. Every lower endpoint is
produced with ``round_floor`` and every upper endpoint with ``round_ceiling``;
no epsilon inflation is used anywhere.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Callable, Union

from mpmath import mp, mpf
from mpmath.libmp import (
    fzero,
    from_int,
    from_man_exp,
    from_rational,
    libmpi,
    mpf_ge,
    mpf_gt,
    mpf_le,
    mpf_lt,
    mpf_neg,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_rational,
    to_str,
)

from .quadratic import QuadraticNumber, QuadraticSurd, floor_of

Number = Union[int, Fraction]


class DomainViolation(ValueError):
    """An interval argument leaves the real domain of a function."""


class PoleInEnclosure(DomainViolation):
    """The enclosure handed to ``tan`` contains an odd multiple of pi/2."""


def _mpf_to_fraction(v) -> Fraction:
    p, q = to_rational(v)
    return Fraction(int(p), int(q))


class RigorousInterval:
    """Closed interval ``[lo, hi]`` carried at ``precision`` bits."""

    __slots__ = ("_lo", "_hi", "precision")

    def __init__(self, lo, hi, precision: int):
        if mpf_gt(lo, hi):
            raise ValueError("interval with lo > hi")
        self._lo = lo
        self._hi = hi
        self.precision = precision

    # construction

    @classmethod
    def point(cls, x: Number, precision: int) -> "RigorousInterval":
        x = Fraction(x)
        if x.denominator == 1:
            lo = from_int(x.numerator, precision, round_floor)
            hi = from_int(x.numerator, precision, round_ceiling)
        else:
            lo = from_rational(x.numerator, x.denominator, precision, round_floor)
            hi = from_rational(x.numerator, x.denominator, precision, round_ceiling)
        return cls(lo, hi, precision)

    @classmethod
    def from_bounds(cls, lo: Number, hi: Number, precision: int) -> "RigorousInterval":
        return cls(cls.point(lo, precision)._lo, cls.point(hi, precision)._hi, precision)

    # accessors

    # make_mpf wraps the raw endpoint exactly; mpf() would round to the context precision
    @property
    def lo(self) -> mpf:
        return mp.make_mpf(self._lo)

    @property
    def hi(self) -> mpf:
        return mp.make_mpf(self._hi)

    @property
    def raw(self):
        return self._lo, self._hi

    def lo_fraction(self) -> Fraction:
        return _mpf_to_fraction(self._lo)

    def hi_fraction(self) -> Fraction:
        return _mpf_to_fraction(self._hi)

    def width(self) -> mpf:
        return mpf(mpf_sub(self._hi, self._lo, self.precision, round_ceiling))

    def mid(self) -> float:
        return float((mpf(self._lo) + mpf(self._hi)) / 2)

    def contains(self, x) -> bool:
        """Exact membership test for rationals, quadratic numbers and mpf values."""
        from .quadratic import compare

        if isinstance(x, RigorousInterval):
            return mpf_le(self._lo, x._lo) and mpf_ge(self._hi, x._hi)
        if isinstance(x, mpf):
            v = x._mpf_
            return mpf_le(self._lo, v) and mpf_ge(self._hi, v)
        if isinstance(x, float):
            x = Fraction(x)
        return compare(self.lo_fraction(), x) <= 0 <= compare(self.hi_fraction(), x)

    def overlaps(self, other: "RigorousInterval") -> bool:
        return not (mpf_lt(self._hi, other._lo) or mpf_lt(other._hi, self._lo))

    def strictly_below(self, other: "RigorousInterval") -> bool:
        return mpf_lt(self._hi, other._lo)

    def excludes_zero(self) -> bool:
        return mpf_gt(self._lo, fzero) or mpf_lt(self._hi, fzero)

    def is_positive(self) -> bool:
        return mpf_gt(self._lo, fzero)

    # arithmetic

    def _other(self, other) -> "RigorousInterval":
        if isinstance(other, RigorousInterval):
            return other
        if isinstance(other, (int, Fraction)):
            return RigorousInterval.point(other, self.precision)
        return NotImplemented

    def _prec(self, other: "RigorousInterval") -> int:
        return max(self.precision, other.precision)

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self._prec(o)
        return RigorousInterval(*libmpi.mpi_add(self.raw, o.raw, p), p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self._prec(o)
        return RigorousInterval(*libmpi.mpi_sub(self.raw, o.raw, p), p)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o.__sub__(self)

    def __neg__(self):
        return RigorousInterval(mpf_neg(self._hi), mpf_neg(self._lo), self.precision)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self._prec(o)
        return RigorousInterval(*libmpi.mpi_mul(self.raw, o.raw, p), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not o.excludes_zero():
            raise ZeroDivisionError("divisor enclosure contains zero")
        p = self._prec(o)
        return RigorousInterval(*libmpi.mpi_div(self.raw, o.raw, p), p)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o.__truediv__(self)

    def square(self) -> "RigorousInterval":
        return RigorousInterval(*libmpi.mpi_square(self.raw, self.precision), self.precision)

    def __abs__(self):
        return RigorousInterval(*libmpi.mpi_abs(self.raw, self.precision), self.precision)

    def __repr__(self):
        lo = to_str(self._lo, 20)
        hi = to_str(self._hi, 20)
        return f"RigorousInterval([{lo}, {hi}], prec={self.precision})"


@functools.lru_cache(maxsize=64)
def interval_const_pi(precision: int) -> RigorousInterval:
    """Enclosure of pi (cached per precision, read-only once built)."""
    return RigorousInterval(*libmpi.mpi_pi(precision), precision)


def sqrt(x: RigorousInterval, precision: int | None = None) -> RigorousInterval:
    p = precision or x.precision
    if mpf_lt(x._lo, fzero):
        raise DomainViolation("sqrt of an enclosure reaching below zero")
    return RigorousInterval(*libmpi.mpi_sqrt(x.raw, p), p)


def sin(x: RigorousInterval, precision: int | None = None) -> RigorousInterval:
    p = precision or x.precision
    return RigorousInterval(*libmpi.mpi_sin(x.raw, p), p)


def cos(x: RigorousInterval, precision: int | None = None) -> RigorousInterval:
    p = precision or x.precision
    return RigorousInterval(*libmpi.mpi_cos(x.raw, p), p)


def atan(x: RigorousInterval, precision: int | None = None) -> RigorousInterval:
    p = precision or x.precision
    return RigorousInterval(*libmpi.mpi_atan(x.raw, p), p)


def tan(x: RigorousInterval, precision: int | None = None) -> RigorousInterval:
    p = precision or x.precision
    c = cos(x, p + 20)
    if not c.excludes_zero():
        raise PoleInEnclosure("tan enclosure contains a pole")
    # cos keeps its sign on x, so x sits inside one branch of tan
    s = sin(x, p + 20)
    return RigorousInterval(*libmpi.mpi_div(s.raw, c.raw, p), p)


FUNCTIONS: dict[str, Callable[..., RigorousInterval]] = {
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "arctan": atan,
    "atan": atan,
}


def interval_fn(name: str, x: RigorousInterval, precision: int | None = None) -> RigorousInterval:
    """Evaluate one of sqrt, sin, cos, tan, arctan on an enclosure."""
    try:
        fn = FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown interval function {name!r}") from None
    return fn(x, precision)


def _exact_scaled_floor(x: QuadraticNumber, shift: int) -> int:
    """floor(x * 2**shift) exactly."""
    if shift >= 0:
        s = 1 << shift
        return floor_of(x.a * s, x.b * s, x.D)
    s = Fraction(1, 1 << -shift)
    return floor_of(x.a * s, x.b * s, x.D)


def interval_of_number(x, precision: int) -> RigorousInterval:
    """Tight enclosure of an exact rational, surd or quadratic number.

    The endpoints are ``floor(x 2^s) / 2^s`` and the next dyadic above, where
    ``s`` is chosen so that the enclosure carries ``precision`` significant
    bits. Both endpoints are exact binary numbers, so no rounding occurs.
    """
    if isinstance(x, (int, Fraction)):
        return RigorousInterval.point(x, precision)
    if isinstance(x, QuadraticSurd):
        x = x.to_number()
    if x.is_rational:
        return RigorousInterval.point(x.a, precision)
    approx = abs(float(x))
    if approx == 0.0 or not math.isfinite(approx):
        exponent = 0
    else:
        exponent = math.frexp(approx)[1]
    shift = precision - exponent + 2
    n = _exact_scaled_floor(x, shift)
    lo = from_man_exp(n, -shift)
    hi = from_man_exp(n + 1, -shift)
    return RigorousInterval(lo, hi, precision)


def interval_of_surd(s: QuadraticSurd, precision: int) -> RigorousInterval:
    return interval_of_number(s, precision)


def to_decimal_str(v, digits: int, direction: str) -> str:
    """Render an mpf endpoint in decimal, rounded ``down`` or ``up``.

    The rendering is itself directed, so a lower endpoint printed this way is
    still a valid lower bound.
    """
    if isinstance(v, mpf):
        v = v._mpf_
    q = _mpf_to_fraction(v)
    if q == 0:
        return "0"
    neg = q < 0
    aq = -q if neg else q
    e = math.floor(math.log10(aq.numerator) - math.log10(aq.denominator))
    scale = digits - 1 - e
    scaled = aq * Fraction(10) ** scale
    # toward -inf for "down", toward +inf for "up"
    want_floor = (direction == "down") != neg
    n = scaled.numerator // scaled.denominator
    if not want_floor and n * scaled.denominator != scaled.numerator:
        n += 1
    s = str(n)
    # place the decimal point: value = n * 10^-scale
    if scale <= 0:
        body = s + "0" * (-scale)
    elif len(s) > scale:
        body = s[: len(s) - scale] + "." + s[len(s) - scale :]
    else:
        body = "0." + "0" * (scale - len(s)) + s
    if "." in body:
        body = body.rstrip("0").rstrip(".")
    return ("-" if neg else "") + body


__all__ = [
    "DomainViolation",
    "PoleInEnclosure",
    "RigorousInterval",
    "interval_const_pi",
    "interval_fn",
    "interval_of_number",
    "interval_of_surd",
    "sqrt",
    "sin",
    "cos",
    "tan",
    "atan",
    "to_decimal_str",
]
