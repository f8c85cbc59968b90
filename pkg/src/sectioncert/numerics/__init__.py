"""Exact quadratic-field arithmetic and outward-rounded intervals."""

from .interval import (
    DomainViolation,
    PoleInEnclosure,
    RigorousInterval,
    atan,
    cos,
    interval_const_pi,
    interval_fn,
    interval_of_number,
    interval_of_surd,
    sin,
    sqrt,
    tan,
    to_decimal_str,
)
from .quadratic import (
    PerfectSquareD,
    QuadraticNumber,
    QuadraticSurd,
    SurdError,
    ZeroQ,
    compare,
    surd_compare,
    surd_normalize,
    surd_or_rational,
)
from .precision import PrecisionExhausted, PrecisionPolicy

__all__ = [
    "DomainViolation",
    "PerfectSquareD",
    "PoleInEnclosure",
    "PrecisionExhausted",
    "PrecisionPolicy",
    "QuadraticNumber",
    "QuadraticSurd",
    "RigorousInterval",
    "SurdError",
    "ZeroQ",
    "atan",
    "compare",
    "cos",
    "interval_const_pi",
    "interval_fn",
    "interval_of_number",
    "interval_of_surd",
    "sin",
    "sqrt",
    "surd_compare",
    "surd_normalize",
    "surd_or_rational",
    "tan",
    "to_decimal_str",
]
