"""Continued fractions: exact expansion of quadratic surds, streaming
expansion of refinable enclosures, convergent tables and the parity
structure of the denominators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence, Union

from .numerics.interval import RigorousInterval
from .numerics.precision import PrecisionExhausted, PrecisionPolicy
from .numerics.quadratic import QuadraticNumber, QuadraticSurd, compare
from .verdict import Verdict

Enclosure = Callable[[int], RigorousInterval]


class PeriodTooLong(RuntimeError):
    """The preperiod plus period exceeds the expansion budget."""


# tail descriptors


@dataclass(frozen=True)
class Periodic:
    preperiod_len: int
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be non-empty")


@dataclass(frozen=True)
class BoundedBy:
    """Every coefficient beyond the stored ones is at most ``M``."""

    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("bound must be at least 1")


@dataclass(frozen=True)
class PolynomialSquare:
    """``a_j <= j**2`` for every ``j >= start``."""

    start: int = 4


@dataclass(frozen=True)
class UnknownTail:
    depth: int


TailDescriptor = Union[Periodic, BoundedBy, PolynomialSquare, UnknownTail]


@dataclass(frozen=True)
class ContinuedFraction:
    """Coefficients ``a_0, a_1, ...`` plus a description of what follows.

    For a :class:`Periodic` tail, ``coefficients`` holds the preperiod
    followed by one copy of the period and :meth:`digit` works for every
    index. Otherwise only the stored coefficients are known exactly.
    """

    coefficients: tuple[int, ...]
    tail: TailDescriptor

    def __post_init__(self):
        for j, a in enumerate(self.coefficients):
            if j >= 1 and a < 1:
                raise ValueError(f"coefficient a_{j} = {a} must be positive")
        if isinstance(self.tail, Periodic):
            n = self.tail.preperiod_len + len(self.tail.period)
            if tuple(self.coefficients[self.tail.preperiod_len : n]) != self.tail.period:
                raise ValueError("coefficients do not match the periodic tail")

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.tail, Periodic)

    @property
    def preperiod(self) -> tuple[int, ...]:
        if not self.is_periodic:
            raise AttributeError("only periodic expansions have a preperiod")
        return self.coefficients[: self.tail.preperiod_len]

    @property
    def period(self) -> tuple[int, ...]:
        if not self.is_periodic:
            raise AttributeError("only periodic expansions have a period")
        return self.tail.period

    @property
    def known_depth(self) -> int | None:
        """Number of exactly known coefficients (None means all of them)."""
        return None if self.is_periodic else len(self.coefficients)

    def digit(self, j: int) -> int:
        if j < 0:
            raise IndexError(j)
        if isinstance(self.tail, Periodic):
            pre = self.tail.preperiod_len
            if j < pre:
                return self.coefficients[j]
            return self.tail.period[(j - pre) % len(self.tail.period)]
        return self.coefficients[j]

    def digits(self, n: int) -> list[int]:
        return [self.digit(j) for j in range(n)]

    def has_digit(self, j: int) -> bool:
        return self.is_periodic or j < len(self.coefficients)

    def tail_values_from(self, j: int) -> set[int] | None:
        """Exact set of coefficient values at indices ``>= j`` (periodic only)."""
        if not isinstance(self.tail, Periodic):
            return None
        pre = self.tail.preperiod_len
        values = set(self.tail.period)
        values.update(self.coefficients[j:pre])
        return values

    def tail_max_from(self, j: int) -> int | None:
        values = self.tail_values_from(j)
        return max(values) if values else None


# exact expansion


def _surd_floor(P: int, D: int, Q: int, r: int) -> int:
    # r = isqrt(D), D non-square
    if Q > 0:
        return (P + r) // Q
    return (P + r + 1) // Q


def cf_expand_surd(s: QuadraticSurd, max_terms: int = 1_000_000) -> ContinuedFraction:
    """Exact eventually periodic expansion of a quadratic surd.

    Uses the integer recurrence ``a = floor((P + sqrt D)/Q)``,
    ``P' = aQ - P``, ``Q' = (D - P'^2)/Q`` and detects the period by the
    first repeated state ``(P, Q)``. Periods grow roughly like ``sqrt(D)``;
    more than ``max_terms`` digits raises PeriodTooLong.
    """
    P, D, Q = s.P, s.D, s.Q
    if (D - P * P) % Q:
        raise ValueError("surd is not normalized; use surd_normalize")
    r = math.isqrt(D)
    seen: dict[tuple[int, int], int] = {}
    digits: list[int] = []
    while (P, Q) not in seen:
        if len(digits) >= max_terms:
            raise PeriodTooLong(f"no period within {max_terms} digits")
        seen[(P, Q)] = len(digits)
        a = _surd_floor(P, D, Q, r)
        digits.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    return ContinuedFraction(tuple(digits), Periodic(start, tuple(digits[start:])))


def _mobius_of(coeffs: Sequence[int], y):
    """[c_0, ..., c_{n-1}, y] for a field element y."""
    p_prev, p = 1, coeffs[0] if coeffs else 0
    q_prev, q = 0, 1
    if not coeffs:
        return y
    for c in coeffs[1:]:
        p_prev, p = p, c * p + p_prev
        q_prev, q = q, c * q + q_prev
    return (y * p + p_prev) / (y * q + q_prev)


def periodic_value(preperiod: Sequence[int], period: Sequence[int]) -> QuadraticNumber:
    """Exact value of ``[preperiod; period, period, ...]``.

    The purely periodic part ``y`` solves ``y = [period, y]``, a quadratic
    whose positive root is taken. Requires every period digit to be >= 1.
    """
    if not period or min(period) < 1:
        raise ValueError("period digits must be positive")
    p_prev, p = 1, period[0]
    q_prev, q = 0, 1
    for c in period[1:]:
        p_prev, p = p, c * p + p_prev
        q_prev, q = q, c * q + q_prev
    # y = (p y + p_prev) / (q y + q_prev)  =>  q y^2 + (q_prev - p) y - p_prev = 0
    b = q_prev - p
    disc = b * b + 4 * q * p_prev
    y = QuadraticNumber(Fraction(-b, 2 * q), Fraction(1, 2 * q), disc)
    if not preperiod:
        return y
    return _mobius_of(list(preperiod), y)


def surd_from_cf(preperiod: Sequence[int], period: Sequence[int]) -> QuadraticSurd:
    return periodic_value(preperiod, period).to_surd()


# streaming expansion


def _digits_from_bounds(lo: Fraction, hi: Fraction, limit: int) -> tuple[list[int], str]:
    """Coefficients shared by every real number in ``[lo, hi]``.

    Returns the digits and a status: ``"terminated"`` when the enclosure is a
    single rational point whose expansion ended, ``"ambiguous"`` when the
    next coefficient is not determined, ``"limit"`` otherwise.
    """
    digits: list[int] = []
    while len(digits) < limit:
        a = lo.numerator // lo.denominator
        b = hi.numerator // hi.denominator
        if a != b:
            return digits, "ambiguous"
        digits.append(a)
        if lo == hi:
            if lo == a:
                return digits, "terminated"
            lo = hi = 1 / (lo - a)
            continue
        if lo == a:
            return digits, "ambiguous"
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return digits, "limit"


@dataclass
class StreamExpansion:
    digits: list[int]
    rational: bool = False
    exhausted: bool = False
    precision: int = 0

    def as_continued_fraction(self) -> ContinuedFraction:
        return ContinuedFraction(tuple(self.digits), UnknownTail(len(self.digits)))


def iter_cf_stream(
    enclosure: Enclosure, policy: PrecisionPolicy = PrecisionPolicy()
) -> Iterator[int]:
    """Yield the coefficients of the number enclosed by ``enclosure(prec)``.

    A coefficient is emitted only once the current enclosure determines it.
    The generator returns normally when the enclosure is an exact rational
    whose expansion terminates, and raises :class:`PrecisionExhausted` when
    the next coefficient stays undetermined at the precision cap.
    """
    emitted = 0
    for prec in policy.ladder():
        box = enclosure(prec)
        digits, status = _digits_from_bounds(box.lo_fraction(), box.hi_fraction(), 1 << 30)
        for d in digits[emitted:]:
            yield d
        emitted = max(emitted, len(digits))
        if status == "terminated":
            return
    raise PrecisionExhausted(f"coefficient a_{emitted} undetermined at the precision cap")


def cf_expand_stream(
    enclosure: Enclosure,
    max_digits: int,
    policy: PrecisionPolicy = PrecisionPolicy(),
) -> StreamExpansion:
    """Collect up to ``max_digits`` certified coefficients from an enclosure."""
    out = StreamExpansion(digits=[])
    for prec in policy.ladder():
        box = enclosure(prec)
        out.precision = prec
        digits, status = _digits_from_bounds(box.lo_fraction(), box.hi_fraction(), max_digits)
        if len(digits) > len(out.digits):
            if digits[: len(out.digits)] != out.digits:
                raise AssertionError("refined enclosure contradicts earlier digits")
            out.digits = digits
        if status == "terminated":
            out.rational = True
            return out
        if len(out.digits) >= max_digits:
            return out
    out.exhausted = True
    return out


# convergents


@dataclass(frozen=True)
class ConvergentRow:
    j: int
    p: int
    q: int
    q_tilde: int | None


@dataclass(frozen=True)
class ConvergentTable:
    rows: tuple[ConvergentRow, ...]
    # the convention p_{-1} = 1, q_{-1} = 0
    p_minus1: int = 1
    q_minus1: int = 0

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, j: int) -> ConvergentRow:
        if j < 0:
            raise IndexError(j)
        return self.rows[j]

    def q(self, j: int) -> int:
        return self.q_minus1 if j == -1 else self.rows[j].q

    def p(self, j: int) -> int:
        return self.p_minus1 if j == -1 else self.rows[j].p

    def q_tilde(self, j: int) -> int:
        t = self.rows[j].q_tilde
        if t is None:
            raise ValueError(f"q_{j} = {self.rows[j].q} is even; q~_{j} undefined")
        return t


def convergents(cf: ContinuedFraction, n: int) -> ConvergentTable:
    """Rows ``j = 0..n`` of ``p_j, q_j`` and ``q~_j = (q_j + 1)/2`` for odd ``q_j``."""
    if not cf.has_digit(n):
        raise IndexError(f"only {len(cf.coefficients)} coefficients are known")
    rows = []
    p_prev, q_prev = 1, 0
    p, q = cf.digit(0), 1
    rows.append(ConvergentRow(0, p, q, (q + 1) // 2 if q % 2 else None))
    for j in range(1, n + 1):
        a = cf.digit(j)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        rows.append(ConvergentRow(j, p, q, (q + 1) // 2 if q % 2 else None))
    return ConvergentTable(tuple(rows))


# parity structure


@dataclass
class ParityReport:
    verdict: Verdict
    reasons: list[str] = field(default_factory=list)
    self_check: bool = True


def parity_check(cf: ContinuedFraction, self_check_depth: int = 64) -> ParityReport:
    """Check ``a_0 = 0, a_1 = 2``, ``a_3`` odd and ``a_j`` even for ``j >= 4``.

    Under these premises every ``q_j`` with ``j >= 2`` is odd; that is
    re-verified on the computed convergents as a self-check.
    """
    if not cf.has_digit(3):
        return ParityReport(Verdict.UNKNOWN, ["fewer than four coefficients known"])
    reasons = []
    a = cf.digits(4)
    if a[0] != 0:
        reasons.append(f"a_0 = {a[0]} != 0")
    if a[1] != 2:
        reasons.append(f"a_1 = {a[1]} != 2")
    if a[3] % 2 == 0:
        reasons.append(f"a_3 = {a[3]} is even")
    if cf.is_periodic:
        odd_tail = sorted(v for v in cf.tail_values_from(4) if v % 2)
        if odd_tail:
            reasons.append(f"odd coefficients {odd_tail} occur at indices >= 4")
        complete = True
    else:
        odd = [j for j, v in enumerate(cf.coefficients) if j >= 4 and v % 2]
        if odd:
            reasons.append(f"a_{odd[0]} = {cf.coefficients[odd[0]]} is odd")
        complete = False
    if reasons:
        return ParityReport(Verdict.FALSE, reasons)
    depth = self_check_depth if cf.is_periodic else len(cf.coefficients) - 1
    table = convergents(cf, depth)
    ok = all(row.q % 2 == 1 for row in table.rows[2:])
    if not ok:
        raise AssertionError("parity premises hold but some q_j is even")
    if not complete:
        return ParityReport(
            Verdict.UNKNOWN, [f"premises hold up to depth {len(cf.coefficients)}; tail unknown"], ok
        )
    return ParityReport(Verdict.TRUE, [], ok)


# Diophantine sanity checks


@dataclass
class DiophantineReport:
    two_sided_failures: list[int] = field(default_factory=list)
    growth_failures: list[int] = field(default_factory=list)
    best_approx_failures: list[tuple[int, int]] = field(default_factory=list)
    checked_to: int = 0

    @property
    def ok(self) -> bool:
        return not (self.two_sided_failures or self.growth_failures or self.best_approx_failures)


def _dist_exact(gamma: QuadraticSurd, q: int, p: int) -> QuadraticNumber:
    return abs(gamma.to_number() * q - p)


def diophantine_bounds_check(
    cf: ContinuedFraction,
    table: ConvergentTable,
    gamma: QuadraticSurd,
    best_approx_to: int | None = None,
) -> DiophantineReport:
    """Exact check of three classical convergent inequalities.

    For every ``k`` in the table (the last row only serves as ``q_{k+1}``):

    * ``1/(q_k (a_{k+1} + 2)) < |gamma q_k - p_k| < 1/q_{k+1}``;
    * ``q_j >= 2^((j-1)/2)`` for ``j >= 2``;
    * ``|q gamma - p| >= |q_k gamma - p_k|`` for all ``q <= q_k`` (brute
      force up to row ``best_approx_to``).

    These are theorems, so any failure points at a bug upstream.
    """
    report = DiophantineReport()
    n = len(table) - 1
    report.checked_to = n
    for k in range(n):
        row = table[k]
        d = _dist_exact(gamma, row.q, row.p)
        lower = Fraction(1, row.q * (cf.digit(k + 1) + 2))
        upper = Fraction(1, table[k + 1].q)
        if not (compare(lower, d) < 0 and compare(d, upper) < 0):
            report.two_sided_failures.append(k)
    for j in range(2, n + 1):
        # q_j >= 2^((j-1)/2)  <=>  q_j^2 >= 2^(j-1)
        if table[j].q ** 2 < 2 ** (j - 1):
            report.growth_failures.append(j)
    last = n if best_approx_to is None else min(best_approx_to, n)
    targets = {table[k].q: k for k in range(last + 1)}
    best = None
    g = gamma.to_number()
    for q in range(1, table[last].q + 1):
        prod = g * q
        m = (prod + Fraction(1, 2)).floor()
        d = abs(prod - m)
        if q in targets:
            k = targets[q]
            dk = _dist_exact(gamma, table[k].q, table[k].p)
            if best is not None and compare(best, dk) < 0:
                report.best_approx_failures.append((k, q))
            if compare(d, dk) < 0:
                report.best_approx_failures.append((k, q))
        if best is None or compare(d, best) < 0:
            best = d
    return report


def cf_text(cf: ContinuedFraction, n: int) -> str:
    body = ", ".join(str(a) for a in cf.digits(n))
    return f"[{body}, ...]"
