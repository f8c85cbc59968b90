"""Membership certificates for the set of rigid section areas.

An area belongs to the set when its rotation number is irrational and
C(A, k) holds for every k >= 2. For quadratic-surd rotation numbers whose
coefficients have the right parity this reduces to finitely many checks:

* condition (a) closes the tail ``k >= q~_{j0}`` from a single inequality
  on the convergent denominators;
* condition (b) covers ``[q~_3, q~_{j0})`` with one inequality per ``j``;
* condition (c) covers ``[q~_2, q~_3 - 2]`` with one C check;
* every index left over is checked directly.

Which index was certified by which route is tracked with explicit range
algebra rather than assumed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Union

from . import __version__
from .cfrac import (
    BoundedBy,
    ContinuedFraction,
    ConvergentTable,
    PeriodTooLong,
    Periodic,
    PolynomialSquare,
    UnknownTail,
    cf_expand_stream,
    cf_expand_surd,
    convergents,
    parity_check,
)
from .numerics import interval as iv
from .numerics.interval import DomainViolation, RigorousInterval, interval_const_pi, to_decimal_str
from .numerics.precision import PrecisionPolicy
from .numerics.quadratic import QuadraticSurd, surd_normalize
from .rotation import (
    CheckResult,
    ConditionEvaluator,
    RotationNumber,
    area_exceeds_minimum,
    delta,
    gamma_enclosure_from_area,
)
from .verdict import Verdict, less_equal, strictly_less


class InputParse(ValueError):
    """The certification input could not be interpreted."""


class NotFoundWithinDepth(RuntimeError):
    """No admissible j0 exists among the searched convergents."""


class CrossoverNotFound(RuntimeError):
    """The exponential lower bound never overtakes the polynomial tail bound."""


@dataclass
class CertifyOptions:
    policy: PrecisionPolicy = field(default_factory=PrecisionPolicy)
    # "auto" (periodic for surds), "bounded:M" or "poly2"
    tail: str = "auto"
    depth: int = 1000
    j0_search_depth: int = 64
    direct_check_cap: int = 100_000
    # "auto" applies (b) and (c) only when more than reduction_threshold
    # indices would otherwise need direct checks
    reductions: str = "auto"
    reduction_threshold: int = 64
    cf_report_digits: int = 24

    def to_dict(self) -> dict[str, Any]:
        return {
            "prec": self.policy.start,
            "max_prec": self.policy.cap,
            "tail": self.tail,
            "depth": self.depth,
            "j0_search_depth": self.j0_search_depth,
            "direct_check_cap": self.direct_check_cap,
            "reductions": self.reductions,
            "reduction_threshold": self.reduction_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CertifyOptions":
        return cls(
            policy=PrecisionPolicy(int(d.get("prec", 128)), int(d.get("max_prec", 8192))),
            tail=d.get("tail", "auto"),
            depth=int(d.get("depth", 1000)),
            j0_search_depth=int(d.get("j0_search_depth", 64)),
            direct_check_cap=int(d.get("direct_check_cap", 100_000)),
            reductions=d.get("reductions", "auto"),
            reduction_threshold=int(d.get("reduction_threshold", 64)),
        )


@dataclass
class CheckRecord:
    kind: str
    indices: tuple[int, ...]
    lhs: Optional[RigorousInterval]
    rhs: Optional[RigorousInterval]
    verdict: Verdict
    precision: int
    note: str = ""

    @property
    def margin(self):
        if self.lhs is None or self.rhs is None:
            return None
        return (self.rhs - self.lhs).lo

    @classmethod
    def from_check(cls, res: CheckResult, kind: str | None = None) -> "CheckRecord":
        return cls(kind or res.kind, res.indices, res.lhs, res.rhs, res.verdict, res.precision, res.note)


@dataclass(frozen=True)
class CoverageRange:
    """Indices ``start..end`` inclusive; ``end=None`` means unbounded."""

    start: int
    end: Optional[int]
    source: str

    def __contains__(self, k: int) -> bool:
        return k >= self.start and (self.end is None or k <= self.end)


@dataclass(frozen=True)
class Outcome:
    status: str  # MemberOfA | NotCertified | DepthLimited | Undecidable
    reason: Optional[str] = None
    depth: Optional[int] = None

    def __str__(self):
        if self.status == "NotCertified":
            return f"NotCertified({self.reason})"
        if self.status == "DepthLimited":
            return f"DepthLimited({self.depth})"
        if self.status == "Undecidable" and self.reason:
            return f"Undecidable({self.reason})"
        return self.status


@dataclass
class Certificate:
    input: dict[str, Any]
    gamma: Optional[RigorousInterval] = None
    radius: Optional[RigorousInterval] = None
    area: Optional[RigorousInterval] = None
    cf: Optional[ContinuedFraction] = None
    convergent_table: Optional[ConvergentTable] = None
    parity: Verdict = Verdict.UNKNOWN
    j0: Optional[int] = None
    checks: list[CheckRecord] = field(default_factory=list)
    coverage: list[CoverageRange] = field(default_factory=list)
    outcome: Outcome = Outcome("Undecidable")
    notes: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def max_precision_bits(self) -> int:
        precs = [r.precision for r in self.checks]
        if self.gamma is not None:
            precs.append(self.gamma.precision)
        return max(precs) if precs else 0

    @property
    def direct_checks(self) -> list[int]:
        return [r.indices[0] for r in self.checks if r.kind == "direct_C"]

    def records(self, kind: str) -> list[CheckRecord]:
        return [r for r in self.checks if r.kind == kind]

    @property
    def is_member(self) -> bool:
        return self.outcome.status == "MemberOfA"

    def summary(self) -> str:
        lines = [f"input: {self.input.get('text', self.input)}", f"outcome: {self.outcome}"]
        if self.radius is not None:
            lines.append(f"R in [{to_decimal_str(self.radius.lo, 12, 'down')}, {to_decimal_str(self.radius.hi, 12, 'up')}]")
        if self.area is not None:
            lines.append(f"A in [{to_decimal_str(self.area.lo, 12, 'down')}, {to_decimal_str(self.area.hi, 12, 'up')}]")
        if self.cf is not None:
            if self.cf.is_periodic:
                lines.append(f"cf: preperiod {list(self.cf.preperiod)} period {list(self.cf.period)}")
            else:
                lines.append(f"cf: {list(self.cf.coefficients)} (tail unknown)")
        lines.append(f"parity: {self.parity.value}")
        if self.j0 is not None:
            lines.append(f"j0={self.j0}")
        for c in self.coverage:
            end = "inf" if c.end is None else c.end
            lines.append(f"  covered [{c.start}, {end}] by {c.source}")
        direct = self.direct_checks
        if direct:
            lines.append(f"direct checks k={_compress(direct)} ({len(direct)} checks)")
        rejected = [r.indices[0] for r in self.checks if r.kind == "cond_a" and r.verdict is not Verdict.TRUE]
        if rejected and self.j0 is not None:
            lines.append(f"j0 candidates rejected: j={_compress(rejected)}")
        failing = [r for r in self.checks if r.verdict is not Verdict.TRUE and r.kind != "cond_a"]
        for r in failing[:5]:
            lines.append(f"  {r.kind}{list(r.indices)}: {r.verdict.value} {r.note}".rstrip())
        lines.append(f"max precision: {self.max_precision_bits} bits, {self.elapsed:.2f}s")
        return "\n".join(lines)


def _compress(ks: list[int]) -> str:
    if not ks:
        return ""
    ks = sorted(ks)
    parts = []
    start = prev = ks[0]
    for k in ks[1:] + [None]:
        if k is not None and k == prev + 1:
            prev = k
            continue
        parts.append(str(start) if start == prev else f"{start}..{prev}")
        if k is not None:
            start = prev = k
    return ",".join(parts)


# range algebra


def uncovered(ranges: Iterable[CoverageRange], start: int = 2) -> Optional[list[int]]:
    """Indices ``>= start`` not covered by ``ranges``; None when infinitely many."""
    spans = sorted(((r.start, r.end) for r in ranges), key=lambda t: t[0])
    missing: list[int] = []
    k = start
    for lo, hi in spans:
        if hi is not None and hi < k:
            continue
        if lo > k:
            missing.extend(range(k, lo))
        if hi is None:
            return missing
        k = max(k, hi + 1)
    return None


def audit_coverage(cert: Certificate) -> bool:
    """Independent re-derivation that the certified ranges cover every k >= 2."""
    good = [c for c in cert.coverage]
    direct = {r.indices[0] for r in cert.checks if r.kind == "direct_C" and r.verdict is Verdict.TRUE}
    tail_starts = [c.start for c in good if c.end is None]
    if not tail_starts:
        return False
    horizon = min(tail_starts)
    for k in range(2, horizon):
        if k in direct:
            continue
        if not any(k in c for c in good):
            return False
    return True


# condition (a)


def _condition_a_lhs(rot: RotationNumber, qj, qj1, bound_plus_two, prec: int) -> RigorousInterval:
    """``pi (M + 2) / (cos(pi/q_j) sqrt(R^2 cos(pi/q_{j+1})^2 - 1))``.

    ``qj`` and ``qj1`` may be integers or interval lower bounds.
    """
    pi = interval_const_pi(prec)
    qj = qj if isinstance(qj, RigorousInterval) else RigorousInterval.point(qj, prec)
    qj1 = qj1 if isinstance(qj1, RigorousInterval) else RigorousInterval.point(qj1, prec)
    c0 = iv.cos(pi / qj)
    c1 = iv.cos(pi / qj1)
    if not c0.is_positive():
        raise DomainViolation("cos(pi/q_j) must be positive")
    inner = rot.radius_squared(prec) * c1.square() - 1
    if not inner.is_positive():
        raise DomainViolation("R^2 cos(pi/q_{j+1})^2 must exceed 1")
    return pi * bound_plus_two / (c0 * iv.sqrt(inner))


def _decide_le(lhs_fn, rhs, policy: PrecisionPolicy) -> tuple[Verdict, Optional[RigorousInterval], int, str]:
    last = (Verdict.UNKNOWN, None, policy.start, "")
    for prec in policy.ladder():
        try:
            lhs = lhs_fn(prec)
        except DomainViolation as exc:
            last = (Verdict.UNKNOWN, None, prec, f"domain edge: {exc}")
            continue
        v = less_equal(lhs, RigorousInterval.point(rhs, prec))
        last = (v, lhs, prec, "")
        if v is not Verdict.UNKNOWN:
            return last
    return last


def select_j0(
    rot: RotationNumber,
    cf: ContinuedFraction,
    table: ConvergentTable,
    policy: PrecisionPolicy,
    bound: Optional[int] = None,
    search_depth: int = 64,
) -> tuple[int, CheckRecord, list[CheckRecord]]:
    """Smallest ``j0 >= 3`` satisfying the first-j0 inequality.

    ``bound`` fixes ``M``; otherwise ``M = max_{j >= j0+2} a_j`` is read off
    the periodic expansion. Returns ``j0``, the witness record and the
    records of rejected candidates.
    """
    rejected = []
    for j0 in range(3, min(search_depth, len(table) - 2) + 1):
        M = bound if bound is not None else cf.tail_max_from(j0 + 2)
        if M is None:
            raise ValueError("tail bound unavailable; pass bound=")
        qj, qj1 = table.q(j0), table.q(j0 + 1)
        v, lhs, prec, note = _decide_le(lambda p: _condition_a_lhs(rot, qj, qj1, M + 2, p), qj, policy)
        rec = CheckRecord(
            "cond_a", (j0,), lhs, RigorousInterval.point(qj, prec), v, prec,
            note or f"M={M}, q_j0={qj}, q_j0+1={qj1}",
        )
        if v is Verdict.TRUE:
            return j0, rec, rejected
        rejected.append(rec)
    raise NotFoundWithinDepth(f"no j0 <= {search_depth} satisfies the first-j0 inequality")


def close_condition_a(table: ConvergentTable, j0: int, witness: CheckRecord) -> tuple[CheckRecord, CoverageRange]:
    """Tail closure: the lhs shrinks with ``j`` while ``q_j`` grows.

    For ``j >= j0`` the coefficient bound still applies and
    ``q_j >= q_{j0}``, ``q_{j+1} >= q_{j0+1}``, so the witness inequality at
    ``j0`` dominates every later one.
    """
    if witness.verdict is not Verdict.TRUE:
        raise ValueError("closure needs a certified witness")
    for j in range(j0, len(table) - 1):
        if table.q(j + 1) <= table.q(j):
            raise AssertionError("convergent denominators must increase")
    rec = CheckRecord(
        "cond_a_tail", (j0,), witness.lhs, witness.rhs, Verdict.TRUE, witness.precision,
        f"monotone closure for all j >= {j0}",
    )
    return rec, CoverageRange(table.q_tilde(j0), None, "cond_a")


def simple_condition_a(next_coeff: int, j: int, policy: PrecisionPolicy = PrecisionPolicy()) -> Verdict:
    """``pi (a_{j+2} + 2) <= 2^((j-1)/2)``, decided on squares."""
    for prec in policy.ladder():
        lhs = (interval_const_pi(prec) * (next_coeff + 2)).square()
        v = less_equal(lhs, RigorousInterval.point(2 ** (j - 1), prec))
        if v is not Verdict.UNKNOWN:
            return v
    return Verdict.UNKNOWN


def _pow2_half(e2: int, prec: int) -> RigorousInterval:
    """Enclosure of ``2^(e2/2)``."""
    if e2 % 2 == 0:
        return RigorousInterval.point(Fraction(2) ** (e2 // 2), prec)
    return iv.sqrt(RigorousInterval.point(Fraction(2) ** e2, prec))


def close_condition_a_polynomial(
    rot: RotationNumber,
    table: ConvergentTable,
    start: int = 4,
    policy: PrecisionPolicy = PrecisionPolicy(),
    max_crossover: int = 256,
) -> tuple[int, int, list[CheckRecord], CoverageRange]:
    """Condition (a) under ``a_j <= j^2`` for ``j >= start``.

    Beyond a crossover index ``J`` the inequality follows from
    ``q_j >= 2^((j-1)/2)``: the substituted left side decreases in ``j``
    while ``2^((j-1)/2) / ((j+2)^2 + 2)`` increases for ``j >= 3``. The
    indices ``j0 <= j < J`` are checked with the actual denominators.

    Returns ``(j0, J, records, coverage)``.
    """
    records: list[CheckRecord] = []
    crossover = None
    for J in range(4, max_crossover + 1):
        poly = (J + 2) ** 2 + 2

        def lhs(p, J=J, poly=poly):
            return _condition_a_lhs(rot, _pow2_half(J - 1, p), _pow2_half(J, p), poly, p) / _pow2_half(J - 1, p)

        v, box, prec, note = _decide_le(lhs, 1, policy)
        if v is Verdict.TRUE:
            crossover = J
            records.append(CheckRecord("cond_a_tail", (J,), box, RigorousInterval.point(1, prec), v, prec,
                                       "exponential lower bound dominates for j >= J"))
            break
    if crossover is None:
        raise CrossoverNotFound(f"no crossover below j = {max_crossover}")
    # 2^((j-1)/2)/((j+2)^2+2) increases iff sqrt(2)((j+2)^2+2) >= (j+3)^2+2,
    # a quadratic in j with positive leading term and vertex below 1
    prec = policy.start
    s2 = iv.sqrt(RigorousInterval.point(2, prec))
    J = crossover
    grow = s2 * ((J + 2) ** 2 + 2) - ((J + 3) ** 2 + 2)
    if not grow.is_positive():
        raise AssertionError("tail bound monotonicity fails at the crossover")
    lowest = max(3, start - 2)
    if len(table) <= J:
        raise IndexError("convergent table shorter than the crossover index")
    j0 = lowest
    for j in range(lowest, J):
        poly = (j + 2) ** 2 + 2
        qj, qj1 = table.q(j), table.q(j + 1)
        v, box, prec, note = _decide_le(lambda p: _condition_a_lhs(rot, qj, qj1, poly, p), qj, policy)
        records.append(CheckRecord("cond_a", (j,), box, RigorousInterval.point(qj, prec), v, prec, note))
        if v is not Verdict.TRUE:
            j0 = j + 1
    return j0, crossover, records, CoverageRange(table.q_tilde(j0), None, "cond_a")


# conditions (b) and (c)


def check_condition_b(
    evaluator: ConditionEvaluator, table: ConvergentTable, j0: int
) -> tuple[list[CheckRecord], Optional[CoverageRange]]:
    """For ``j = 4..j0``: max(F+(delta_{q~_{j-1}}, delta_{q~_{j-2}}), F-(delta_{q~_{j-1}})) < delta_{q~_j}."""
    if j0 < 4:
        return [], None
    rot = evaluator.rot
    records = []
    for j in range(4, j0 + 1):
        a = delta(rot, table.q_tilde(j - 1), evaluator.policy)
        b = delta(rot, table.q_tilde(j - 2), evaluator.policy)
        target = delta(rot, table.q_tilde(j), evaluator.policy)
        res = evaluator.pair_condition("cond_b", (j,), a, b, target)
        records.append(CheckRecord.from_check(res))
    if all(r.verdict is Verdict.TRUE for r in records):
        return records, CoverageRange(table.q_tilde(3), table.q_tilde(j0) - 1, "cond_b")
    return records, None


def check_condition_c(
    evaluator: ConditionEvaluator, table: ConvergentTable
) -> tuple[list[CheckRecord], Optional[CoverageRange]]:
    """C(A, q~_2 - 1) covers ``[q~_2, q~_3 - 2]`` when ``3 <= q~_2 <= q~_3 - 2``."""
    t2, t3 = table.q_tilde(2), table.q_tilde(3)
    if not (3 <= t2 <= t3 - 2):
        return [], None
    res = next(evaluator.check_range([t2 - 1]))
    rec = CheckRecord.from_check(res, "cond_c")
    if rec.verdict is Verdict.TRUE:
        return [rec], CoverageRange(t2 - 1, t3 - 2, "cond_c")
    return [rec], None


# entry points


def parse_tail(text: str):
    if text in ("auto", "periodic"):
        return None
    if text.startswith("bounded:"):
        try:
            return BoundedBy(int(text.split(":", 1)[1]))
        except ValueError as exc:
            raise InputParse(f"bad tail bound {text!r}") from exc
    if text == "poly2" or text.startswith("poly2:"):
        start = int(text.split(":", 1)[1]) if ":" in text else 4
        return PolynomialSquare(start)
    raise InputParse(f"unknown tail strategy {text!r}")


def _validate_tail(cf: ContinuedFraction, tail) -> None:
    if isinstance(tail, BoundedBy):
        # the bound is used for a_{j+2} with j >= 3
        top = cf.tail_max_from(5)
        if top is not None and top > tail.M:
            raise InputParse(f"expansion has tail coefficients above the asserted bound {tail.M}")
    elif isinstance(tail, PolynomialSquare):
        horizon = max(tail.start, len(cf.coefficients)) + len(cf.period) + 1
        for j in range(tail.start, horizon + 1):
            if cf.digit(j) > j * j:
                raise InputParse(f"a_{j} = {cf.digit(j)} exceeds j^2")


def _gamma_in_range(rot: RotationNumber, policy: PrecisionPolicy) -> Verdict:
    """``arctan(2)/pi < gamma < 1/2``."""
    for prec in policy.ladder():
        g = rot.gamma(prec)
        low = iv.atan(RigorousInterval.point(2, prec)) / interval_const_pi(prec)
        v = Verdict.all_of([strictly_less(low, g), strictly_less(g, RigorousInterval.point(Fraction(1, 2), prec))])
        if v is not Verdict.UNKNOWN:
            return v
    return Verdict.UNKNOWN


def _enclose_constants(cert: Certificate, rot: RotationNumber, prec: int) -> None:
    cert.gamma = rot.gamma(prec)
    try:
        cert.radius = rot.radius(prec)
        cert.area = rot.area(prec)
    except (DomainViolation, ZeroDivisionError):
        pass


def _run_direct(cert: Certificate, evaluator: ConditionEvaluator, ks: list[int]) -> Verdict:
    verdicts = []
    for res in evaluator.check_range(ks):
        cert.checks.append(CheckRecord.from_check(res))
        verdicts.append(res.verdict)
    return Verdict.all_of(verdicts) if verdicts else Verdict.TRUE


def certify_surd(s: QuadraticSurd, options: CertifyOptions | None = None, input_doc: dict | None = None) -> Certificate:
    options = options or CertifyOptions()
    policy = options.policy
    t0 = time.perf_counter()
    cert = Certificate(input=input_doc or surd_input_doc(s, options))
    rot = RotationNumber(s)
    _enclose_constants(cert, rot, policy.start)

    def done(outcome: Outcome) -> Certificate:
        cert.outcome = outcome
        cert.elapsed = time.perf_counter() - t0
        return cert

    in_range = _gamma_in_range(rot, policy)
    if in_range is Verdict.FALSE:
        return done(Outcome("NotCertified", "gamma outside (arctan(2)/pi, 1/2)"))
    if in_range is Verdict.UNKNOWN:
        return done(Outcome("Undecidable", "range check undecided"))

    try:
        cf = cf_expand_surd(s)
    except PeriodTooLong as exc:
        cert.notes.append(str(exc))
        return done(Outcome("Undecidable", "period too long"))
    cert.cf = cf
    depth = max(options.j0_search_depth + 2, 8)
    table = convergents(cf, depth)
    parity = parity_check(cf)
    cert.parity = parity.verdict
    if parity.verdict is not Verdict.TRUE:
        cert.notes.extend(parity.reasons)
        return done(Outcome("NotCertified", "parity"))
    cert.convergent_table = table

    tail = parse_tail(options.tail)
    if tail is not None:
        _validate_tail(cf, tail)
    try:
        if isinstance(tail, PolynomialSquare):
            j0, J, recs, cov_a = close_condition_a_polynomial(rot, table, tail.start, policy)
            cert.checks.extend(recs)
            cert.notes.append(f"polynomial tail: crossover at j={J}")
        else:
            bound = tail.M if isinstance(tail, BoundedBy) else None
            j0, witness, rejected = select_j0(rot, cf, table, policy, bound, options.j0_search_depth)
            cert.checks.extend(rejected)
            cert.checks.append(witness)
            closure, cov_a = close_condition_a(table, j0, witness)
            cert.checks.append(closure)
    except (NotFoundWithinDepth, CrossoverNotFound) as exc:
        cert.notes.append(str(exc))
        return done(Outcome("NotCertified", "condition (a) not established"))
    cert.j0 = j0
    cert.coverage.append(cov_a)

    evaluator = ConditionEvaluator(rot, policy)
    pending = uncovered(cert.coverage)
    use_reductions = options.reductions == "always" or (
        options.reductions == "auto" and len(pending) > options.reduction_threshold
    )
    if use_reductions:
        recs, cov = check_condition_b(evaluator, table, j0)
        cert.checks.extend(recs)
        if cov is not None:
            cert.coverage.append(cov)
        elif recs:
            cert.notes.append("condition (b) not certified; falling back to direct checks")
        recs, cov = check_condition_c(evaluator, table)
        cert.checks.extend(recs)
        if cov is not None:
            cert.coverage.append(cov)
        pending = uncovered(cert.coverage)

    if pending and pending[-1] > options.direct_check_cap:
        cert.notes.append(f"{len(pending)} uncovered indices up to {pending[-1]} exceed the direct-check cap")
        return done(Outcome("Undecidable", "direct-check cap exceeded"))
    v = _run_direct(cert, evaluator, pending)
    if v is Verdict.TRUE:
        if not audit_coverage(cert):
            raise AssertionError("coverage audit failed on a certified result")
        return done(Outcome("MemberOfA"))
    if v is Verdict.FALSE:
        k = next(r.indices[0] for r in cert.checks if r.kind == "direct_C" and r.verdict is Verdict.FALSE)
        return done(Outcome("NotCertified", f"C(A,{k}) fails"))
    return done(Outcome("Undecidable", "precision cap reached"))


def certify_area(A: Fraction, options: CertifyOptions | None = None, input_doc: dict | None = None) -> Certificate:
    """Depth-limited certification: checks C(A, k) for ``2 <= k <= depth``."""
    options = options or CertifyOptions()
    policy = options.policy
    t0 = time.perf_counter()
    A = Fraction(A)
    cert = Certificate(input=input_doc or area_input_doc(A, options))

    def done(outcome: Outcome) -> Certificate:
        cert.outcome = outcome
        cert.elapsed = time.perf_counter() - t0
        return cert

    big = area_exceeds_minimum(A, policy)
    if big is Verdict.FALSE:
        return done(Outcome("NotCertified", "area does not exceed 8*omega_3"))
    if big is Verdict.UNKNOWN:
        return done(Outcome("Undecidable", "area range undecided"))
    rot = RotationNumber(gamma_enclosure_from_area(A), area=A)
    _enclose_constants(cert, rot, policy.start)

    stream = cf_expand_stream(rot.gamma, options.cf_report_digits, policy)
    cert.cf = stream.as_continued_fraction()
    if len(stream.digits) >= 4:
        parity = parity_check(cert.cf)
        cert.parity = parity.verdict
        cert.notes.extend(parity.reasons)
    cert.notes.append("area input: tail of the expansion is unknown, membership is depth-limited")

    evaluator = ConditionEvaluator(rot, policy)
    verdicts = []
    for res in evaluator.check_range(range(2, options.depth + 1)):
        rec = CheckRecord.from_check(res)
        cert.checks.append(rec)
        verdicts.append(res.verdict)
        if res.verdict is Verdict.FALSE:
            return done(Outcome("NotCertified", f"C(A,{res.indices[0]}) fails"))
    v = Verdict.all_of(verdicts)
    if v is Verdict.TRUE:
        cert.coverage.append(CoverageRange(2, options.depth, "direct_C"))
        return done(Outcome("DepthLimited", depth=options.depth))
    return done(Outcome("Undecidable", "precision cap reached"))


def surd_input_doc(s: QuadraticSurd, options: CertifyOptions) -> dict[str, Any]:
    return {"kind": "surd", "P": s.P, "D": s.D, "Q": s.Q, "text": f"{s.P},{s.D},{s.Q}", "options": options.to_dict()}


def area_input_doc(A: Fraction, options: CertifyOptions, text: str | None = None) -> dict[str, Any]:
    return {
        "kind": "area",
        "numerator": A.numerator,
        "denominator": A.denominator,
        "text": text or str(A),
        "options": options.to_dict(),
    }


def certify(x: Union[QuadraticSurd, Fraction, int, str], options: CertifyOptions | None = None) -> Certificate:
    """Certify a rotation number (surd), or a rational rotation number (rejected).

    Strings are parsed as ``"P,D,Q"`` surds. Use :func:`certify_area` for
    section areas.
    """
    options = options or CertifyOptions()
    if isinstance(x, str):
        x = parse_surd(x)
    if isinstance(x, (int, Fraction)):
        cert = Certificate(input={"kind": "rational", "text": str(x), "options": options.to_dict()})
        cert.outcome = Outcome("NotCertified", "rational")
        cert.notes.append("rational rotation numbers are excluded")
        return cert
    if isinstance(x, QuadraticSurd):
        return certify_surd(x, options)
    raise InputParse(f"cannot certify {x!r}")


def parse_surd(text: str) -> QuadraticSurd:
    """Parse ``"P,D,Q"`` into a canonical surd (PerfectSquareD for rationals)."""
    try:
        P, D, Q = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise InputParse(f"expected P,D,Q integers, got {text!r}") from exc
    return surd_normalize(P, D, Q)


def parse_area(text: str) -> Fraction:
    """Exact rational value of a decimal string (no binary round trip)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputParse(f"bad area {text!r}") from exc


def replay(doc: dict[str, Any]) -> Certificate:
    """Re-run certification from a serialized certificate's input block."""
    inp = doc["input"]
    options = CertifyOptions.from_dict(inp.get("options", {}))
    if inp["kind"] == "surd":
        return certify_surd(surd_normalize(inp["P"], inp["D"], inp["Q"]), options, inp)
    if inp["kind"] == "area":
        return certify_area(Fraction(inp["numerator"], inp["denominator"]), options, inp)
    if inp["kind"] == "rational":
        return certify(Fraction(inp["text"]), options)
    raise InputParse(f"unknown input kind {inp['kind']!r}")


# serialization


DIGITS = 40


def _iv_json(box: Optional[RigorousInterval], with_prec: bool = False) -> Optional[dict[str, Any]]:
    if box is None:
        return None
    out = {"lo": to_decimal_str(box.lo, DIGITS, "down"), "hi": to_decimal_str(box.hi, DIGITS, "up")}
    if with_prec:
        out["prec"] = box.precision
    return out


def _cf_json(cf: Optional[ContinuedFraction]) -> Optional[dict[str, Any]]:
    if cf is None:
        return None
    if isinstance(cf.tail, Periodic):
        return {"preperiod": list(cf.preperiod), "period": list(cf.period), "tail": "periodic"}
    depth = cf.tail.depth if isinstance(cf.tail, UnknownTail) else len(cf.coefficients)
    return {"digits": list(cf.coefficients), "tail": f"unknown:{depth}"}


def certificate_to_json(cert: Certificate) -> dict[str, Any]:
    """Fixed-order JSON document; all reals as directed decimal strings."""
    checks = []
    for r in cert.checks:
        m = r.margin
        checks.append(
            {
                "kind": r.kind,
                "indices": list(r.indices),
                "lhs": _iv_json(r.lhs),
                "rhs": _iv_json(r.rhs),
                "margin": None if m is None else to_decimal_str(m, 12, "down"),
                "verdict": r.verdict.value,
                "precision": r.precision,
                **({"note": r.note} if r.note else {}),
            }
        )
    outcome = {"status": cert.outcome.status}
    if cert.outcome.reason is not None:
        outcome["reason"] = cert.outcome.reason
    if cert.outcome.depth is not None:
        outcome["depth"] = cert.outcome.depth
    return {
        "input": cert.input,
        "gamma": _iv_json(cert.gamma, with_prec=True),
        "radius": _iv_json(cert.radius),
        "area": _iv_json(cert.area),
        "cf": _cf_json(cert.cf),
        "parity": cert.parity.value,
        "j0": cert.j0,
        "checks": checks,
        "coverage": [{"from": c.start, "to": c.end, "source": c.source} for c in cert.coverage],
        "outcome": outcome,
        "max_precision_bits": cert.max_precision_bits,
        "tool_version": __version__,
    }


CERTIFICATE_KEYS = (
    "input", "gamma", "radius", "area", "cf", "parity", "j0", "checks",
    "coverage", "outcome", "max_precision_bits", "tool_version",
)
