"""The rotation number of a tangent-section area and the condition C(A, k).

A section area ``A`` determines the radius ``R`` of the candidate ball by
``A = omega_3 (R^2 - 1)^(3/2)`` and the rotation number
``gamma = arctan(sqrt(R^2 - 1)) / pi``. The tangent-chord map on the circle
of radius ``R`` advances by ``2 pi gamma``; its orbit angles relative to the
axis are ``delta_k = pi * dist((2k - 1) gamma, Z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Union

from mpmath.libmp import mpf_nthroot, round_ceiling, round_floor

from .numerics import interval as iv
from .numerics.interval import DomainViolation, RigorousInterval, interval_const_pi, interval_of_number
from .numerics.precision import PrecisionExhausted, PrecisionPolicy
from .numerics.quadratic import QuadraticNumber, QuadraticSurd, compare
from .verdict import Verdict, strictly_less

Enclosure = Callable[[int], RigorousInterval]

DEFAULT_POLICY = PrecisionPolicy()


class AreaTooSmall(ValueError):
    """The area does not exceed 8 * omega_3."""


class RationalGamma(ValueError):
    """A rational rotation number reached a certification entry point."""


class AmbiguousOrder(RuntimeError):
    """Two orbit angles could not be ordered within the precision cap."""


def omega3(prec: int) -> RigorousInterval:
    return interval_const_pi(prec) * Fraction(4, 3)


def _cbrt(x: RigorousInterval) -> RigorousInterval:
    lo, hi = x.raw
    p = x.precision
    return RigorousInterval(mpf_nthroot(lo, 3, p, round_floor), mpf_nthroot(hi, 3, p, round_ceiling), p)


def gamma_enclosure_from_area(A: Fraction) -> Enclosure:
    """``prec -> enclosure of arctan((A/omega_3)^(1/3)) / pi``; no range check."""
    A = Fraction(A)
    if A <= 0:
        raise AreaTooSmall("area must be positive")

    def enclosure(prec: int) -> RigorousInterval:
        wp = prec + 16
        pi = interval_const_pi(wp)
        t = _cbrt(RigorousInterval.point(A, wp) / omega3(wp))
        return iv.atan(t) / pi

    return enclosure


def area_exceeds_minimum(A: Fraction, policy: PrecisionPolicy = DEFAULT_POLICY) -> Verdict:
    """Decide ``A > 8 omega_3`` by interval separation."""
    for prec in policy.ladder():
        v = strictly_less(omega3(prec) * 8, RigorousInterval.point(A, prec))
        if v is not Verdict.UNKNOWN:
            return v
    return Verdict.UNKNOWN


def gamma_from_area(A: Fraction, policy: PrecisionPolicy = DEFAULT_POLICY) -> "RotationNumber":
    """Rotation number of area ``A`` as a refinable enclosure.

    Raises:
        AreaTooSmall: when ``A <= 8 omega_3`` is certified.
        PrecisionExhausted: when the comparison cannot be decided.
    """
    v = area_exceeds_minimum(A, policy)
    if v is Verdict.FALSE:
        raise AreaTooSmall(f"area {A} does not exceed 8*omega_3")
    if v is Verdict.UNKNOWN:
        raise PrecisionExhausted("cannot decide whether the area exceeds 8*omega_3")
    return RotationNumber(gamma_enclosure_from_area(A), area=Fraction(A))


class RotationNumber:
    """A rotation number given exactly (surd or rational) or by enclosures.

    Derived quantities are computed at any requested precision and cached
    per precision.
    """

    def __init__(
        self,
        gamma: Union[QuadraticSurd, QuadraticNumber, Fraction, int, Enclosure],
        *,
        area: Fraction | None = None,
        allow_rational: bool = False,
    ):
        self.area_input = area
        self._cache: dict[tuple[str, int], RigorousInterval] = {}
        if isinstance(gamma, QuadraticSurd):
            self.surd: QuadraticSurd | None = gamma
            self.exact: QuadraticNumber | Fraction | None = gamma.to_number()
            self._enclosure = None
        elif isinstance(gamma, QuadraticNumber):
            self.surd = gamma.to_surd() if not gamma.is_rational else None
            self.exact = gamma if not gamma.is_rational else gamma.a
            self._enclosure = None
        elif isinstance(gamma, (int, Fraction)):
            if not allow_rational:
                raise RationalGamma(f"rotation number {gamma} is rational")
            self.surd = None
            self.exact = Fraction(gamma)
            self._enclosure = None
        elif callable(gamma):
            self.surd = None
            self.exact = None
            self._enclosure = gamma
        else:
            raise TypeError(f"unsupported rotation number {gamma!r}")
        if isinstance(self.exact, QuadraticNumber) and self.exact.is_rational and not allow_rational:
            raise RationalGamma("rotation number is rational")

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def is_rational(self) -> bool:
        return isinstance(self.exact, Fraction)

    def _cached(self, key: str, prec: int, compute) -> RigorousInterval:
        k = (key, prec)
        hit = self._cache.get(k)
        if hit is None:
            hit = compute(prec)
            self._cache[k] = hit
        return hit

    def gamma(self, prec: int) -> RigorousInterval:
        if self.exact is not None:
            return self._cached("gamma", prec, lambda p: interval_of_number(self.exact, p))
        return self._cached("gamma", prec, self._enclosure)

    def pi_gamma(self, prec: int) -> RigorousInterval:
        return self._cached("pi_gamma", prec, lambda p: interval_const_pi(p) * self.gamma(p))

    def cos_pi_gamma(self, prec: int) -> RigorousInterval:
        return self._cached("cos", prec, lambda p: iv.cos(self.pi_gamma(p)))

    def radius(self, prec: int) -> RigorousInterval:
        """``R = 1 / cos(pi gamma)``."""
        return self._cached("R", prec, lambda p: 1 / self.cos_pi_gamma(p))

    def radius_squared(self, prec: int) -> RigorousInterval:
        return self._cached("R2", prec, lambda p: 1 / self.cos_pi_gamma(p).square())

    def area(self, prec: int) -> RigorousInterval:
        """``A = (4/3) pi tan(pi gamma)^3``."""

        def compute(p):
            t = iv.tan(self.pi_gamma(p))
            return omega3(p) * t * t * t

        return self._cached("A", prec, compute)

    def describe(self) -> str:
        if self.surd is not None:
            return str(self.surd)
        if self.exact is not None:
            return str(self.exact)
        if self.area_input is not None:
            return f"gamma(A={self.area_input})"
        return "gamma(enclosure)"


def area_of_gamma(rot: RotationNumber, prec: int = 128) -> RigorousInterval:
    _check_gamma_domain(rot, prec)
    return rot.area(prec)


def radius_of_gamma(rot: RotationNumber, prec: int = 128) -> RigorousInterval:
    _check_gamma_domain(rot, prec)
    return rot.radius(prec)


def _check_gamma_domain(rot: RotationNumber, prec: int) -> None:
    g = rot.gamma(prec)
    third = RigorousInterval.point(Fraction(1, 3), prec)
    half = RigorousInterval.point(Fraction(1, 2), prec)
    if not (third.strictly_below(g) and g.strictly_below(half)):
        raise DomainViolation("rotation number must lie strictly inside (1/3, 1/2)")


def as_rotation(gamma) -> RotationNumber:
    if isinstance(gamma, RotationNumber):
        return gamma
    return RotationNumber(gamma, allow_rational=isinstance(gamma, (int, Fraction)))


# orbit angles


@dataclass(eq=False)
class DeltaValue:
    """``delta_k = pi * |(2k - 1) gamma - m|`` with ``m`` the nearest integer."""

    k: int
    m: int
    exact_dist: QuadraticNumber | Fraction | None
    rotation: RotationNumber = field(repr=False)
    _intervals: dict = field(default_factory=dict, repr=False)

    def dist(self, prec: int) -> RigorousInterval:
        if self.exact_dist is not None:
            return interval_of_number(self.exact_dist, prec)
        n = 2 * self.k - 1
        return abs(self.rotation.gamma(prec) * n - self.m)

    def interval(self, prec: int) -> RigorousInterval:
        hit = self._intervals.get(prec)
        if hit is None:
            hit = interval_const_pi(prec) * self.dist(prec)
            self._intervals[prec] = hit
        return hit

    @property
    def delta(self) -> RigorousInterval:
        return self.interval(128)


def delta(gamma, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> DeltaValue:
    """Orbit angle ``delta_k``; exact distance whenever gamma is exact."""
    rot = as_rotation(gamma)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = 2 * k - 1
    if rot.exact is not None:
        x = rot.exact * n
        if isinstance(x, Fraction):
            m = math.floor(x + Fraction(1, 2))
            d = abs(x - m)
        else:
            m = (x + Fraction(1, 2)).floor()
            d = abs(x - m)
        return DeltaValue(k, m, d, rot)
    for prec in policy.ladder():
        box = rot.gamma(prec) * n + Fraction(1, 2)
        lo, hi = box.lo_fraction(), box.hi_fraction()
        m_lo = lo.numerator // lo.denominator
        m_hi = hi.numerator // hi.denominator
        if m_lo == m_hi and lo != m_lo:
            return DeltaValue(k, m_lo, None, rot)
    raise PrecisionExhausted(f"nearest integer to {n}*gamma undetermined")


def delta_compare(a: DeltaValue, b: DeltaValue, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Order two orbit angles: exact when possible, otherwise by refinement."""
    if a.exact_dist is not None and b.exact_dist is not None:
        return compare(a.exact_dist, b.exact_dist)
    for prec in policy.ladder():
        x, y = a.dist(prec), b.dist(prec)
        if x.strictly_below(y):
            return -1
        if y.strictly_below(x):
            return 1
    raise AmbiguousOrder(f"cannot order delta_{a.k} and delta_{b.k}")


@dataclass(frozen=True)
class MinPair:
    k: int
    alpha: DeltaValue
    beta: DeltaValue


def iter_orbit(
    gamma, k_max: int, policy: PrecisionPolicy = DEFAULT_POLICY
) -> Iterator[tuple[DeltaValue, MinPair | None]]:
    """Yield ``(delta_k, MinPair(k))`` for ``k = 1..k_max`` incrementally."""
    rot = as_rotation(gamma)
    alpha = beta = None
    for k in range(1, k_max + 1):
        d = delta(rot, k, policy)
        if alpha is None:
            alpha = d
        elif beta is None:
            if delta_compare(d, alpha, policy) < 0:
                alpha, beta = d, alpha
            else:
                beta = d
        elif delta_compare(d, beta, policy) < 0:
            if delta_compare(d, alpha, policy) < 0:
                alpha, beta = d, alpha
            else:
                beta = d
        yield d, (MinPair(k, alpha, beta) if beta is not None else None)


def min_pair(gamma, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> MinPair:
    """The two smallest of ``delta_1..delta_k`` (``k >= 2``)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    pair = None
    for _, pair in iter_orbit(gamma, k, policy):
        pass
    return pair


# bound functions


def _angle(x, prec: int) -> RigorousInterval:
    if isinstance(x, DeltaValue):
        return x.interval(prec)
    if isinstance(x, RigorousInterval):
        return x
    return RigorousInterval.point(Fraction(x), prec)


def G(gamma, x: RigorousInterval, prec: int | None = None) -> RigorousInterval:
    """``arctan(sqrt(x^2 - 1)) - pi gamma`` for ``x > 1``."""
    rot = as_rotation(gamma)
    p = prec or x.precision
    one = RigorousInterval.point(1, p)
    if not one.strictly_below(x):
        raise DomainViolation("G needs x > 1")
    return iv.atan(iv.sqrt(x.square() - 1)) - rot.pi_gamma(p)


def _G_of_square(rot: RotationNumber, x2: RigorousInterval, p: int) -> RigorousInterval:
    # x2 = x^2 with x > 1
    if not RigorousInterval.point(1, p).strictly_below(x2):
        raise DomainViolation("G needs x > 1")
    return iv.atan(iv.sqrt(x2 - 1)) - rot.pi_gamma(p)


def F_plus(gamma, a, b, prec: int = 128) -> RigorousInterval:
    """``G(R sin(a - b) / (sin a - sin b))``, symmetric in ``a, b``.

    Evaluated through the identity
    ``sin(a - b) / (sin a - sin b) = cos((a - b)/2) / cos((a + b)/2)``,
    which avoids the cancellation in both differences.
    """
    rot = as_rotation(gamma)
    x, y = _angle(a, prec), _angle(b, prec)
    num = iv.cos((y - x) * Fraction(1, 2))
    den = iv.cos((y + x) * Fraction(1, 2))
    if not den.is_positive():
        raise DomainViolation("F_plus needs a + b < pi")
    ratio = num / den
    return _G_of_square(rot, rot.radius_squared(prec) * ratio.square(), prec)


def F_minus(gamma, a, prec: int = 128) -> RigorousInterval:
    """``-G(R cos a)``; needs ``R cos a > 1``, that is ``a < pi gamma``."""
    rot = as_rotation(gamma)
    x = _angle(a, prec)
    c = iv.cos(x)
    if not c.is_positive():
        raise DomainViolation("F_minus needs cos(a) > 0")
    return -_G_of_square(rot, rot.radius_squared(prec) * c.square(), prec)


def rotation_points(gamma, k: int, prec: int = 128) -> tuple[RigorousInterval, RigorousInterval]:
    """Enclosure of ``u_k = R exp(i pi (1 - 2k) gamma)``."""
    rot = as_rotation(gamma)
    if k < 1:
        raise ValueError("k must be at least 1")
    theta = rot.pi_gamma(prec) * (1 - 2 * k)
    R = rot.radius(prec)
    return R * iv.cos(theta), R * iv.sin(theta)


# condition C(A, k)


@dataclass
class Inequality:
    """One strict inequality ``lhs < rhs`` decided by interval separation."""

    name: str
    lhs: RigorousInterval | None
    rhs: RigorousInterval | None
    verdict: Verdict
    precision: int
    note: str = ""

    @property
    def margin(self):
        """Certified lower bound for ``rhs - lhs`` (None when undefined)."""
        if self.lhs is None or self.rhs is None:
            return None
        return (self.rhs - self.lhs).lo


@dataclass
class CheckResult:
    """Outcome of checking one instance of a pair of strict inequalities."""

    kind: str
    indices: tuple[int, ...]
    verdict: Verdict
    parts: list[Inequality]

    @property
    def lhs(self) -> RigorousInterval | None:
        """Enclosure of the maximum of the left-hand sides."""
        boxes = [q.lhs for q in self.parts]
        if any(b is None for b in boxes):
            return None
        lo = max(boxes, key=lambda b: b.lo).raw[0]
        hi = max(boxes, key=lambda b: b.hi).raw[1]
        return RigorousInterval(lo, hi, max(b.precision for b in boxes))

    @property
    def rhs(self) -> RigorousInterval | None:
        boxes = [q.rhs for q in self.parts if q.rhs is not None]
        if not boxes:
            return None
        return min(boxes, key=lambda b: b.precision)

    @property
    def margin(self):
        margins = [q.margin for q in self.parts]
        if any(m is None for m in margins):
            return None
        return min(margins)

    @property
    def precision(self) -> int:
        return max(q.precision for q in self.parts)

    @property
    def note(self) -> str:
        return "; ".join(q.note for q in self.parts if q.note)


def decide_strict(
    name: str,
    lhs_fn: Callable[[int], RigorousInterval],
    rhs_fn: Callable[[int], RigorousInterval],
    policy: PrecisionPolicy,
) -> Inequality:
    """Climb the precision ladder until ``lhs < rhs`` is separated."""
    last = None
    note = ""
    for prec in policy.ladder():
        try:
            lhs = lhs_fn(prec)
        except DomainViolation as exc:
            note = f"domain edge: {exc}"
            last = Inequality(name, None, rhs_fn(prec), Verdict.UNKNOWN, prec, note)
            continue
        rhs = rhs_fn(prec)
        v = strictly_less(lhs, rhs)
        last = Inequality(name, lhs, rhs, v, prec)
        if v is not Verdict.UNKNOWN:
            return last
    if last.verdict is Verdict.UNKNOWN and not last.note:
        last.note = "precision cap reached"
    return last


class ConditionEvaluator:
    """Evaluates C(A, k) and its relatives for one rotation number.

    Bound-function values are cached per (angles, precision): along an
    orbit the minimal pair changes rarely while ``k`` advances.
    """

    def __init__(self, gamma, policy: PrecisionPolicy = DEFAULT_POLICY):
        self.rot = as_rotation(gamma)
        self.policy = policy
        self._fp: dict[tuple[int, int, int], RigorousInterval] = {}
        self._fm: dict[tuple[int, int], RigorousInterval] = {}

    def f_plus(self, a: DeltaValue, b: DeltaValue, prec: int) -> RigorousInterval:
        key = (min(a.k, b.k), max(a.k, b.k), prec)
        hit = self._fp.get(key)
        if hit is None:
            hit = F_plus(self.rot, a, b, prec)
            self._fp[key] = hit
        return hit

    def f_minus(self, a: DeltaValue, prec: int) -> RigorousInterval:
        key = (a.k, prec)
        hit = self._fm.get(key)
        if hit is None:
            hit = F_minus(self.rot, a, prec)
            self._fm[key] = hit
        return hit

    def pair_condition(
        self, kind: str, indices: tuple[int, ...], a: DeltaValue, b: DeltaValue, target: DeltaValue
    ) -> CheckResult:
        """``F_+(a, b) < target`` and ``F_-(a) < target``."""
        plus = decide_strict("F_plus", lambda p: self.f_plus(a, b, p), target.interval, self.policy)
        minus = decide_strict("F_minus", lambda p: self.f_minus(a, p), target.interval, self.policy)
        return CheckResult(kind, indices, Verdict.all_of([plus.verdict, minus.verdict]), [plus, minus])

    def check(self, k: int, pair: MinPair, next_delta: DeltaValue) -> CheckResult:
        return self.pair_condition("direct_C", (k,), pair.alpha, pair.beta, next_delta)

    def check_range(self, ks: Iterable[int]) -> Iterator[CheckResult]:
        """Check C(A, k) for each ``k`` in ``ks`` with one incremental orbit scan."""
        wanted = sorted(set(ks))
        if not wanted:
            return
        if wanted[0] < 2:
            raise ValueError("C(A, k) is defined for k >= 2")
        pos = 0
        orbit = iter_orbit(self.rot, wanted[-1] + 1, self.policy)
        prev_pair = None
        try:
            for d, pair in orbit:
                if prev_pair is not None and prev_pair.k == wanted[pos]:
                    yield self.check(prev_pair.k, prev_pair, d)
                    pos += 1
                    if pos == len(wanted):
                        return
                prev_pair = pair
        except (AmbiguousOrder, PrecisionExhausted) as exc:
            for k in wanted[pos:]:
                yield CheckResult(
                    "direct_C",
                    (k,),
                    Verdict.UNKNOWN,
                    [Inequality("orbit", None, None, Verdict.UNKNOWN, self.policy.cap, str(exc))],
                )


def check_C(gamma, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> CheckResult:
    """Three-valued evaluation of C(A, k)."""
    return next(ConditionEvaluator(gamma, policy).check_range([k]))


def check_C_range(gamma, ks: Iterable[int], policy: PrecisionPolicy = DEFAULT_POLICY) -> list[CheckResult]:
    return list(ConditionEvaluator(gamma, policy).check_range(ks))
