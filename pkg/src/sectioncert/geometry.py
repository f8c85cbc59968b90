"""Floating-point oracle for the planar reduction of the section problem.

A symmetric body of revolution in R^4 is described by its planar profile
``K = {|y| <= f(x), |x| <= X}``. Hyperplanes tangent to the unit ball
correspond to lines tangent to the unit disk; this module computes the
cubic ``P_s``, the tangent-line bookkeeping, the tangent-chord maps and the
section-area integral.

Nothing here feeds a certificate. It exists to cross-check the arithmetic
modules against the original geometry and to drive ``simulate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .numerics.interval import DomainViolation

OMEGA2 = math.pi
OMEGA3 = 4.0 * math.pi / 3.0

Point = tuple[float, float]


class ZeroSlope(ValueError):
    """The cubic and the axis intersection are undefined at slope zero."""


class PointInsideDisk(ValueError):
    """Tangent lines exist only through points outside the unit disk."""


class NoSecondIntersection(RuntimeError):
    """The tangent line does not leave the profile a second time."""


class EmptySection(ValueError):
    """The tangent line misses the interior of the profile."""


# the cubic and its critical points


def h(s: float) -> float:
    return math.sqrt(1.0 + s * s)


def touch_point(s: float) -> float:
    """x-coordinate of the upper tangency point of ``y = s x + h(s)``."""
    return -s / h(s)


def axis_point(s: float) -> float:
    """x-coordinate where ``y = s x + h(s)`` meets the x axis."""
    if s == 0:
        raise ZeroSlope("horizontal tangent never meets the axis")
    return -h(s) / s


def poly_P(s: float, x):
    """``-(2/3)(h/s) x^3 - ((1+2s^2)/s^2) x^2 - 2 (h/s) x``; accepts arrays."""
    if s == 0:
        raise ZeroSlope("P_s needs s != 0")
    r = h(s) / s
    return -(2.0 / 3.0) * r * x**3 - ((1.0 + 2.0 * s * s) / (s * s)) * x**2 - 2.0 * r * x


def poly_P_coefficients(s: float) -> np.ndarray:
    """Coefficients of ``P_s`` in numpy order (highest degree first)."""
    if s == 0:
        raise ZeroSlope("P_s needs s != 0")
    r = h(s) / s
    return np.array([-(2.0 / 3.0) * r, -(1.0 + 2.0 * s * s) / (s * s), -2.0 * r, 0.0])


def critical_points(s: float) -> np.ndarray:
    """Real roots of ``P_s'`` computed numerically, sorted."""
    roots = np.roots(np.polyder(poly_P_coefficients(s)))
    return np.sort(roots.real)


@dataclass(frozen=True)
class TangentLineRecord:
    """Line ``y = s x + eps h(s)`` tangent to the unit disk at ``(c, d)``.

    ``eps = 1`` when the tangency is in the upper half-plane. ``t`` and
    ``z`` refer to the upper-touch line of the same slope, as in the cubic.
    """

    s: Optional[float]
    eps: int
    contact: Point
    vertical_x: Optional[float] = None

    @property
    def h(self) -> float:
        return h(self.s)

    @property
    def t(self) -> float:
        return touch_point(self.s)

    @property
    def z(self) -> float:
        return axis_point(self.s)

    @property
    def intercept(self) -> float:
        return self.eps * h(self.s)

    def y_at(self, x):
        return self.s * x + self.intercept

    @property
    def direction(self) -> Point:
        # unit direction pointing clockwise around the origin
        c, d = self.contact
        return (d, -c)


def tangent_record(s: float) -> TangentLineRecord:
    """The upper-touch tangent of slope ``s``."""
    return TangentLineRecord(s, 1, (touch_point(s), 1.0 / h(s)))


def tangent_through(p: Point) -> TangentLineRecord:
    """The tangent through ``p`` whose contact ``(c, d)`` has ``c y - d x > 0``.

    Travelling from ``p`` to the contact point turns clockwise about the
    origin.
    """
    x, y = p
    r = math.hypot(x, y)
    if r <= 1.0:
        raise PointInsideDisk(f"|p| = {r} <= 1")
    phi = math.atan2(y, x) - math.acos(1.0 / r)
    c, d = math.cos(phi), math.sin(phi)
    if abs(d) < 1e-15:
        return TangentLineRecord(None, 0, (math.copysign(1.0, c), 0.0), vertical_x=math.copysign(1.0, c))
    eps = 1 if d > 0 else -1
    return TangentLineRecord(-c / d, eps, (c, d))


# chord maps


def chord_map_circle(R: float, p: Point) -> Point:
    """Second intersection of the clockwise tangent through ``p`` with ``S_R``."""
    if R <= 1.0:
        raise PointInsideDisk("the circle must enclose the unit disk")
    line = tangent_through(p)
    vx, vy = line.direction
    t = -2.0 * (p[0] * vx + p[1] * vy) / (vx * vx + vy * vy)
    return (p[0] + t * vx, p[1] + t * vy)


def circle_orbit(R: float, n: int, start: Optional[Point] = None) -> list[Point]:
    """``u_1, ..., u_n`` with ``u_1 = (1, -sqrt(R^2-1))`` unless ``start`` is given."""
    p = start if start is not None else (1.0, -math.sqrt(R * R - 1.0))
    out = [p]
    for _ in range(n - 1):
        p = chord_map_circle(R, p)
        out.append(p)
    return out


@dataclass
class ConvexProfile:
    """Even concave profile ``f`` on ``[-X, X]``; the body is ``|y| <= f(x)``."""

    X_max: float
    f: Callable[[float], float]
    f_squared: Optional[Callable[[float], float]] = None
    kind: str = "custom"
    samples: Optional[tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    @classmethod
    def circle(cls, R: float) -> "ConvexProfile":
        return cls(
            R,
            lambda x: math.sqrt(max(R * R - x * x, 0.0)),
            lambda x: R * R - x * x,
            kind=f"circle({R})",
        )

    @classmethod
    def ellipse(cls, a: float, b: float) -> "ConvexProfile":
        return cls(
            a,
            lambda x: b * math.sqrt(max(1.0 - (x / a) ** 2, 0.0)),
            lambda x: b * b * (1.0 - (x / a) ** 2),
            kind=f"ellipse({a},{b})",
        )

    @classmethod
    def tabulated(cls, xs: Sequence[float], ys: Sequence[float]) -> "ConvexProfile":
        """Concave piecewise-linear profile through the upper hull of the samples.

        Samples may cover ``[0, X]`` only; they are mirrored to enforce
        evenness before the hull is taken.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        pts = sorted(set(zip(np.concatenate([xs, -xs]), np.concatenate([ys, ys]))))
        hull: list[tuple[float, float]] = []
        for pt in pts:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                # drop the middle point unless it turns clockwise
                if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) >= 0:
                    hull.pop()
                else:
                    break
            hull.append(pt)
        hx = np.array([p[0] for p in hull])
        hy = np.array([p[1] for p in hull])
        X = float(hx[-1])
        return cls(X, lambda x: float(np.interp(x, hx, hy)), kind="tabulated", samples=(hx, hy))

    def f2(self, x: float) -> float:
        if self.f_squared is not None:
            return self.f_squared(x)
        v = self.f(x)
        return v * v

    def validate(self, n: int = 401) -> list[str]:
        """Sample-grid check of evenness, positivity, concavity and disk containment."""
        problems = []
        grid = np.linspace(-self.X_max, self.X_max, n)
        vals = np.array([self.f(x) for x in grid])
        if np.max(np.abs(vals - vals[::-1])) > 1e-12:
            problems.append("profile is not even")
        if np.any(vals[1:-1] <= 0):
            problems.append("profile is not positive inside")
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        if np.any(second > 1e-9):
            problems.append("profile is not concave on the sample grid")
        inner = np.linspace(-1.0, 1.0, n)
        if self.X_max <= 1.0 or any(self.f(x) < math.sqrt(max(1 - x * x, 0.0)) for x in inner):
            problems.append("profile does not contain the unit disk")
        return problems

    def on_boundary(self, x: float, upper: bool = True) -> Point:
        y = self.f(x)
        return (x, y if upper else -y)


def chord_map_profile(body: ConvexProfile, p: Point, tol: float = 1e-14) -> Point:
    """Second boundary point of the clockwise tangent through ``p``.

    The contact point lies strictly inside the body, so the exit is searched
    from there toward the side away from ``p``; a line that reaches
    ``x = +-X`` while still inside exits through the vertical edge.
    """
    line = tangent_through(p)
    if line.s is None:
        # vertical tangent x = +-1 splits the boundary symmetrically
        return (p[0], -p[1])
    c = line.contact[0]
    end = body.X_max if line.eps == 1 else -body.X_max

    def gap(x):
        return body.f2(x) - line.y_at(x) ** 2

    if gap(c) <= 0:
        raise NoSecondIntersection("contact point is not interior to the body")
    if gap(end) >= 0:
        return (end, line.y_at(end))
    v = optimize.brentq(gap, c, end, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return (v, line.y_at(v))


def profile_orbit(body: ConvexProfile, start: Point, n: int) -> list[Point]:
    out = [start]
    p = start
    for _ in range(n - 1):
        p = chord_map_profile(body, p)
        out.append(p)
    return out


# sections


def section_endpoints(body: ConvexProfile, s: float) -> tuple[float, float]:
    """``a(s) < b(s)`` where the upper-touch line of slope ``s`` leaves the body."""
    line = tangent_record(s)
    t = line.t

    def gap(x):
        return body.f2(x) - line.y_at(x) ** 2

    if gap(t) <= 0:
        raise EmptySection("tangent line misses the interior")
    eps = 4 * np.finfo(float).eps
    left = -body.X_max if gap(-body.X_max) >= 0 else optimize.brentq(gap, -body.X_max, t, xtol=1e-15, rtol=eps)
    right = body.X_max if gap(body.X_max) >= 0 else optimize.brentq(gap, t, body.X_max, xtol=1e-15, rtol=eps)
    return left, right


def section_area(body: ConvexProfile, s: float) -> float:
    """3-volume of the hyperplane section tangent to the unit ball with slope ``s``."""
    line = tangent_record(s)
    a, b = section_endpoints(body, s)
    val, _ = integrate.quad(
        lambda x: body.f2(x) - line.y_at(x) ** 2, a, b, epsabs=0.0, epsrel=1e-13, limit=200, points=[line.t]
    )
    return OMEGA2 * line.h * val


def ball_section_area(R: float) -> float:
    """``omega_3 (R^2 - 1)^(3/2)``."""
    return OMEGA3 * (R * R - 1.0) ** 1.5


def circle_endpoints(R: float, s: float) -> tuple[float, float]:
    """Closed form of ``a(s), b(s)`` for the circle of radius ``R``."""
    w = math.sqrt(R * R - 1.0)
    hs = h(s)
    return (-s - w) / hs, (-s + w) / hs


def cubic_residual(R: float, s: float) -> float:
    """``|P_s(b) - P_s(a) + (4/3)(R^2-1)^(3/2) / (s (1+s^2))|`` for the circle."""
    if s == 0:
        raise ZeroSlope("the cubic identity needs s != 0")
    a, b = circle_endpoints(R, s)
    rhs = (4.0 / 3.0) * (R * R - 1.0) ** 1.5 / (s * (1.0 + s * s))
    return abs(poly_P(s, b) - poly_P(s, a) + rhs)


def billiard_target(R: float, s: float, x: float) -> float:
    """Right side of the cubic equation satisfied by the next x-coordinate."""
    return poly_P(s, x) - (4.0 / 3.0) * (R * R - 1.0) ** 1.5 / (s * (1.0 + s * s))


def roots_by_interval(s: float, target: float) -> dict[str, int]:
    """Roots of ``P_s(v) = target`` in each monotone piece, by sign changes.

    ``P_s`` is monotone between consecutive critical points, so each piece
    holds a root exactly when the endpoint values of ``P_s - target`` differ
    in sign.
    """
    lo, hi = sorted((touch_point(s), axis_point(s)))
    lead = poly_P_coefficients(s)[0]

    def g(x):
        return poly_P(s, x) - target

    minus_inf = -math.copysign(1.0, lead)
    plus_inf = math.copysign(1.0, lead)
    pieces = {
        "left": (minus_inf, math.copysign(1.0, g(lo))),
        "middle": (math.copysign(1.0, g(lo)), math.copysign(1.0, g(hi))),
        "right": (math.copysign(1.0, g(hi)), plus_inf),
    }
    return {k: int(a != b) for k, (a, b) in pieces.items()}


def admissible_root_count(R: float, p: Point) -> int:
    """Roots ``v > t(p)`` of the cubic for an upper-touch point ``p`` on ``S_R``."""
    line = tangent_through(p)
    if line.eps != 1 or line.s is None or line.s == 0:
        raise DomainViolation("needs an upper-touch tangent with non-zero slope")
    s = line.s
    counts = roots_by_interval(s, billiard_target(R, s, p[0]))
    if s > 0:
        # z < t: only the rightmost piece lies beyond t
        return counts["right"]
    # t < z: the middle and right pieces lie beyond t
    return counts["middle"] + counts["right"]


def uniqueness_premise(R: float, s: float) -> bool:
    """``s >= 0`` or ``3 + 2 s sqrt(R^2-1) < 0``."""
    return s >= 0 or 3.0 + 2.0 * s * math.sqrt(R * R - 1.0) < 0


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class SideSignRecord:
    point: Point
    slope: float
    image_y: float
    threshold_sum: float
    image_sign: int
    predicted_sign: int
    inconclusive: bool

    @property
    def agrees(self) -> bool:
        return self.inconclusive or self.image_sign == self.predicted_sign


def lemma_side_sign(body: ConvexProfile, p: Point, tol: float = 1e-9) -> SideSignRecord:
    """Compare the sign of the image's y-coordinate with ``s(p) + s(X, 0)``."""
    line = tangent_through(p)
    if line.eps != 1 or line.s is None or line.s >= 0:
        raise DomainViolation("needs an upper-touch tangent with negative slope")
    q = chord_map_profile(body, p)
    s_end = tangent_through((body.X_max, 0.0)).s
    total = line.s + s_end
    return SideSignRecord(
        p, line.s, q[1], total, _sign(q[1]), _sign(total), abs(q[1]) < tol or abs(total) < tol
    )


def side_sign_samples(body: ConvexProfile, n: int = 50) -> list[SideSignRecord]:
    """``n`` boundary points with an upper-touch, negative-slope tangent."""
    out = []
    for x in np.linspace(-body.X_max, body.X_max, 40 * n + 1)[1:-1]:
        for upper in (True, False):
            p = body.on_boundary(float(x), upper)
            if math.hypot(*p) <= 1.0:
                continue
            line = tangent_through(p)
            if line.eps == 1 and line.s is not None and line.s < 0:
                out.append(p)
    if len(out) < n:
        raise DomainViolation("not enough admissible boundary samples")
    idx = np.linspace(0, len(out) - 1, n).round().astype(int)
    return [lemma_side_sign(body, out[i]) for i in idx]


def orbit_angles(points: Sequence[Point]) -> np.ndarray:
    return np.array([math.atan2(y, x) for x, y in points])


def angle_steps(points: Sequence[Point]) -> np.ndarray:
    """Clockwise angle between consecutive points, in ``[0, 2 pi)``."""
    ang = orbit_angles(points)
    return np.mod(ang[:-1] - ang[1:], 2 * math.pi)


def simulate_rows(R: float, n: int, body: Optional[ConvexProfile] = None) -> list[dict[str, float]]:
    """Trajectory table with columns k, x, y, angle, angle_step, cubic_residual.

    With a profile the orbit starts at the lower boundary point above
    ``x = 1`` and the residual (a circle identity) is left as NaN.
    """
    if body is None:
        pts = circle_orbit(R, n, (1.0, -math.sqrt(R * R - 1.0)))
    else:
        pts = profile_orbit(body, body.on_boundary(1.0, upper=False), n)
    rows = []
    prev = None
    for k, p in enumerate(pts, start=1):
        ang = math.atan2(p[1], p[0])
        step = float("nan") if prev is None else (prev - ang) % (2 * math.pi)
        line = tangent_through(p)
        if body is not None or line.s is None or line.s == 0:
            res = float("nan")
        else:
            res = cubic_residual(R, line.s)
        rows.append({"k": k, "x": p[0], "y": p[1], "angle": ang, "angle_step": step, "cubic_residual": res})
        prev = ang
    return rows
