from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectioncert import geometry as geo
from sectioncert.numerics import DomainViolation

R0 = 2.87037194353199


@pytest.mark.parametrize("R", [2.5, R0, 5.0])
def test_ball_sections_have_constant_area(R):
    body = geo.ConvexProfile.circle(R)
    target = geo.ball_section_area(R)
    for s in np.linspace(-4, 4, 41):
        assert abs(geo.section_area(body, float(s)) - target) <= 1e-10 * target


def test_ellipse_section_matches_closed_form():
    # section of 1 + x3^2 + x4^2 <= 4 (1 - x^2/9) at s = 0: pi * int (f^2 - 1) dx = 6 sqrt(3) pi
    body = geo.ConvexProfile.ellipse(3.0, 2.0)
    assert abs(geo.section_area(body, 0.0) - 6 * math.sqrt(3) * math.pi) < 1e-10


@settings(max_examples=100)
@given(st.floats(min_value=-50, max_value=50).filter(lambda s: abs(s) > 1e-6))
def test_touch_and_axis_points_are_reciprocal(s):
    assert abs(geo.touch_point(s) * geo.axis_point(s) - 1.0) < 1e-12


def test_zero_slope_rejected():
    with pytest.raises(geo.ZeroSlope):
        geo.axis_point(0.0)
    with pytest.raises(geo.ZeroSlope):
        geo.cubic_residual(3.0, 0.0)


def test_cubic_value_and_critical_points():
    # at s = 1: P(-1) against a direct evaluation of the coefficients
    coeffs = geo.poly_P_coefficients(1.0)
    assert abs(np.polyval(coeffs, -1.0) - geo.poly_P(1.0, -1.0)) < 1e-14
    assert abs(geo.poly_P(1.0, -1.0) - 0.7712361663) < 1e-9
    crit = sorted(geo.critical_points(0.7))
    expected = sorted([geo.touch_point(0.7), geo.axis_point(0.7)])
    assert np.allclose(crit, expected, atol=1e-12)


@pytest.mark.parametrize("R", [2.5, R0, 5.0])
def test_cubic_identity_on_circle(R):
    for s in np.linspace(-3, 3, 51):
        if abs(s) < 1e-9:
            continue
        assert geo.cubic_residual(R, float(s)) < 1e-10


def test_tangent_through_orientation():
    rec = geo.tangent_through((3.0, 0.0))
    assert rec.eps == -1
    assert abs(rec.s - 1 / math.sqrt(8)) < 1e-14
    c, d = rec.contact
    assert abs(c * c + d * d - 1) < 1e-14
    x, y = 3.0, 0.0
    # the contact lies on the line and the radius is perpendicular to it
    assert abs((x - c) * c + (y - d) * d) < 1e-12
    with pytest.raises(geo.PointInsideDisk):
        geo.tangent_through((0.5, 0.5))
    vert = geo.tangent_through((1.0, 2.0))
    assert vert.s is None and vert.vertical_x == 1.0


@pytest.mark.parametrize("R", [2.5, R0, 5.0])
def test_circle_map_rotates_by_constant_angle(R):
    pts = geo.circle_orbit(R, 100)
    steps = geo.angle_steps(pts)
    gamma = math.atan(math.sqrt(R * R - 1)) / math.pi
    assert np.ptp(steps) < 1e-10
    assert abs(steps[0] - 2 * math.pi * gamma) < 1e-10
    assert all(abs(math.hypot(*p) - R) < 1e-10 for p in pts)


def test_profile_map_on_circle_matches_closed_form():
    body = geo.ConvexProfile.circle(3.0)
    p = (1.0, -math.sqrt(8.0))
    for _ in range(20):
        a = geo.chord_map_profile(body, p)
        b = geo.chord_map_circle(3.0, p)
        assert abs(a[0] - b[0]) < 1e-9 and abs(a[1] - b[1]) < 1e-9
        p = b


def test_first_map_slope():
    R = 3.0
    u1 = (1.0, -math.sqrt(R * R - 1))
    rec = geo.tangent_through(u1)
    # the chord from u_1 has slope (2 - R^2) / (2 sqrt(R^2 - 1))
    u2 = geo.chord_map_circle(R, u1)
    slope = (u2[1] - u1[1]) / (u2[0] - u1[0])
    assert abs(slope - (2 - R * R) / (2 * math.sqrt(R * R - 1))) < 1e-12
    assert abs(rec.s - slope) < 1e-12


def test_vertical_tangent_reflects():
    w = math.sqrt(8.0)
    body = geo.ConvexProfile.circle(3.0)
    q = geo.chord_map_profile(body, (-w, 1.0))
    assert abs(q[0] - w) < 1e-9 and abs(q[1] - 1.0) < 1e-9


def test_profile_validation():
    assert geo.ConvexProfile.circle(3.0).validate() == []
    assert geo.ConvexProfile.ellipse(3.0, 2.0).validate() == []
    small = geo.ConvexProfile.circle(0.9)
    assert "profile does not contain the unit disk" in small.validate()
    xs = np.linspace(0, 3, 31)
    tab = geo.ConvexProfile.tabulated(xs, np.sqrt(9 - xs**2))
    assert tab.validate() == []
    assert abs(tab.f(0.0) - 3.0) < 1e-12


@pytest.mark.parametrize("body", [geo.ConvexProfile.circle(3.0), geo.ConvexProfile.ellipse(3.0, 2.0)])
def test_side_sign_lemma(body):
    recs = geo.side_sign_samples(body, 50)
    assert len(recs) == 50
    assert all(r.agrees for r in recs)


def test_admissible_roots_unique_when_premise_holds():
    R = 3.0
    for k, p in enumerate(geo.circle_orbit(R, 60)):
        rec = geo.tangent_through(p)
        if rec.eps != 1 or rec.s is None or rec.s == 0:
            continue
        if geo.uniqueness_premise(R, rec.s):
            assert geo.admissible_root_count(R, p) == 1, k


def test_admissible_root_count_domain():
    with pytest.raises(DomainViolation):
        geo.admissible_root_count(3.0, (3.0, 0.0))


def test_simulate_rows_columns():
    rows = geo.simulate_rows(R0, 10)
    assert list(rows[0]) == ["k", "x", "y", "angle", "angle_step", "cubic_residual"]
    assert math.isnan(rows[0]["angle_step"])
    steps = [r["angle_step"] for r in rows[1:]]
    assert max(steps) - min(steps) < 1e-12
