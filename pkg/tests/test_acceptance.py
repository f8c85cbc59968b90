"""End-to-end acceptance checks, one test per criterion.

Each test reports a PASS/FAIL line through the ``acceptance`` fixture; the
lines are printed in the terminal summary.
"""

from __future__ import annotations

import io
import math
import os
import random
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from sectioncert import geometry as geo
from sectioncert.certifier import CertifyOptions, certify, certify_area, certify_surd
from sectioncert.cfrac import cf_expand_surd, convergents, diophantine_bounds_check, parity_check, surd_from_cf
from sectioncert.cli import main
from sectioncert.numerics import PrecisionPolicy, surd_normalize
from sectioncert.rotation import RotationNumber, check_C, check_C_range, gamma_from_area, rotation_points
from sectioncert.scanner import GammaGrid, ScanJob, SurdFamily, run_scan, to_csv
from sectioncert.verdict import Verdict

# sqrt(D)/10^30 lies about 1.5e-59 from a zero of the k = 2 margin
NEAR_TIE_D = 154125419549460147635127817201884170092005442522743634084328
# (4/3) pi tan(pi sqrt(NEAR_TIE_D)/10^30)^3 to 100 digits (mpmath, 120 digits working precision)
NEAR_TIE_AREA = (
    "96.97767323677801614538031794636264188345680600605157041428317817707335498774595701187126290354434416"
)


def _cli(*argv):
    out = io.StringIO()
    return main(list(argv), out), out.getvalue()


def _orbit_oracle(gamma_text: str, ks, dps: int = 60):
    """C(A, k) margins from the sine form of the bounds, running two smallest angles."""
    with mpmath.workdps(dps):
        g = mpmath.mpf(gamma_text) if isinstance(gamma_text, str) else gamma_text
        pi = mpmath.pi
        R = 1 / mpmath.cos(pi * g)
        base = mpmath.atan(mpmath.sqrt(R * R - 1))

        def G(x):
            return mpmath.atan(mpmath.sqrt(x * x - 1)) - base

        def d(k):
            v = (2 * k - 1) * g
            return pi * abs(v - mpmath.nint(v))

        want = set(ks)
        out = {}
        a = b = None
        for k in range(1, max(ks) + 1):
            dk = d(k)
            if a is None or dk < a:
                a, b = dk, a
            elif b is None or dk < b:
                b = dk
            if k in want:
                fp = G(R * mpmath.sin(a - b) / (mpmath.sin(a) - mpmath.sin(b)))
                fm = -G(R * mpmath.cos(a))
                nxt = d(k + 1)
                out[k] = float(min(nxt - fp, nxt - fm))
        return out


@pytest.mark.criterion("1 gamma_0 end-to-end")
def test_criterion_1_gamma0(acceptance):
    t0 = time.perf_counter()
    code, text = _cli("certify", "--surd", "4,2,14")
    elapsed = time.perf_counter() - t0
    cert = certify_surd(surd_normalize(4, 2, 14))
    table = cert.convergent_table
    assert code == 0 and "outcome: MemberOfA" in text
    assert cert.cf.preperiod == (0, 2, 1, 1) and cert.cf.period == (2,)
    assert [table.q(j) for j in range(2, 6)] == [3, 5, 13, 31]
    assert [table.q_tilde(j) for j in range(2, 6)] == [2, 3, 7, 16]
    assert cert.j0 == 4
    assert cert.direct_checks == [2, 3, 4, 5, 6]
    assert elapsed < 10
    acceptance(f"MemberOfA, j0=4, direct k=2..6, {elapsed:.2f}s")


@pytest.mark.criterion("2 gamma_1 end-to-end")
def test_criterion_2_gamma1(acceptance):
    t0 = time.perf_counter()
    code, text = _cli("certify", "--surd", "40,2,94")
    elapsed = time.perf_counter() - t0
    cert = certify_surd(surd_normalize(40, 2, 94))
    assert code == 0 and cert.outcome.status == "MemberOfA"
    assert cert.j0 == 3
    assert cert.direct_checks == [2, 3, 4]
    assert elapsed < 10
    acceptance(f"MemberOfA, j0=3, direct k=2..4, {elapsed:.2f}s")


@pytest.mark.criterion("3 derived constants")
def test_criterion_3_constants(acceptance):
    rot = RotationNumber(surd_normalize(4, 2, 14))
    R = rot.radius(128)
    A = rot.area(128)
    # the quoted values carry 6 significant digits; the enclosures must round to them
    with mpmath.workdps(50):
        assert abs(R.lo - mpmath.mpf("2.87037")) < mpmath.mpf("5e-6")
        assert abs(R.hi - mpmath.mpf("2.87037")) < mpmath.mpf("5e-6")
        assert abs(A.lo - mpmath.mpf("81.5849")) < mpmath.mpf("5e-5")
        assert abs(A.hi - mpmath.mpf("81.5849")) < mpmath.mpf("5e-5")
    assert R.width() < 1e-4 and A.width() < 1e-3
    acceptance(f"R0 width {float(R.width()):.1e}, A0 width {float(A.width()):.1e}")


@pytest.mark.criterion("4 oracle consistency")
def test_criterion_4_oracle(acceptance):
    t0 = time.perf_counter()
    spots = [2, 3, 10, 100, 1000, 5000, 10000]
    details = []
    for (P, D, Q) in ((4, 2, 14), (40, 2, 94)):
        s = surd_normalize(P, D, Q)
        results = check_C_range(s, range(2, 10001))
        bad = [r.indices[0] for r in results if r.verdict is not Verdict.TRUE]
        assert bad == []
        with mpmath.workdps(60):
            ref = _orbit_oracle((P + mpmath.sqrt(D)) / Q, spots)
        for k in spots:
            assert abs(float(results[k - 2].margin) - ref[k]) < 1e-12, k
        details.append(f"{P},{D},{Q}: 9999 TRUE")
    elapsed = time.perf_counter() - t0
    assert elapsed < 600
    acceptance("; ".join(details) + f", {elapsed:.1f}s")


@pytest.mark.criterion("5 diophantine suite")
def test_criterion_5_diophantine(acceptance):
    rng = random.Random(20240601)
    failures = 0
    done = 0
    while done < 50:
        D = rng.randrange(2, 10**4)
        Q = rng.randrange(2, 10**4)
        P = rng.randrange(-2 * Q, 2 * Q)
        try:
            s = surd_normalize(P, D, Q)
        except ValueError:
            continue
        if not (Fraction(1, 3) < Fraction(float(s)) < Fraction(1, 2)):
            continue
        cf = cf_expand_surd(s)
        table = convergents(cf, 13)
        rep = diophantine_bounds_check(cf, table, s, best_approx_to=6)
        failures += len(rep.two_sided_failures) + len(rep.growth_failures) + len(rep.best_approx_failures)
        # convergents agree with direct evaluation of the truncated expansion
        digits = cf.digits(13)
        for j in range(13):
            v = Fraction(digits[j])
            for a in reversed(digits[:j]):
                v = a + 1 / v
            assert v == Fraction(table.p(j), table.q(j))
        done += 1
    assert failures == 0
    acceptance(f"50 surds, j<=12, best approximation to q_6, {failures} failures")


def _mc_section_volume(body, f2, s, n, rng):
    """Monte Carlo 3-volume of the tangent section with slope ``s``; ``f2`` is a vectorized ``f^2``."""
    line = geo.tangent_record(s)
    a, b = geo.section_endpoints(body, s)
    top = max(math.sqrt(max(body.f2(x) - line.y_at(x) ** 2, 0.0)) for x in np.linspace(a, b, 2001)) * 1.01
    box = (b - a) * (2 * top) ** 2
    hits = 0
    chunk = 10**6
    for _ in range(n // chunk):
        x = rng.uniform(a, b, chunk)
        u = rng.uniform(-top, top, (2, chunk))
        hits += int(np.count_nonzero(u[0] ** 2 + u[1] ** 2 + (s * x + line.h) ** 2 <= f2(x)))
    p = hits / n
    return line.h * box * p, line.h * box * math.sqrt(p * (1 - p) / n)


@pytest.mark.criterion("6 geometry oracle")
def test_criterion_6_geometry(acceptance):
    R0 = float(RotationNumber(surd_normalize(4, 2, 14)).radius(64).mid())
    worst_area = worst_res = worst_step = worst_pts = worst_zt = 0.0
    for R in (2.5, R0, 5.0):
        body = geo.ConvexProfile.circle(R)
        target = geo.ball_section_area(R)
        for s in np.linspace(-5, 5, 100):
            worst_area = max(worst_area, abs(geo.section_area(body, float(s)) - target) / target)
        for s in np.linspace(-3, 3, 50):
            worst_res = max(worst_res, geo.cubic_residual(R, float(s)))
        pts = geo.circle_orbit(R, 100)
        steps = geo.angle_steps(pts)
        worst_step = max(worst_step, float(np.ptp(steps)))
        # the same orbit from exact rotation arithmetic
        if R == R0:
            rot = RotationNumber(surd_normalize(4, 2, 14))
        else:
            with mpmath.workdps(60):
                area = mpmath.mpf(4) / 3 * mpmath.pi * (mpmath.mpf(R) ** 2 - 1) ** 1.5
                rot = gamma_from_area(Fraction(mpmath.nstr(area, 50)))
        for k in range(1, 101):
            x, y = rotation_points(rot, k, 128)
            px, py = pts[k - 1]
            worst_pts = max(worst_pts, abs(x.mid() - px), abs(y.mid() - py))
    rng = random.Random(7)
    for _ in range(100):
        s = rng.uniform(-20, 20)
        worst_zt = max(worst_zt, abs(geo.axis_point(s) * geo.touch_point(s) - 1))
    assert worst_area < 1e-8
    assert worst_res < 1e-10
    assert worst_step < 1e-10
    assert worst_pts < 1e-9
    assert worst_zt < 1e-12
    # independent Monte Carlo volume of an ellipsoidal profile section
    ell = geo.ConvexProfile.ellipse(3.0, 2.0)

    def ell_f2(x):
        return 4.0 * (1.0 - (x / 3.0) ** 2)

    gen = np.random.default_rng(12345)
    mc0, sd0 = _mc_section_volume(ell, ell_f2, 0.0, 10**7, gen)
    assert abs(mc0 - 6 * math.sqrt(3) * math.pi) < 4 * sd0
    mc1, sd1 = _mc_section_volume(ell, ell_f2, 0.5, 10**7, gen)
    assert abs(mc1 - geo.section_area(ell, 0.5)) < 4 * sd1
    acceptance(
        f"area {worst_area:.1e}, cubic {worst_res:.1e}, step {worst_step:.1e}, "
        f"orbit {worst_pts:.1e}, z*t {worst_zt:.1e}, ellipse MC within 4 sigma"
    )


@pytest.mark.criterion("7 scan phenomenon")
def test_criterion_7_scan(acceptance):
    workers = min(8, os.cpu_count() or 1)
    t0 = time.perf_counter()
    grid = run_scan(ScanJob(GammaGrid(0.36, 0.48, 500), CertifyOptions(depth=1000), parallel=workers))
    fam = run_scan(ScanJob(SurdFamily(2, (10, 100)), CertifyOptions(depth=1000), parallel=workers))
    elapsed = time.perf_counter() - t0
    records = grid.records + fam.records
    members = [r for r in records if r.outcome == "MemberOfA"]
    failing = [r for r in records if r.first_fail]
    assert len(grid.records) == 500
    assert not [r for r in records if r.outcome == "Error"]
    assert members and failing
    assert elapsed < 1800
    acceptance(
        f"grid {grid.summary}, surd family {fam.summary}, {len(members)} members, "
        f"{len(failing)} with failing checks, {workers} worker(s), {elapsed:.0f}s"
    )


@pytest.mark.criterion("8 negative paths")
def test_criterion_8_negative(acceptance, tmp_path):
    code, _ = _cli("certify", "--surd", "1,4,2", "--json", str(tmp_path / "x.json"))
    assert code == 3 and not (tmp_path / "x.json").exists()
    assert str(certify(Fraction(2, 5)).outcome) == "NotCertified(rational)"
    s = surd_from_cf((0, 2, 1, 2), (2,))
    assert parity_check(cf_expand_surd(s)).verdict is Verdict.FALSE
    assert str(certify_surd(s).outcome) == "NotCertified(parity)"
    tie = surd_normalize(0, NEAR_TIE_D, 10**30)
    capped = check_C(tie, 2, PrecisionPolicy(64, 64))
    assert capped.verdict is Verdict.UNKNOWN
    lifted = check_C(tie, 2, PrecisionPolicy(64, 256))
    assert lifted.verdict is Verdict.TRUE and lifted.precision == 256
    # the same tie through the area pipeline and the command line
    A = Fraction(NEAR_TIE_AREA)
    assert str(certify_area(A, CertifyOptions(PrecisionPolicy(64, 64), depth=2)).outcome) == "Undecidable(precision cap reached)"
    code, text = _cli("certify", "--area", NEAR_TIE_AREA, "--depth", "2", "--prec", "64", "--max-prec", "256")
    assert code == 2 and "DepthLimited(2)" in text and "max precision: 256 bits" in text
    acceptance("rational exit 3; a_3 even -> parity; 64-bit Unknown resolved at 256 bits")


@pytest.mark.criterion("9 determinism")
def test_criterion_9_determinism(acceptance):
    opts = CertifyOptions(depth=300)
    grid = GammaGrid(0.36, 0.48, 40)
    fam = SurdFamily(2, (10, 30))
    outputs = []
    for width in (1, 2, 1):
        text = to_csv(run_scan(ScanJob(grid, opts, width)).records, with_time=False)
        text += to_csv(run_scan(ScanJob(fam, opts, width)).records, with_time=False)
        outputs.append(text.encode())
    assert outputs[0] == outputs[1] == outputs[2]
    acceptance(f"{len(outputs[0])} bytes identical across widths 1, 2, 1")
