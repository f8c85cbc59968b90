"""Batch classification of rotation numbers.

Three candidate sources are supported: an even grid of rotation numbers
(certified depth-limited through a rational area), a family of quadratic
surds ``(P + sqrt(D))/Q`` and a family of continued fractions built from a
prefix, free digits and a periodic continuation.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterator, Optional, Sequence, Union

from mpmath import mp, mpf

from .certifier import Certificate, CertifyOptions, certificate_to_json, certify_area, certify_surd
from .cfrac import surd_from_cf
from .numerics.interval import to_decimal_str
from .numerics.quadratic import QuadraticSurd, SurdError, surd_normalize
from .verdict import Verdict

GAMMA_MIN = math.atan(2.0) / math.pi

CSV_COLUMNS = (
    "id", "gamma_lo", "gamma_hi", "R_mid", "A_mid", "outcome", "j0",
    "first_fail", "min_margin", "precision_bits", "ms",
)


@dataclass(frozen=True)
class GammaGrid:
    lo: float
    hi: float
    steps: int
    significant_digits: int = 12

    def __post_init__(self):
        if not (GAMMA_MIN < self.lo <= self.hi < 0.5):
            raise ValueError("grid must lie inside (arctan(2)/pi, 1/2)")
        if self.steps < 1:
            raise ValueError("steps must be positive")


@dataclass(frozen=True)
class SurdFamily:
    D: int
    Q_range: tuple[int, int]
    P_range: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class CfFamily:
    prefix: tuple[int, ...]
    digit_set: tuple[int, ...]
    depth: int
    period: tuple[int, ...] = (2,)

    def __post_init__(self):
        if any(d <= 0 for d in self.digit_set):
            raise ValueError("digits must be positive integers")
        if self.depth < len(self.prefix):
            raise ValueError("depth shorter than the prefix")
        odd = [d for d in self.digit_set + self.period if d % 2]
        if odd and self.depth > 3:
            warnings.warn("odd digits beyond index 3 break the parity premise", stacklevel=2)


Source = Union[GammaGrid, SurdFamily, CfFamily]


@dataclass
class ScanJob:
    source: Source
    options: CertifyOptions = field(default_factory=CertifyOptions)
    parallel: int = 1
    limit: Optional[int] = None


@dataclass(frozen=True)
class Candidate:
    id: int
    kind: str  # "area" or "surd"
    label: str
    area: Optional[Fraction] = None
    surd: Optional[QuadraticSurd] = None


@dataclass
class ScanRecord:
    id: int
    label: str
    gamma_lo: str
    gamma_hi: str
    R_mid: str
    A_mid: str
    outcome: str
    j0: Optional[int]
    first_fail: str
    min_margin: str
    precision_bits: int
    ms: float
    error: str = ""
    certificate: Optional[dict[str, Any]] = None

    def row(self, with_time: bool = True) -> list[str]:
        out = [
            str(self.id), self.gamma_lo, self.gamma_hi, self.R_mid, self.A_mid, self.outcome,
            "" if self.j0 is None else str(self.j0), self.first_fail, self.min_margin,
            str(self.precision_bits),
        ]
        out.append(f"{self.ms:.1f}" if with_time else "")
        return out

    @property
    def certified(self) -> bool:
        return self.outcome in ("MemberOfA",) or self.outcome.startswith("DepthLimited")

    @property
    def failed(self) -> bool:
        return bool(self.first_fail) or self.outcome.startswith("NotCertified")


# candidate generation


def area_for_gamma(gamma: float, digits: int = 12) -> Fraction:
    """Rational area ``(4/3) pi tan(pi gamma)^3`` rounded to ``digits`` significant digits.

    Candidates on a grid are certified through their area so that the
    rotation number is never a rational grid point.
    """
    with mp.workprec(200):
        value = mpf(4) / 3 * mp.pi * mp.tan(mp.pi * mpf(gamma)) ** 3
        text = mp.nstr(value, digits, strip_zeros=False)
    return Fraction(Decimal(text))


def grid_candidates(grid: GammaGrid) -> Iterator[Candidate]:
    n = grid.steps
    for i in range(n):
        g = grid.lo if n == 1 else grid.lo + (grid.hi - grid.lo) * i / (n - 1)
        A = area_for_gamma(g, grid.significant_digits)
        yield Candidate(i, "area", f"A={Decimal(A.numerator) / Decimal(A.denominator)}", area=A)


def _surd_in_range(s: QuadraticSurd) -> bool:
    return GAMMA_MIN < float(s) < 0.5


def surd_candidates(fam: SurdFamily) -> Iterator[Candidate]:
    """Every ``(P + sqrt(D))/Q`` with ``Q`` in range and value inside the window.

    Without an explicit ``P`` range, the P values placing the surd inside
    ``(arctan(2)/pi, 1/2)`` are enumerated. Each value appears once.
    """
    seen: set[tuple[int, int, int]] = set()
    idx = 0
    r = math.sqrt(fam.D)
    for Q in range(fam.Q_range[0], fam.Q_range[1] + 1):
        if Q == 0:
            continue
        if fam.P_range is not None:
            Ps = range(fam.P_range[0], fam.P_range[1] + 1)
        else:
            a, b = sorted((GAMMA_MIN * Q - r, 0.5 * Q - r))
            Ps = range(math.floor(a) - 1, math.ceil(b) + 2)
        for P in Ps:
            try:
                s = surd_normalize(P, fam.D, Q)
            except SurdError:
                continue
            if not _surd_in_range(s):
                continue
            key = (s.P, s.D, s.Q)
            if key in seen:
                continue
            seen.add(key)
            yield Candidate(idx, "surd", f"{P},{fam.D},{Q}", surd=s)
            idx += 1


def cf_candidates(fam: CfFamily) -> Iterator[Candidate]:
    """Prefix followed by every word over ``digit_set`` up to ``depth``, then the period."""
    free = fam.depth - len(fam.prefix)
    idx = 0
    for word in itertools.product(sorted(fam.digit_set), repeat=free):
        pre = tuple(fam.prefix) + word
        s = surd_from_cf(pre, fam.period)
        label = "[" + ",".join(map(str, pre)) + ";(" + ",".join(map(str, fam.period)) + ")]"
        yield Candidate(idx, "surd", label, surd=s)
        idx += 1


def candidates(source: Source) -> Iterator[Candidate]:
    if isinstance(source, GammaGrid):
        return grid_candidates(source)
    if isinstance(source, SurdFamily):
        return surd_candidates(source)
    if isinstance(source, CfFamily):
        return cf_candidates(source)
    raise TypeError(f"unknown scan source {source!r}")


# per-candidate work


def _mid(box) -> str:
    if box is None:
        return ""
    return f"{float((box.lo + box.hi) / 2):.10g}"


def _first_fail(cert: Certificate) -> str:
    for r in cert.checks:
        if r.verdict is not Verdict.TRUE and r.kind != "cond_a":
            return f"{r.kind}:{','.join(map(str, r.indices))}"
    if cert.outcome.status == "NotCertified":
        return cert.outcome.reason or "NotCertified"
    return ""


def _min_margin(cert: Certificate) -> str:
    margins = [r.margin for r in cert.checks if r.margin is not None and r.kind in ("direct_C", "cond_b", "cond_c")]
    if not margins:
        return ""
    return to_decimal_str(min(margins), 8, "down")


def record_from_certificate(cand: Candidate, cert: Certificate, ms: float, keep: bool = False) -> ScanRecord:
    g = cert.gamma
    return ScanRecord(
        id=cand.id,
        label=cand.label,
        gamma_lo="" if g is None else to_decimal_str(g.lo, 20, "down"),
        gamma_hi="" if g is None else to_decimal_str(g.hi, 20, "up"),
        R_mid=_mid(cert.radius),
        A_mid=_mid(cert.area),
        outcome=str(cert.outcome),
        j0=cert.j0,
        first_fail=_first_fail(cert),
        min_margin=_min_margin(cert),
        precision_bits=cert.max_precision_bits,
        ms=ms,
        certificate=certificate_to_json(cert) if keep else None,
    )


def _run_one(args: tuple[Candidate, CertifyOptions, bool]) -> ScanRecord:
    cand, options, keep = args
    t0 = time.perf_counter()
    try:
        if cand.kind == "area":
            cert = certify_area(cand.area, options)
        else:
            cert = certify_surd(cand.surd, options)
    except Exception as exc:  # recorded, never aborts the scan
        ms = (time.perf_counter() - t0) * 1000
        return ScanRecord(cand.id, cand.label, "", "", "", "", "Error", None, "", "", 0, ms, error=f"{type(exc).__name__}: {exc}")
    ms = (time.perf_counter() - t0) * 1000
    return record_from_certificate(cand, cert, ms, keep)


@dataclass
class ScanResult:
    records: list[ScanRecord]

    @property
    def summary(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.records:
            key = r.outcome.split("(")[0]
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items()))


def run_scan(job: ScanJob, keep_certificates: bool = False) -> ScanResult:
    """Certify every candidate; records come back sorted by candidate id."""
    cands = list(candidates(job.source))
    if job.limit is not None:
        cands = cands[: job.limit]
    work = [(c, job.options, keep_certificates) for c in cands]
    if job.parallel > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=job.parallel) as pool:
            records = list(pool.map(_run_one, work, chunksize=max(1, len(work) // (4 * job.parallel))))
    else:
        records = [_run_one(w) for w in work]
    records.sort(key=lambda r: r.id)
    return ScanResult(records)


# output


def to_csv(records: Sequence[ScanRecord], with_time: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row(with_time))
    return buf.getvalue()


def to_json(records: Sequence[ScanRecord]) -> str:
    out = []
    for r in records:
        d = {
            "id": r.id,
            "label": r.label,
            "gamma": {"lo": r.gamma_lo, "hi": r.gamma_hi},
            "R_mid": r.R_mid,
            "A_mid": r.A_mid,
            "outcome": r.outcome,
            "j0": r.j0,
            "first_fail": r.first_fail,
            "min_margin": r.min_margin,
            "precision_bits": r.precision_bits,
            "ms": round(r.ms, 1),
        }
        if r.error:
            d["error"] = r.error
        if r.certificate is not None:
            d["certificate"] = r.certificate
        out.append(d)
    return json.dumps(out, indent=2)


def emit(records: Sequence[ScanRecord], path: str, fmt: str = "csv") -> None:
    text = to_csv(records) if fmt == "csv" else to_json(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
