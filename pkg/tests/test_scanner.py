from __future__ import annotations

import csv
import io
import json
import warnings
from fractions import Fraction

import pytest

from sectioncert.certifier import CertifyOptions
from sectioncert.cfrac import cf_expand_surd
from sectioncert.scanner import (
    CSV_COLUMNS,
    CfFamily,
    GammaGrid,
    ScanJob,
    SurdFamily,
    area_for_gamma,
    candidates,
    emit,
    run_scan,
    to_csv,
    to_json,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        GammaGrid(0.3, 0.4, 10)
    with pytest.raises(ValueError):
        GammaGrid(0.4, 0.5, 10)
    with pytest.raises(ValueError):
        GammaGrid(0.4, 0.45, 0)


def test_area_for_gamma_is_exact_decimal():
    # (4/3) pi tan(0.4 pi)^3 = 122.11260433490750... from a 40-digit mpmath evaluation
    assert area_for_gamma(0.4, 12) == Fraction("122.112604335")
    assert area_for_gamma(0.4, 6) == Fraction("122.113")


def test_surd_family_contains_known_members():
    cands = list(candidates(SurdFamily(2, (14, 14))))
    labels = [c.label for c in cands]
    assert "4,2,14" in labels
    assert all(0.35 < float(c.surd) < 0.5 for c in cands)
    keys = [(c.surd.P, c.surd.D, c.surd.Q) for c in candidates(SurdFamily(2, (10, 40)))]
    assert len(keys) == len(set(keys))


def test_cf_family_reexpands_to_its_label():
    fam = CfFamily((0, 2, 1, 1), (2, 4), 6, (2,))
    cands = list(candidates(fam))
    assert len(cands) == 4
    for c in cands:
        pre = [int(t) for t in c.label[1:].split(";")[0].split(",")]
        digits = cf_expand_surd(c.surd).digits(12)
        assert digits[: len(pre)] == pre
        assert all(d == 2 for d in digits[len(pre):])


def test_cf_family_warns_on_odd_digits():
    with pytest.warns(UserWarning):
        CfFamily((0, 2, 1, 1), (3,), 6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        CfFamily((0, 2, 1, 1), (2, 4, 6), 6)


def test_surd_scan_finds_members():
    result = run_scan(ScanJob(SurdFamily(2, (14, 14))))
    by_label = {r.label: r for r in result.records}
    rec = by_label["4,2,14"]
    assert rec.outcome == "MemberOfA"
    assert rec.j0 == 4
    assert rec.first_fail == ""
    assert abs(float(rec.R_mid) - 2.87037194353) < 1e-9
    assert [r.id for r in result.records] == sorted(r.id for r in result.records)


def test_failure_is_recorded():
    # gamma near 2/5 fails the first direct check
    result = run_scan(ScanJob(GammaGrid(0.4, 0.4, 1), CertifyOptions(depth=50)))
    (rec,) = result.records
    assert rec.outcome.startswith("NotCertified")
    assert rec.first_fail.startswith("direct_C:")
    assert rec.failed and not rec.certified


def test_csv_and_json_shapes(tmp_path):
    result = run_scan(ScanJob(GammaGrid(0.42, 0.44, 3), CertifyOptions(depth=40)))
    text = to_csv(result.records)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 4
    doc = json.loads(to_json(result.records))
    assert [d["id"] for d in doc] == [0, 1, 2]
    path = tmp_path / "out.csv"
    emit(result.records, str(path))
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_empty_scan_writes_header_only():
    result = run_scan(ScanJob(SurdFamily(2, (14, 14)), limit=0))
    assert result.records == []
    assert to_csv(result.records) == ",".join(CSV_COLUMNS) + "\n"


def test_scan_is_deterministic_and_parallel_invariant():
    job = ScanJob(GammaGrid(0.40, 0.45, 6), CertifyOptions(depth=60))
    a = to_csv(run_scan(job).records, with_time=False)
    b = to_csv(run_scan(job).records, with_time=False)
    job.parallel = 2
    c = to_csv(run_scan(job).records, with_time=False)
    assert a == b == c


def test_errors_do_not_abort(monkeypatch):
    from sectioncert import scanner

    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(scanner, "certify_surd", boom)
    result = run_scan(ScanJob(SurdFamily(2, (14, 14))))
    assert result.records
    assert all(r.outcome == "Error" and "boom" in r.error for r in result.records)
