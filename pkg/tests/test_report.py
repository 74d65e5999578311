import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mertens_audit.report import (
    CSV_HEADER,
    ClaimRecord,
    VerificationReport,
    claim_tuples,
    format_margin,
    parse_csv_claims,
)
from mertens_audit.sweep import SweepConfig, run_sweep


@pytest.mark.parametrize(
    "value, text, exact",
    [
        (0, "0", True),
        (Fraction(1, 3), "0.333333333333", True),
        (Fraction(-2, 3), "-0.666666666666", True),
        (123456789012345, "1.23456789012E+14", True),
        (Fraction(21, 32), "0.65625", True),
        (0.25, "0.25", False),
    ],
)
def test_format_margin(value, text, exact):
    assert format_margin(value) == (text, exact)


@given(st.fractions(max_denominator=10**9))
def test_margin_truncates_toward_zero(x):
    text, exact = format_margin(x)
    assert exact
    approx = Fraction(text)
    assert abs(approx) <= abs(x)
    if x:
        assert abs(x - approx) <= abs(x) * Fraction(1, 10**11)


@pytest.fixture(scope="module")
def small_report():
    return run_sweep(SweepConfig(n_min=2, n_max=40, grid=20, timing=False, g_samples=1000))


def test_json_round_trip(small_report):
    again = VerificationReport.from_json(small_report.to_json())
    assert again == small_report


def test_json_schema(small_report):
    data = json.loads(small_report.to_json())
    assert {"version", "config", "claims"} <= set(data)
    assert data["config"]["boundary_convention"].startswith("floor")
    assert set(data["claims"][0]) == {"claim_id", "n", "lambda", "pass", "margin", "exact", "micros"}


def test_csv_matches_json(small_report):
    text = small_report.to_csv()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert claim_tuples(parse_csv_claims(text)) == claim_tuples(small_report.claims)


def test_claims_unique_and_sorted(small_report):
    assert small_report.duplicate_keys() == []
    keys = [c.sort_key() for c in small_report.claims]
    assert keys == sorted(keys)


def test_determinism_apart_from_timestamp():
    cfg = dict(n_min=90, n_max=100, grid=10, timing=False, g_samples=1000)
    a = run_sweep(SweepConfig(**cfg))
    b = run_sweep(SweepConfig(**cfg))
    a.timestamp = b.timestamp = ""
    assert a.to_json() == b.to_json()
    assert a.to_csv() == b.to_csv()


def test_threads_do_not_change_report():
    cfg = dict(n_min=2, n_max=60, grid=10, timing=False, g_samples=1000)
    a = run_sweep(SweepConfig(**cfg))
    b = run_sweep(SweepConfig(threads=3, **cfg))
    assert claim_tuples(a.claims) == claim_tuples(b.claims)
    assert [c.margin for c in a.claims] == [c.margin for c in b.claims]


def test_sweep_examples():
    assert run_sweep(SweepConfig(suites=("theorem1",), n_min=2, n_max=200, grid=50)).passed
    assert run_sweep(SweepConfig(suites=("proof",), n_min=95, n_max=500, g_samples=1000)).passed


def test_record_lambda_text():
    rec = ClaimRecord.build("x", 3, Fraction(2, 4), True, Fraction(1, 2))
    assert rec.lam == "1/2" and rec.margin == "0.5" and rec.exact
