import json

import pytest

from mertens_audit.cli import cli_main
from mertens_audit.report import VerificationReport, parse_csv_claims


def run(capsys, *argv):
    code = cli_main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mertens_94(capsys):
    code, out, _ = run(capsys, "mertens", "--x", "94")
    assert code == 0 and out.strip() == "1"


def test_mertens_large_with_threshold(capsys):
    code, out, _ = run(capsys, "mertens", "--x", "1e7", "--threshold", "1000")
    assert code == 0 and out.strip() == "1037"


def test_verify_theorem1_small_sweep(capsys):
    code, out, err = run(capsys, "verify", "theorem1", "--n-min", "2", "--n-max", "100", "--grid", "100")
    assert code == 0
    report = VerificationReport.from_json(out)
    assert len(report.claims) == 99 * 101 * 2
    assert "0 failed" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "theorem1", "--n-min", "0"],
        ["verify", "theorem1", "--n-min", "50", "--n-max", "10"],
        ["verify", "theorem2", "--lambda", "1"],
        ["verify", "nonsense"],
        ["bench", "--x", "abc"],
        ["mertens", "--x", "0"],
        ["mertens"],
        ["--bogus"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_capacity_error_exit_3(capsys):
    code, _, err = run(capsys, "mertens", "--x", "5", "--threshold", str(10**9))
    assert code == 3 and "ceiling" in err


def test_theorem2_failure_exit_1(capsys):
    # the strict lam^n form is an equality at n = 2
    code, out, err = run(capsys, "verify", "theorem2", "--n", "2", "--lambda", "1/2")
    assert code == 1
    claims = {c.claim_id: c for c in VerificationReport.from_json(out).claims}
    assert claims["theorem2.base"].passed
    assert not claims["theorem2.strong"].passed and claims["theorem2.strong"].margin == "0"


def test_theorem2_passes_from_n3(capsys):
    code, _, _ = run(capsys, "verify", "theorem2", "--n-min", "3", "--n-max", "60")
    assert code == 0


def test_verify_proof_csv_to_file(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(
        capsys, "verify", "proof", "--n-min", "90", "--n-max", "110", "--format", "csv",
        "--out", str(out), "--g-samples", "1000",
    )
    assert code == 0
    claims = parse_csv_claims(out.read_text())
    ids = {c.claim_id for c in claims}
    assert {"small_n.branch", "b4.four_a_gt_d", "tail.estimate", "g.function"} <= ids


def test_coeffs_and_sieve(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "5")
    assert code == 0 and json.loads(out)["d"] == [0, 0, 1, 2, 2, 1]
    code, out, _ = run(capsys, "coeffs", "--n", "5", "--format", "csv")
    assert out.splitlines()[3] == "2,1,suffix-sum"
    code, out, _ = run(capsys, "sieve", "--n", "30")
    assert json.loads(out) == [{"n": 30, "mu": -1, "M": -3, "phi": 8, "Phi": 278}]


def test_cache_commands(capsys, tmp_path):
    path = tmp_path / "m.bin"
    code, out, _ = run(capsys, "cache", "save", "--cache", str(path), "--x", "10**8", "--threshold", "10000")
    assert code == 0
    saved = json.loads(out)
    code, out, _ = run(capsys, "cache", "info", "--cache", str(path))
    info = json.loads(out)
    assert info["entries"] == saved["entries"] and info["max_x"] == 10**8 and info["threshold"] == 10000
    code, out, _ = run(capsys, "cache", "load", "--cache", str(path))
    assert code == 0
    code, out, _ = run(capsys, "mertens", "--x", "10**8", "--cache", str(path))
    assert out.strip() == "1928"
    path.write_bytes(b"garbage-garbage-garbage-garbage")
    code, _, _ = run(capsys, "cache", "load", "--cache", str(path))
    assert code == 3


def test_bench_gate(capsys):
    code, out, _ = run(capsys, "bench", "--x", "100000", "--x", "1000000",
                       "--threshold", "1000", "--threshold", "10000", "--threshold", "100000")
    assert code == 0
    assert "all strategies agree" in out
    rows = [line.split() for line in out.splitlines()[1:-1]]
    assert {r[3] for r in rows if r[0] == "1000000"} == {"212"}
    assert {r[3] for r in rows if r[0] == "100000"} == {"-48"}
