"""Run every claim suite over a range of n and write JSON and CSV reports.

    python scripts/run_full_verification.py --n-max 2000 --out-dir results/
"""

import argparse
import sys
import time
from pathlib import Path

from mertens_audit.sweep import SUITES, SweepConfig, run_sweep


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=2)
    ap.add_argument("--n-max", type=int, default=2000)
    ap.add_argument("--grid", type=int, default=1000)
    ap.add_argument("--suite", action="append", choices=SUITES)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--exact", action="store_true")
    ap.add_argument("--no-timing", action="store_true")
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()

    config = SweepConfig(
        suites=tuple(args.suite) if args.suite else SUITES,
        n_min=args.n_min,
        n_max=args.n_max,
        grid=args.grid,
        threads=args.threads,
        exact=args.exact,
        timing=not args.no_timing,
    )
    t0 = time.perf_counter()
    report = run_sweep(config)
    elapsed = time.perf_counter() - t0

    args.out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"report_n{args.n_min}-{args.n_max}"
    (args.out_dir / f"{stem}.json").write_text(report.to_json())
    (args.out_dir / f"{stem}.csv").write_text(report.to_csv())

    by_claim: dict[str, list[int]] = {}
    for c in report.claims:
        tally = by_claim.setdefault(c.claim_id, [0, 0])
        tally[0 if c.passed else 1] += 1
    for claim_id, (ok, bad) in sorted(by_claim.items()):
        print(f"{claim_id:24s} {ok:9d} pass {bad:6d} fail")
    for note in report.notes:
        print(f"note: {note}")
    print(f"{len(report.claims)} records in {elapsed:.1f}s -> {args.out_dir}/{stem}.{{json,csv}}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
