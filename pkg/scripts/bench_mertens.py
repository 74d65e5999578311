"""Time M(x) for several dense-table thresholds and cross-check every strategy.

    python scripts/bench_mertens.py --x 1e9 --threshold 1e5 --threshold 1e6
"""

import argparse
import sys

from mertens_audit.sweep import DEFAULT_BENCH_THRESHOLDS, DEFAULT_BENCH_XS, bench


def _int(text: str) -> int:
    return int(float(text)) if "e" in text.lower() else int(text)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=_int, action="append")
    ap.add_argument("--threshold", type=_int, action="append")
    ap.add_argument("--no-auto", action="store_true", help="skip the x^(2/3) default threshold")
    args = ap.parse_args()

    result = bench(
        tuple(args.x or DEFAULT_BENCH_XS),
        tuple(args.threshold or DEFAULT_BENCH_THRESHOLDS),
        include_auto=not args.no_auto,
    )
    print(result.table())
    return 0 if result.agreed else 1


if __name__ == "__main__":
    sys.exit(main())
