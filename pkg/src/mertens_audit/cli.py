"""Command-line front end.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error,
3 capacity or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from mertens_audit import kernel, sieve
from mertens_audit.engine import MertensOracle, cache_load, cache_save, decode_cache, default_threshold
from mertens_audit.errors import CapacityError, CorruptCacheError, DomainError
from mertens_audit.sweep import DEFAULT_LAMBDAS, SUITES, SweepConfig, bench, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _integer(text: str) -> int:
    """Accept '1000000', '10**6' or '1e6' as long as the value is integral."""
    text = text.strip()
    try:
        if "**" in text:
            base, exp = text.split("**")
            return int(base) ** int(exp)
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--threshold", type=_integer, help="dense Mertens table ceiling")
    common.add_argument("--cache", type=Path, help="Mertens cache file")

    parser = argparse.ArgumentParser(prog="mertens-audit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", parents=[common], help="print mu, M, phi, Phi")
    p.add_argument("--n", type=_integer)
    p.add_argument("--n-min", type=_integer)
    p.add_argument("--n-max", type=_integer)

    p = sub.add_parser("mertens", parents=[common], help="compute M(x)")
    p.add_argument("--x", type=_integer, required=True)

    p = sub.add_parser("coeffs", parents=[common], help="print the coefficients d_0..d_n")
    p.add_argument("--n", type=_integer, required=True)

    p = sub.add_parser("verify", parents=[common], help="run claim suites over a range of n")
    p.add_argument("suite", choices=(*SUITES, "all"))
    p.add_argument("--n", type=_integer, help="single n (sets both ends of the range)")
    p.add_argument("--n-min", type=_integer, default=2)
    p.add_argument("--n-max", type=_integer, default=100)
    p.add_argument("--grid", type=_integer, default=kernel.DEFAULT_GRID)
    p.add_argument("--lambda", dest="lambdas", type=_rational, action="append")
    p.add_argument("--threads", type=_integer, default=1)
    p.add_argument("--exact", action="store_true", help="decide every grid point in exact arithmetic")
    p.add_argument("--no-timing", action="store_true", help="record micros as 0 for reproducible output")
    p.add_argument("--g-samples", type=_integer, default=10**6)

    p = sub.add_parser("bench", help="time M(x) across thresholds")
    p.add_argument("--out", type=Path)
    p.add_argument("--x", type=_integer, action="append")
    p.add_argument("--threshold", dest="thresholds", type=_integer, action="append")

    p = sub.add_parser("cache", parents=[common], help="manage the Mertens cache file")
    p.add_argument("action", choices=("save", "load", "info"))
    p.add_argument("--x", type=_integer, action="append", help="values to compute before saving")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def _oracle(args, x_max: int) -> MertensOracle:
    if args.cache is not None and args.cache.exists():
        oracle = cache_load(args.cache)
        if args.threshold is not None and args.threshold != oracle.threshold:
            oracle.set_threshold(args.threshold)
        return oracle
    return MertensOracle(args.threshold or default_threshold(x_max))


def _cmd_sieve(args) -> int:
    if args.n is not None:
        lo = hi = args.n
    else:
        lo, hi = args.n_min, args.n_max
        if lo is None or hi is None:
            raise DomainError("sieve needs --n or both --n-min and --n-max")
    if lo < 1 or hi < lo:
        raise DomainError(f"invalid range [{lo}, {hi}]")
    mob = sieve.build_mobius(hi)
    mert = sieve.build_mertens(mob)
    tot = sieve.build_totient(hi)
    rows = [
        {"n": n, "mu": int(mob.mu[n]), "M": int(mert.M[n]), "phi": int(tot.phi[n]), "Phi": int(tot.Phi[n])}
        for n in range(lo, hi + 1)
    ]
    if args.format == "json":
        _emit(json.dumps(rows, indent=1), args.out)
    else:
        lines = ["n,mu,M,phi,Phi"] + [f"{r['n']},{r['mu']},{r['M']},{r['phi']},{r['Phi']}" for r in rows]
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def _cmd_mertens(args) -> int:
    if args.x < 1:
        raise DomainError(f"--x must be >= 1, got {args.x}")
    oracle = _oracle(args, args.x)
    value = oracle.mertens(args.x)
    if args.cache is not None:
        cache_save(oracle, args.cache)
    _emit(str(value), args.out)
    return EXIT_OK


def _cmd_coeffs(args) -> int:
    oracle = _oracle(args, args.n)
    cv = kernel.coefficients(oracle, args.n)
    if args.format == "json":
        payload = {
            "n": cv.n,
            "d": cv.as_ints(),
            "f": cv.f[1:].tolist(),
            "provenance": [cv.provenance(j) for j in range(cv.n + 1)],
        }
        _emit(json.dumps(payload), args.out)
    else:
        lines = ["j,d,provenance"] + [f"{j},{int(cv.d[j])},{cv.provenance(j)}" for j in range(cv.n + 1)]
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.n is not None:
        args.n_min = args.n_max = args.n
    config = SweepConfig(
        suites=SUITES if args.suite == "all" else (args.suite,),
        n_min=args.n_min,
        n_max=args.n_max,
        grid=args.grid,
        lambdas=tuple(args.lambdas) if args.lambdas else DEFAULT_LAMBDAS,
        threshold=args.threshold,
        threads=args.threads,
        exact=args.exact,
        timing=not args.no_timing,
        g_samples=args.g_samples,
    )
    config.validate()
    oracle = None
    if args.cache is not None and args.cache.exists():
        oracle = cache_load(args.cache)
    report = run_sweep(config, oracle)
    _emit(report.render(args.format), args.out)
    failures = report.failures
    print(f"{len(report.claims)} claims, {len(failures)} failed", file=sys.stderr)
    for c in failures[:20]:
        print(f"FAIL {c.claim_id} n={c.n} lambda={c.lam} margin={c.margin}", file=sys.stderr)
    return EXIT_OK if not failures else EXIT_FAIL


def _cmd_bench(args) -> int:
    kwargs = {}
    if args.x:
        kwargs["xs"] = tuple(args.x)
    if args.thresholds:
        kwargs["thresholds"] = tuple(args.thresholds)
    for x in kwargs.get("xs", ()):
        if x < 1:
            raise DomainError(f"--x must be >= 1, got {x}")
    result = bench(**kwargs)
    _emit(result.table(), args.out)
    return EXIT_OK if result.agreed else EXIT_FAIL


def _cmd_cache(args) -> int:
    if args.cache is None:
        raise DomainError("cache commands need --cache PATH")
    if args.action == "info":
        threshold, memo = decode_cache(args.cache.read_bytes())
        keys = sorted(memo)
        info = {
            "threshold": threshold,
            "entries": len(keys),
            "min_x": keys[0] if keys else None,
            "max_x": keys[-1] if keys else None,
        }
        _emit(json.dumps(info), args.out)
        return EXIT_OK
    if args.action == "load":
        oracle = cache_load(args.cache)
        _emit(json.dumps({"threshold": oracle.threshold, "entries": len(oracle.memo)}), args.out)
        return EXIT_OK
    xs = args.x or []
    oracle = _oracle(args, max(xs, default=1))
    for x in xs:
        oracle.mertens(x)
    cache_save(oracle, args.cache)
    _emit(json.dumps({"threshold": oracle.threshold, "entries": len(oracle.memo)}), args.out)
    return EXIT_OK


_COMMANDS = {
    "sieve": _cmd_sieve,
    "mertens": _cmd_mertens,
    "coeffs": _cmd_coeffs,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
    "cache": _cmd_cache,
}


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, CorruptCacheError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
