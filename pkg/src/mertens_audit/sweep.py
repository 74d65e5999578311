"""Claim suites over ranges of n, and the engine benchmark."""

from __future__ import annotations

import datetime as _dt
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from mertens_audit import audit, kernel, sieve
from mertens_audit.engine import MertensOracle, default_threshold
from mertens_audit.errors import CapacityError, DomainError
from mertens_audit.report import ClaimRecord, VerificationReport

SUITES = ("theorem1", "theorem2", "proof")
DEFAULT_LAMBDAS = tuple(Fraction(s) for s in ("1/10", "1/3", "1/2", "2/3", "9/10", "99/100"))
# expand_direct is quadratic; above this n only the complement form is cross-checked
DIRECT_EXPANSION_MAX = 2000
BOUNDARY_CONVENTION = "floor: A = 1..n//2, B = n//2+1..9n//10, C/D = 9n//10+1..n-1"


@dataclass
class SweepConfig:
    suites: tuple[str, ...] = SUITES
    n_min: int = 2
    n_max: int = 100
    grid: int = kernel.DEFAULT_GRID
    lambdas: tuple[Fraction, ...] = DEFAULT_LAMBDAS
    threshold: int | None = None
    threads: int = 1
    exact: bool = False
    timing: bool = True
    g_samples: int = 10**6

    def validate(self) -> None:
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise DomainError(f"unknown suites: {sorted(unknown)}")
        if self.n_min < 2 or self.n_max < self.n_min:
            raise DomainError(f"invalid n-range [{self.n_min}, {self.n_max}]; need 2 <= n-min <= n-max")
        if self.grid < 1:
            raise DomainError(f"grid must be >= 1, got {self.grid}")
        if self.threads < 1:
            raise DomainError(f"threads must be >= 1, got {self.threads}")
        for lam in self.lambdas:
            if not 0 < lam < 1:
                raise DomainError(f"lambda {lam} outside (0, 1)")

    def echo(self) -> dict:
        out = asdict(self)
        out["suites"] = list(self.suites)
        out["lambdas"] = [f"{x.numerator}/{x.denominator}" for x in self.lambdas]
        out["boundary_convention"] = BOUNDARY_CONVENTION
        return out


@dataclass
class _Context:
    oracle: MertensOracle
    totients: sieve.TotientTable | None
    config: SweepConfig


def _micros(start: float, config: SweepConfig, share: int = 1) -> int:
    if not config.timing:
        return 0
    return int((time.perf_counter() - start) * 1e6 / share)


def theorem1_records(ctx: _Context, n: int) -> list[ClaimRecord]:
    cfg = ctx.config
    t0 = time.perf_counter()
    check = kernel.verify_theorem1(ctx.oracle, n, cfg.grid, exact=cfg.exact)
    us = _micros(t0, cfg, cfg.grid + 1)
    out = []
    for i in range(cfg.grid + 1):
        lam = check.lam(i)
        out.append(ClaimRecord.build("theorem1.nonneg", n, lam, check.theorem1[i], check.theorem1_margin[i], us))
        out.append(ClaimRecord.build("theorem1.top_power", n, lam, check.top_power[i], check.top_power_margin[i], us))
    return out


def theorem2_records(ctx: _Context, n: int) -> list[ClaimRecord]:
    cfg = ctx.config
    cv = kernel.coefficients(ctx.oracle, n)
    out = []
    for lam in cfg.lambdas:
        t0 = time.perf_counter()
        res = kernel.verify_theorem2(ctx.oracle, n, lam, cv=cv)
        us = _micros(t0, cfg)
        out.append(ClaimRecord.build("theorem2.base", n, lam, res.base, res.base_margin, us))
        out.append(ClaimRecord.build("theorem2.strong", n, lam, res.strengthened, res.strengthened_margin, us))
        t0 = time.perf_counter()
        ok = kernel.bridge_identity(cv, lam)
        out.append(ClaimRecord.build("bridge.identity", n, lam, ok, 0, _micros(t0, cfg)))
    return out


def proof_records(ctx: _Context, n: int) -> list[ClaimRecord]:
    cfg = ctx.config
    oracle = ctx.oracle
    out: list[ClaimRecord] = []

    def add(claim_id, passed, margin, t0):
        out.append(ClaimRecord.build(claim_id, n, None, passed, margin, _micros(t0, cfg)))

    t0 = time.perf_counter()
    cv = kernel.coefficients(oracle, n)
    diff = int(abs(kernel.complement_form(cv) - cv.d).max())
    add("coeff.complement", diff == 0, diff, t0)
    if n <= DIRECT_EXPANSION_MAX:
        t0 = time.perf_counter()
        direct = kernel.expand_direct(oracle, n)
        diff = int(abs(direct.d - cv.d).max())
        add("coeff.definition", diff == 0, diff, t0)
    t0 = time.perf_counter()
    add("coeff.linear_window", audit.check_linear_window(cv), 0, t0)
    if n >= 28:
        t0 = time.perf_counter()
        ok, low = audit.check_nonnegative_window(cv)
        add("coeff.nonneg_window", ok, low, t0)
    t0 = time.perf_counter()
    chain = audit.check_chain_bounds(cv)
    if chain.fifth_applies:
        add("chain.fifth", chain.fifth_margin >= 0, chain.fifth_margin, t0)
    if chain.tenth_applies:
        add("chain.tenth", chain.tenth_margin >= 0, chain.tenth_margin, t0)

    t0 = time.perf_counter()
    part = audit.partition_sums(oracle, n, cv)
    dec = audit.sum_decomposition(oracle, n - 1, ctx.totients)
    total = int(cv.d[1:n].sum())
    add("partition.identity", part.total == total == dec.total, part.total - dec.total, t0)
    add("decomp.phi_identity", dec.phi_identity, dec.S1 - dec.Phi, t0)
    add("decomp.s2", dec.s2_ok, n - 1 - dec.S2, t0)
    add("decomp.s3", dec.s3_ok, (n - 1) * math.log(n - 1) - dec.S3, t0)

    if n <= audit.SMALL_N_MAX:
        t0 = time.perf_counter()
        small = audit.check_small_n(oracle, n)
        add("small_n.branch", small.passed, small.min_margin, t0)
    else:
        m = n - 1
        t0 = time.perf_counter()
        tb = audit.check_totient_bound(m, ctx.totients)
        add("totient.bound", tb.passed, tb.margin, t0)
        add("totient.sharper", tb.sharper_passed, tb.sharper_margin, t0)
        t0 = time.perf_counter()
        b4 = audit.check_b4(oracle, n, part)
        add("b4.sum_positive", b4.sum_positive, b4.sum_margin, t0)
        add("b4.four_a_gt_d", b4.four_a_gt_d, b4.four_a_margin, t0)
        a_margin = audit.a_lower_margin(part)
        add("bound.a_lower", a_margin >= 0, a_margin, t0)
        lower = audit.sum_lower_bound(m)
        add("bound.sum_lower", audit.geq_float(total, lower) and lower > 0, total - lower, t0)
        t0 = time.perf_counter()
        tail = audit.check_tail_estimate(oracle, n, part)
        add("tail.estimate", tail.passed, tail.constant_margin, t0)
        chain_ok, chain_margin = audit.check_tail_chain(part)
        add("tail.chain", chain_ok, chain_margin, t0)
    return out


_SUITE_FUNCS = {"theorem1": theorem1_records, "theorem2": theorem2_records, "proof": proof_records}


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def make_oracle(config: SweepConfig) -> MertensOracle:
    t = config.threshold
    if t is None:
        t = max(default_threshold(config.n_max), config.n_max)
    return MertensOracle(t)


def run_sweep(config: SweepConfig, oracle: MertensOracle | None = None) -> VerificationReport:
    """Run the selected suites over n_min..n_max; records come back sorted by (claim, n, lambda)."""
    from mertens_audit import __version__

    config.validate()
    oracle = make_oracle(config) if oracle is None else oracle
    totients = sieve.build_totient(config.n_max) if "proof" in config.suites else None
    ctx = _Context(oracle, totients, config)

    def work(n: int) -> list[ClaimRecord]:
        recs: list[ClaimRecord] = []
        for suite in config.suites:
            recs.extend(_SUITE_FUNCS[suite](ctx, n))
        return recs

    ns = range(config.n_min, config.n_max + 1)
    report = VerificationReport(__version__, _now(), config.echo())
    if config.threads == 1:
        for n in ns:
            report.claims.extend(work(n))
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            for recs in pool.map(work, ns):
                report.claims.extend(recs)

    if "proof" in config.suites:
        t0 = time.perf_counter()
        gc = audit.check_g(config.g_samples)
        report.claims.append(ClaimRecord.build("g.function", None, None, gc.passed, gc.min_g, _micros(t0, config)))
        if config.n_min <= audit.LARGE_N_START <= config.n_max + 1:
            for name, n0 in audit.bound_extents(oracle).items():
                report.notes.append(
                    f"{name}: holds for every n in [{n0}, {audit.LARGE_N_START}] (informational)"
                )
    report.sort()
    return report


@dataclass
class BenchRow:
    x: int
    strategy: str
    threshold: int | None
    value: int
    seconds: float


@dataclass
class BenchResult:
    rows: list[BenchRow] = field(default_factory=list)
    agreed: bool = True
    disagreements: list[int] = field(default_factory=list)

    def table(self) -> str:
        lines = [f"{'x':>12} {'strategy':>10} {'threshold':>10} {'M(x)':>10} {'seconds':>10}"]
        for r in self.rows:
            t = "-" if r.threshold is None else str(r.threshold)
            lines.append(f"{r.x:>12} {r.strategy:>10} {t:>10} {r.value:>10} {r.seconds:>10.4f}")
        lines.append("all strategies agree" if self.agreed else f"DISAGREEMENT at x = {self.disagreements}")
        return "\n".join(lines)


DEFAULT_BENCH_XS = (10**6, 10**7, 10**8, 10**9)
DEFAULT_BENCH_THRESHOLDS = (10**3, 10**4, 10**5)
# dense sieve joins the cross-check for x up to this size
DENSE_BENCH_MAX = 10**7


def bench(
    xs: tuple[int, ...] = DEFAULT_BENCH_XS,
    thresholds: tuple[int, ...] = DEFAULT_BENCH_THRESHOLDS,
    *,
    include_auto: bool = True,
    dense_max: int = DENSE_BENCH_MAX,
) -> BenchResult:
    """Time M(x) per threshold and refuse to report unless every strategy agrees."""
    result = BenchResult()
    for x in xs:
        if x < 1:
            raise DomainError(f"benchmark x must be >= 1, got {x}")
        ts = set(thresholds)
        if include_auto:
            ts.add(default_threshold(x))
        values = []
        for t in sorted(ts):
            if t > sieve.MEMORY_CEILING or x // (t + 1) > sieve.MEMORY_CEILING:
                raise CapacityError(f"threshold {t} infeasible for x = {x}")
            t0 = time.perf_counter()
            oracle = MertensOracle(t)
            value = oracle.mertens(x)
            result.rows.append(BenchRow(x, "recursive", t, value, time.perf_counter() - t0))
            values.append(value)
        if x <= dense_max:
            t0 = time.perf_counter()
            value = int(sieve.build_mertens(sieve.build_mobius(x)).M[x])
            result.rows.append(BenchRow(x, "sieve", None, value, time.perf_counter() - t0))
            values.append(value)
        if len(set(values)) != 1:
            result.agreed = False
            result.disagreements.append(x)
    return result
