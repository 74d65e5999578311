"""Audit of the intermediate bounds behind P(lam) > 0.

Each check recomputes the quantity it bounds from Mertens values and
reports the slack.  Rational bounds are compared exactly; bounds involving
pi or log are compared in floating point via :func:`geq_float`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numba as nb
import numpy as np

from mertens_audit import sieve
from mertens_audit.engine import MertensOracle
from mertens_audit.errors import CapacityError, DomainError
from mertens_audit.kernel import CoefficientVector, coefficients, quotient_values

# First n handled by the general argument; 2..SMALL_N_MAX use the B_k argument.
LARGE_N_START = 95
SMALL_N_MAX = 94
# Mertens values M(2..93) are all <= 0.
NONPOSITIVE_MERTENS_MAX = 93

EULER_GAMMA = 0.5772156649015329
TAIL_CONSTANT = Fraction(342, 1000)
G_SLACK = 1e-12


def geq_float(lhs: int, rhs: float) -> bool:
    """Integer lhs >= float rhs, demanding one unit of room when rhs sits near an integer."""
    if abs(rhs - round(rhs)) < 1e-6:
        return lhs >= rhs + 1
    return lhs >= rhs


# -- partition A/B/C/D -------------------------------------------------------


@dataclass(frozen=True)
class PartitionSummary:
    n: int
    boundaries: tuple[int, int]  # (n // 2, 9n // 10)
    sizes: tuple[int, int, int, int]
    a: int
    b: int
    c: int
    d: int  # sum of |d_j| over D

    @property
    def total(self) -> int:
        return self.a + self.b + self.c - self.d


def partition_sums(
    oracle: MertensOracle, n: int, cv: CoefficientVector | None = None
) -> PartitionSummary:
    """Split 1..n-1 at n // 2 and 9n // 10; the top part splits further by the sign of d_j."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    cv = coefficients(oracle, n) if cv is None else cv
    half, ninety = n // 2, (9 * n) // 10
    d = cv.d
    top = d[ninety + 1 : n]
    A = d[1 : half + 1]
    B = d[half + 1 : min(ninety, n - 1) + 1]
    C = top[top >= 0]
    D = top[top < 0]
    return PartitionSummary(
        n=n,
        boundaries=(half, ninety),
        sizes=(len(A), len(B), len(C), len(D)),
        a=int(A.sum()),
        b=int(B.sum()),
        c=int(C.sum()),
        d=int(-D.sum()),
    )


@dataclass(frozen=True)
class B4Check:
    n: int
    sum_positive: bool  # a + b + c - d > 0
    four_a_gt_d: bool
    sum_margin: int
    four_a_margin: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.sum_positive and self.four_a_gt_d


def check_b4(
    oracle: MertensOracle, n: int, part: PartitionSummary | None = None
) -> B4Check:
    part = partition_sums(oracle, n) if part is None else part
    note = ""
    if n < LARGE_N_START:
        note = f"n={n} lies in the small-n branch; b4 is only claimed for n >= {LARGE_N_START}"
    return B4Check(
        n=n,
        sum_positive=part.total > 0,
        four_a_gt_d=4 * part.a > part.d,
        sum_margin=part.total,
        four_a_margin=4 * part.a - part.d,
        note=note,
    )


def a_lower_margin(part: PartitionSummary) -> Fraction:
    """a - (n^2 - 4n + 3) / 8."""
    n = part.n
    return part.a - Fraction(n * n - 4 * n + 3, 8)


# -- S1 - S2 - S3 ------------------------------------------------------------


@dataclass(frozen=True)
class SumDecomposition:
    m: int
    S1: int
    S2: int
    S3: int
    Phi: int
    phi_identity: bool  # S1 == Phi(m)
    s2_ok: bool  # S2 == M(m) <= m
    s3_ok: bool  # S3 <= m log m

    @property
    def total(self) -> int:
        return self.S1 - self.S2 - self.S3

    @property
    def passed(self) -> bool:
        return self.phi_identity and self.s2_ok and self.s3_ok


def sum_decomposition(
    oracle: MertensOracle, m: int, totients: sieve.TotientTable | None = None
) -> SumDecomposition:
    """S1 = sum r f(r), S2 = f(1), S3 = sum_{r>=2} f(r) with f(r) = M(m // r)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if totients is None:
        totients = sieve.build_totient(m)
    elif m > totients.limit:
        raise CapacityError(f"m={m} exceeds totient table limit {totients.limit}")
    f = quotient_values(oracle, m)
    r = np.arange(m + 1, dtype=np.int64)
    S1 = int((r * f).sum())
    S2 = int(f[1])
    S3 = int(f[2:].sum())
    Phi = int(totients.Phi[m])
    return SumDecomposition(
        m=m,
        S1=S1,
        S2=S2,
        S3=S3,
        Phi=Phi,
        phi_identity=S1 == Phi,
        s2_ok=S2 == oracle.mertens(m) and S2 <= m,
        s3_ok=S3 <= m * math.log(m),
    )


@nb.njit(cache=True, nogil=True)
def decomposition_sweep(M, m_max):
    """S1, S2, S3 for every m in 1..m_max using constant-quotient blocks."""
    S1 = np.zeros(m_max + 1, dtype=np.int64)
    S2 = np.zeros(m_max + 1, dtype=np.int64)
    S3 = np.zeros(m_max + 1, dtype=np.int64)
    for m in range(1, m_max + 1):
        s1 = 0
        s3 = 0
        r = 1
        while r <= m:
            q = m // r
            r_end = m // q
            width = r_end - r + 1
            s1 += (r + r_end) * width // 2 * M[q]
            if r == 1:
                s3 += (width - 1) * M[q]
            else:
                s3 += width * M[q]
            r = r_end + 1
        S1[m] = s1
        S2[m] = M[m]
        S3[m] = s3
    return S1, S2, S3


def sum_lower_bound(m: int) -> float:
    """3m^2/pi^2 - (3/2) m log m - 2m."""
    return 3 * m * m / math.pi**2 - 1.5 * m * math.log(m) - 2 * m


# -- totient summatory bound -------------------------------------------------


@dataclass(frozen=True)
class TotientBoundCheck:
    m: int
    passed: bool
    margin: float
    sharper_passed: bool
    sharper_margin: float


def totient_lower(m: int) -> float:
    return 3 * m * m / math.pi**2 - 0.5 * m * math.log(m) - m


def totient_lower_sharper(m: int) -> float:
    return 3 * m * m / math.pi**2 - 0.5 * m * math.log(m) - (EULER_GAMMA / 2 + 5 / 8) * m - 1


def check_totient_bound(m: int, totients: sieve.TotientTable | None = None) -> TotientBoundCheck:
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    totients = sieve.build_totient(m) if totients is None else totients
    Phi = int(totients.Phi[m])
    rhs = totient_lower(m)
    sharp = totient_lower_sharper(m)
    return TotientBoundCheck(m, geq_float(Phi, rhs), Phi - rhs, geq_float(Phi, sharp), Phi - sharp)


# -- tail of negative coefficients -------------------------------------------


@dataclass(frozen=True)
class TailCheck:
    n: int
    passed: bool
    d: int
    ratio: float  # d / n^2
    log_bound_margin: float  # (n^2/10)(log(950/85) + 1) - d
    constant_margin: Fraction  # 0.342 n^2 - d


def tail_log_constant() -> float:
    return math.log(950 / 85) + 1


def check_tail_estimate(
    oracle: MertensOracle, n: int, part: PartitionSummary | None = None
) -> TailCheck:
    part = partition_sums(oracle, n) if part is None else part
    d = part.d
    log_bound = n * n / 10 * tail_log_constant()
    const_margin = TAIL_CONSTANT * n * n - d
    passed = d <= log_bound and const_margin >= 0
    return TailCheck(n, passed, d, d / (n * n), log_bound - d, const_margin)


def check_tail_chain(part: PartitionSummary) -> tuple[bool, Fraction]:
    """(n^2/10)(log(950/85)+1) <= 0.342 n^2 < (n^2-4n+3)/2 <= 4a; margin is 4a - 0.342 n^2."""
    n = part.n
    const_ok = tail_log_constant() <= 10 * TAIL_CONSTANT
    half_quad = Fraction(n * n - 4 * n + 3, 2)
    ok = const_ok and TAIL_CONSTANT * n * n < half_quad <= 4 * part.a
    return ok, 4 * part.a - TAIL_CONSTANT * n * n


# -- coefficient-level bounds ------------------------------------------------


def linear_window_end(n: int) -> int:
    return n - (n - 1) // 2


def check_linear_window(cv: CoefficientVector) -> bool:
    """d_j == j - 1 for 2 <= j <= n - (n-1)//2."""
    hi = linear_window_end(cv.n)
    j = np.arange(2, hi + 1)
    return bool(np.array_equal(cv.d[2 : hi + 1], j - 1))


@nb.njit(cache=True, nogil=True)
def linear_window_sweep(M, n_max):
    """First n in 2..n_max whose window d_j == j - 1 fails, else 0.

    d_j is accumulated directly as f(n-1) + ... + f(n-j+1).
    """
    for n in range(2, n_max + 1):
        m = n - 1
        hi = n - m // 2
        s = 0
        for j in range(2, hi + 1):
            s += M[m // (n - j + 1)]
            if s != j - 1:
                return n
    return 0


def nonnegative_window_end(n: int) -> int:
    return n - (n - 1) // 10


def check_nonnegative_window(cv: CoefficientVector) -> tuple[bool, int]:
    """d_j >= 0 for 0 <= j <= n - (n-1)//10; returns (ok, min d_j in the window)."""
    window = cv.d[: nonnegative_window_end(cv.n) + 1]
    low = int(window.min())
    return low >= 0, low


@dataclass(frozen=True)
class ChainCheck:
    n: int
    fifth_applies: bool  # n >= 4
    fifth_margin: Fraction  # d_{n - (n-1)//5} - (11n - 35)/30
    tenth_applies: bool  # n >= 28
    tenth_margin: Fraction  # d_{n - (n-1)//10} - (40n - 1116)/210

    @property
    def passed(self) -> bool:
        ok5 = not self.fifth_applies or self.fifth_margin >= 0
        ok10 = not self.tenth_applies or self.tenth_margin >= 0
        return ok5 and ok10


def check_chain_bounds(cv: CoefficientVector) -> ChainCheck:
    n = cv.n
    j5 = n - (n - 1) // 5
    j10 = n - (n - 1) // 10
    fifth = int(cv.d[j5]) - Fraction(11 * n - 35, 30)
    tenth = int(cv.d[j10]) - Fraction(40 * n - 1116, 210)
    return ChainCheck(n, n >= 4, fifth, n >= 28, tenth)


# -- g(x) = 1 - 4 x^(4/5) + 3x ----------------------------------------------


def g(x):
    return 1 - 4 * np.power(x, 0.8) + 3 * x


def g_prime(x):
    return -3.2 * np.power(x, -0.2) + 3


@dataclass(frozen=True)
class GCheck:
    samples: int
    endpoints: bool
    g_positive: bool
    g_decreasing: bool
    min_g: float
    max_g_prime: float
    power_form: bool  # lam^(n/2) + 3 lam^n - 4 lam^(9n/10) >= 0 on the grid
    power_form_min: float

    @property
    def passed(self) -> bool:
        return self.endpoints and self.g_positive and self.g_decreasing and self.power_form


def _g_exact_endpoint(x: int) -> Fraction:
    # x**(4/5) == x for x in {0, 1}
    return 1 - 4 * Fraction(x) + 3 * Fraction(x)


def check_g(
    samples: int,
    n_values: tuple[int, ...] = (95, 100, 1000, 10000),
    lam_grid: int = 1000,
    chunk: int = 1 << 20,
) -> GCheck:
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    endpoints = _g_exact_endpoint(0) == 1 and _g_exact_endpoint(1) == 0
    min_g = math.inf
    max_gp = -math.inf
    for start in range(1, samples + 1, chunk):
        i = np.arange(start, min(start + chunk, samples + 1), dtype=np.float64)
        x = i / (samples + 1)
        min_g = min(min_g, float(g(x).min()))
        max_gp = max(max_gp, float(g_prime(x).max()))

    lam = np.arange(1, lam_grid, dtype=np.float64) / lam_grid
    pf_min = math.inf
    pf_ok = True
    for n in n_values:
        t1, t2, t3 = lam ** (n / 2), lam**n, lam ** (0.9 * n)
        h = t1 + 3 * t2 - 4 * t3
        tol = 8 * np.finfo(float).eps * (t1 + 3 * t2 + 4 * t3)
        pf_ok &= bool((h >= -tol).all())
        pf_min = min(pf_min, float(h.min()))
        # lam = 1 is exact: 1 + 3 - 4
    return GCheck(
        samples=samples,
        endpoints=endpoints,
        g_positive=min_g > G_SLACK,
        g_decreasing=max_gp < -G_SLACK,
        min_g=min_g,
        max_g_prime=max_gp,
        power_form=pf_ok,
        power_form_min=pf_min,
    )


# -- small-n branch ----------------------------------------------------------


@dataclass(frozen=True)
class SmallNCheck:
    n: int
    top_half_ones: bool  # M(m // k) == 1 for m//2 < k <= m
    signs: bool  # M(j) <= 0 for 2 <= j <= 93
    monotone: bool  # B_k strictly decreasing at every sampled lam
    chain: bool  # the three-line chain down to B_0 - B_{m//2+1} > 0
    min_margin: Fraction  # smallest B_0 - B_{m//2+1} seen

    @property
    def passed(self) -> bool:
        return self.top_half_ones and self.signs and self.monotone and self.chain


DEFAULT_SMALL_N_LAMBDAS = tuple(Fraction(i, 20) for i in range(1, 21))


def check_small_n(
    oracle: MertensOracle, n: int, lambdas: tuple[Fraction, ...] = DEFAULT_SMALL_N_LAMBDAS
) -> SmallNCheck:
    if not 2 <= n <= SMALL_N_MAX:
        raise DomainError(f"small-n branch covers 2 <= n <= {SMALL_N_MAX}, got {n}")
    m = n - 1
    half = m // 2
    Mq = [0] + [oracle.mertens(m // k) for k in range(1, m + 1)]
    top_half = all(Mq[k] == 1 for k in range(half + 1, m + 1))
    signs = all(oracle.mertens(j) <= 0 for j in range(2, NONPOSITIVE_MERTENS_MAX + 1))
    # relies on M(m//k) <= 0 whenever 2 <= m//k
    lower_nonpositive = all(Mq[k] <= 0 for k in range(1, half + 1))

    monotone = True
    chain = True
    min_margin = None
    for lam in lambdas:
        if not 0 < lam <= 1:
            raise DomainError(f"sampled lambda must lie in (0, 1], got {lam}")
        # B[k] = sum_{j=0}^{m+1-k} lam^j for k = 0..m+1
        powers = [Fraction(1)]
        for _ in range(m + 1):
            powers.append(powers[-1] * lam)
        B = [Fraction(0)] * (m + 2)
        acc = Fraction(0)
        for k in range(m + 1, -1, -1):
            acc += powers[m + 1 - k]
            B[k] = acc
        monotone &= all(B[k] > B[k + 1] for k in range(m + 1))
        lhs = B[0] - sum(Mq[k] * B[k] for k in range(1, m + 1))
        rearranged = (
            B[0]
            + sum(abs(Mq[k]) * B[k] for k in range(1, half + 1))
            - sum(B[k] for k in range(half + 1, m + 1))
        )
        mertens_sum = sum(Mq[1:])
        middle = B[0] - mertens_sum * B[half + 1]
        margin = B[0] - B[half + 1]
        chain &= (
            lower_nonpositive
            and lhs == rearranged
            and lhs >= middle
            and mertens_sum == 1
            and margin > 0
        )
        min_margin = margin if min_margin is None else min(min_margin, margin)
    return SmallNCheck(n, top_half, signs, monotone, chain, min_margin)


# -- how far below the large-n branch each bound survives --------------------


def bound_extents(oracle: MertensOracle, start: int = LARGE_N_START) -> dict[str, int]:
    """For each large-n bound, the smallest n0 with the bound holding on all of n0..start.

    Informational only: these ranges are not claimed by the argument being audited.
    """
    checks = {
        "b4.sum_positive": lambda n, p, cv: p.total > 0,
        "b4.four_a_gt_d": lambda n, p, cv: 4 * p.a > p.d,
        "bound.a_lower": lambda n, p, cv: a_lower_margin(p) >= 0,
        "tail.constant": lambda n, p, cv: TAIL_CONSTANT * n * n >= p.d,
        "bound.sum_lower": lambda n, p, cv: p.total >= sum_lower_bound(n - 1) and sum_lower_bound(n - 1) > 0,
    }
    extents: dict[str, int] = {}
    for name, test in checks.items():
        n0 = start
        while n0 > 2:
            n = n0 - 1
            cv = coefficients(oracle, n)
            if not test(n, partition_sums(oracle, n, cv), cv):
                break
            n0 = n
        extents[name] = n0
    return extents
