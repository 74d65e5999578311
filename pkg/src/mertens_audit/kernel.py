"""Coefficients d_j of the Mertens polynomial and the inequalities built on it.

For n >= 2 and m = n - 1 write f(r) = M(m // r).  The polynomial

    P(lam) = sum_{j=0}^{n} lam**j - sum_{k=1}^{n-1} f(k) sum_{j=0}^{n-k} lam**j
           = sum_{j=0}^{n} d_j lam**j

has d_0 = 0, d_n = 1 and d_j = f(n-j+1) + ... + f(n-1) otherwise.  The
claims checked here are P(lam) >= 0 with equality only at lam = 0,
P(lam) >= lam**n, and the equivalent form obtained by multiplying
through by 1 - lam:

    sum_{k=1}^{n-1} f(k) lam**(n-k+1) > lam**(n+1)    for 0 < lam < 1.

Exact evaluation is authoritative.  The float path is compensated Horner
with an error bound, and any sign it cannot certify is re-decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numba as nb
import numpy as np

from mertens_audit.engine import MertensOracle
from mertens_audit.errors import DomainError

# d_j is bounded by sum_{r>=2} m/r = O(n log n); float evaluation treats
# coefficients as exact doubles, so they must stay below 2**53.
_MAX_EXACT_FLOAT = 2**53

DEFAULT_GRID = 1000


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    n: int
    d: np.ndarray  # int64, indices 0..n
    f: np.ndarray  # int64, indices 1..n-1 (f[0] is padding)
    method: str = "suffix-sum"

    @property
    def m(self) -> int:
        return self.n - 1

    def provenance(self, j: int) -> str:
        if j == 0 or j == self.n:
            return "fixed"
        return self.method

    def same_as(self, other: CoefficientVector) -> bool:
        return self.n == other.n and np.array_equal(self.d, other.d)

    def as_ints(self) -> list[int]:
        return self.d.tolist()


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse 'p/q', an integer, or a decimal string into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc


def _check_n(n: int) -> None:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")


def _check_unit_interval(lam: Fraction) -> None:
    if not 0 <= lam <= 1:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")


def quotient_values(oracle: MertensOracle, m: int) -> np.ndarray:
    """Array f with f[r] = M(m // r) for r = 1..m (f[0] = 0)."""
    f = np.zeros(m + 1, dtype=np.int64)
    if m == 0:
        return f
    r = np.arange(1, m + 1, dtype=np.int64)
    q = m // r
    low = q <= oracle.threshold
    f[1:][low] = oracle.dense.M[q[low]]
    for idx in np.flatnonzero(~low):
        f[idx + 1] = oracle.mertens(int(q[idx]))
    return f


def coefficients(oracle: MertensOracle, n: int) -> CoefficientVector:
    """d_0..d_n via suffix sums of f, one O(n) pass."""
    _check_n(n)
    f = quotient_values(oracle, n - 1)
    suffix = np.zeros(n + 1, dtype=np.int64)
    # suffix[r] = f[r] + ... + f[n-1]
    suffix[1:n] = np.cumsum(f[1:n][::-1])[::-1]
    d = np.zeros(n + 1, dtype=np.int64)
    d[1:n] = suffix[n:1:-1]  # d_j = suffix[n - j + 1]
    d[n] = 1
    assert np.abs(d).max() < _MAX_EXACT_FLOAT
    f.flags.writeable = False
    d.flags.writeable = False
    return CoefficientVector(n, d, f)


def expand_direct(oracle: MertensOracle, n: int) -> CoefficientVector:
    """Expand the defining double sum term by term; independent of the suffix-sum formula."""
    _check_n(n)
    m = n - 1
    d = np.ones(n + 1, dtype=np.int64)
    f = np.zeros(n, dtype=np.int64)
    for k in range(1, n):
        f[k] = oracle.mertens(m // k)
        d[: n - k + 1] -= f[k]
    return CoefficientVector(n, d, f, method="direct-expansion")


def complement_form(cv: CoefficientVector) -> np.ndarray:
    """d_{n-j} = 1 - (f(1) + ... + f(j)) for 1 <= j <= n-1, rebuilt as a d-vector."""
    n = cv.n
    d = np.zeros(n + 1, dtype=np.int64)
    prefix = np.cumsum(cv.f[1:n])
    d[n - 1 : 0 : -1] = 1 - prefix
    d[n] = 1
    return d


def poly_eval_exact(coeffs: Sequence[int], lam: Fraction) -> Fraction:
    """sum coeffs[j] * lam**j in exact arithmetic (integer Horner on p/q)."""
    p, q = lam.numerator, lam.denominator
    N = len(coeffs) - 1
    if N < 0:
        return Fraction(0)
    acc = 0
    qp = 1
    for j in range(N, -1, -1):
        acc = acc * p + coeffs[j] * qp
        qp *= q
    return Fraction(acc, qp // q)


def evaluate(cv: CoefficientVector, lam: Fraction | str | int) -> Fraction:
    lam = parse_rational(lam)
    _check_unit_interval(lam)
    return poly_eval_exact(cv.d.tolist(), lam)


_SPLITTER = 134217729.0  # 2**27 + 1


@nb.njit(cache=True, nogil=True, inline="always")
def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


@nb.njit(cache=True, nogil=True, inline="always")
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@nb.njit(cache=True, nogil=True, inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


@nb.njit(cache=True, nogil=True)
def _comp_horner(a, x_hi, x_lo):
    """Compensated Horner at x = x_hi + x_lo (0 <= x <= 1).

    Returns (value, bound) with |value - p(x)| <= bound.  The bound is the
    standard u|value| + gamma_{2N}^2 * p~(|x|) estimate, widened for the
    x_lo perturbation, doubled to absorb rounding in its own evaluation,
    plus an absolute term for underflow.
    """
    N = a.shape[0] - 1
    if x_hi == 0.0 and x_lo == 0.0:
        return a[0], 0.0
    s = a[N]
    c = 0.0
    ptilde = abs(a[N])
    ax = abs(x_hi)
    for j in range(N - 1, -1, -1):
        p, pi = _two_prod(s, x_hi)
        tail = s * x_lo
        s, sigma = _two_sum(p, a[j])
        c = c * x_hi + (pi + sigma + tail)
        ptilde = ptilde * ax + abs(a[j])
    res = s + c
    u = 1.1102230246251565e-16
    gamma = 2 * N * u / (1.0 - 2 * N * u)
    bound = 2.0 * (u * abs(res) + (gamma * gamma + 4.0 * (N + 1) * u * u) * ptilde)
    # each step may lose a few subnormal units to underflow
    bound += 16.0 * (N + 1) * 5e-324
    return res, bound


@nb.njit(cache=True, nogil=True)
def _double_double_ratio(i, q):
    """(hi, lo) with hi + lo = i/q up to O(u**2)."""
    hi = i / q
    ph, pl = _two_prod(hi, float(q))
    lo = ((i - ph) - pl) / q
    return hi, lo


@nb.njit(cache=True, nogil=True)
def grid_evaluate(a, q):
    """Compensated evaluation of a at lam = i/q for i = 0..q."""
    values = np.empty(q + 1)
    bounds = np.empty(q + 1)
    for i in range(q + 1):
        hi, lo = _double_double_ratio(float(i), q)
        values[i], bounds[i] = _comp_horner(a, hi, lo)
    return values, bounds


def evaluate_float(cv: CoefficientVector, lam: float) -> tuple[float, float]:
    """Compensated Horner value of P(lam) and a bound on its absolute error."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    value, bound = _comp_horner(cv.d.astype(np.float64), lam, 0.0)
    return float(value), float(bound)


def certified_sign(cv: CoefficientVector, lam: float) -> int:
    """Sign of P(lam), deferring to exact arithmetic when the float bound is inconclusive."""
    value, bound = evaluate_float(cv, lam)
    if abs(value) > bound:
        return 1 if value > 0 else -1
    exact = evaluate(cv, Fraction(lam))
    return (exact > 0) - (exact < 0)


@dataclass
class Theorem1Check:
    """Per-lambda outcome of P(i/q) >= 0 (zero only at i = 0) and P(i/q) >= (i/q)**n.

    Margins are P(lam) and P(lam) - lam**n; they are Fractions where the
    decision was made exactly and floats where the float bound sufficed.
    """

    n: int
    q: int
    theorem1: np.ndarray  # bool per i
    top_power: np.ndarray
    theorem1_margin: list = field(repr=False)
    top_power_margin: list = field(repr=False)
    exact: np.ndarray = field(repr=False)  # bool per i: decided in exact arithmetic
    fallbacks: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.theorem1.all() and self.top_power.all())

    def lam(self, i: int) -> Fraction:
        return Fraction(i, self.q)


def verify_theorem1(
    oracle: MertensOracle,
    n: int,
    q: int = DEFAULT_GRID,
    *,
    exact: bool = False,
    cv: CoefficientVector | None = None,
) -> Theorem1Check:
    """Check P(lam) >= 0 and P(lam) >= lam**n at lam = i/q, i = 0..q.

    With ``exact=False`` each sign comes from compensated float evaluation
    when its error bound certifies it, otherwise from exact arithmetic.
    """
    _check_n(n)
    if q < 1:
        raise DomainError(f"grid denominator must be >= 1, got {q}")
    cv = coefficients(oracle, n) if cv is None else cv
    d_list = cv.d.tolist()
    below_top = d_list[:n]  # P(lam) - lam**n
    t1 = np.zeros(q + 1, dtype=bool)
    r1 = np.zeros(q + 1, dtype=bool)
    decided_exactly = np.zeros(q + 1, dtype=bool)
    m_t1: list = [None] * (q + 1)
    m_r1: list = [None] * (q + 1)

    if exact:
        values = bounds = None
    else:
        values, bounds = grid_evaluate(cv.d[:n].astype(np.float64), q)

    fallbacks = 0
    for i in range(q + 1):
        if i > 0 and values is not None and values[i] > bounds[i]:
            lam_f = i / q
            m_r1[i] = float(values[i])
            m_t1[i] = float(values[i]) + lam_f**n
            r1[i] = True
            t1[i] = True
            continue
        if i > 0 and values is not None:
            fallbacks += 1
        lam = Fraction(i, q)
        rest = poly_eval_exact(below_top, lam)
        full = rest + lam**n
        decided_exactly[i] = True
        m_r1[i] = rest
        m_t1[i] = full
        r1[i] = rest >= 0
        t1[i] = full == 0 if i == 0 else full > 0
    return Theorem1Check(n, q, t1, r1, m_t1, m_r1, decided_exactly, fallbacks)


def theorem2_coefficients(cv: CoefficientVector) -> list[int]:
    """Coefficients c with c[n-k+1] = f(k), so sum c_j lam**j is the shifted-sum left side."""
    n = cv.n
    c = [0] * (n + 1)
    f = cv.f.tolist()
    for k in range(1, n):
        c[n - k + 1] = f[k]
    return c


def theorem2_lhs(cv: CoefficientVector, lam: Fraction) -> Fraction:
    return poly_eval_exact(theorem2_coefficients(cv), lam)


@dataclass(frozen=True)
class Theorem2Check:
    n: int
    lam: Fraction
    base: bool  # lhs > lam**(n+1)
    strengthened: bool  # lhs > lam**n
    base_margin: Fraction
    strengthened_margin: Fraction


def verify_theorem2(
    oracle: MertensOracle,
    n: int,
    lam: Fraction | str,
    *,
    cv: CoefficientVector | None = None,
) -> Theorem2Check:
    """Exact check of sum_{k=1}^{n-1} f(k) lam**(n-k+1) > lam**(n+1), and > lam**n."""
    _check_n(n)
    lam = parse_rational(lam)
    if not 0 < lam < 1:
        raise DomainError(f"lambda must lie in the open interval (0, 1), got {lam}")
    cv = coefficients(oracle, n) if cv is None else cv
    lhs = theorem2_lhs(cv, lam)
    base_margin = lhs - lam ** (n + 1)
    strong_margin = lhs - lam**n
    return Theorem2Check(n, lam, base_margin > 0, strong_margin > 0, base_margin, strong_margin)


def bridge_identity(cv: CoefficientVector, lam: Fraction | str) -> bool:
    """(1 - lam) P(lam) == sum f(k) lam**(n-k+1) - lam**(n+1), exactly."""
    lam = parse_rational(lam)
    _check_unit_interval(lam)
    left = (1 - lam) * evaluate(cv, lam)
    right = theorem2_lhs(cv, lam) - lam ** (cv.n + 1)
    return left == right
