"""Dense tables of mu, M, phi and Phi built by linear and segmented sieves.

All tables are 1-indexed numpy arrays with a zero pad at index 0, so
``table.mu[n]`` is mu(n).  Arrays are marked read-only after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from mertens_audit.errors import CapacityError, DomainError

# Largest table limit accepted by default: 10**8 entries costs ~0.9 GB for
# mu (int8) plus M (int64).
MEMORY_CEILING = 10**8

# Linear sieve up to this limit, segmented sieve for the remainder.
LINEAR_CUTOFF = 10**7

# 2**18 bytes of mu per segment, roughly L2-sized.
SEGMENT_SIZE = 1 << 18


@dataclass(frozen=True)
class MobiusTable:
    limit: int
    mu: np.ndarray  # int8, length limit + 1


@dataclass(frozen=True)
class MertensTable:
    limit: int
    M: np.ndarray  # int64, length limit + 1

    def __call__(self, x: int) -> int:
        if not 1 <= x <= self.limit:
            raise DomainError(f"M({x}) outside table range 1..{self.limit}")
        return int(self.M[x])


@dataclass(frozen=True)
class TotientTable:
    limit: int
    phi: np.ndarray  # int64, length limit + 1
    Phi: np.ndarray  # int64 prefix sums of phi


def _check_limit(limit: int, ceiling: int | None) -> None:
    ceiling = MEMORY_CEILING if ceiling is None else ceiling
    if limit < 1:
        raise CapacityError(f"table limit must be >= 1, got {limit}")
    if limit > ceiling:
        raise CapacityError(f"table limit {limit} exceeds memory ceiling {ceiling}")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _prime_capacity(limit: int) -> int:
    # Rosser-Schoenfeld: pi(x) < 1.25506 x / log x for x > 1.
    if limit < 17:
        return limit + 1
    return int(1.25506 * limit / math.log(limit)) + 16


@nb.njit(cache=True, nogil=True)
def _linear_mu(limit, prime_cap):
    mu = np.zeros(limit + 1, dtype=np.int8)
    composite = np.zeros(limit + 1, dtype=np.bool_)
    primes = np.empty(prime_cap, dtype=np.int64)
    count = 0
    mu[1] = 1
    for i in range(2, limit + 1):
        if not composite[i]:
            primes[count] = i
            count += 1
            mu[i] = -1
        for t in range(count):
            p = primes[t]
            ip = i * p
            if ip > limit:
                break
            composite[ip] = True
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    return mu


@nb.njit(cache=True, nogil=True)
def _linear_phi(limit, prime_cap):
    phi = np.zeros(limit + 1, dtype=np.int64)
    primes = np.empty(prime_cap, dtype=np.int64)
    count = 0
    phi[1] = 1
    for i in range(2, limit + 1):
        if phi[i] == 0:
            primes[count] = i
            count += 1
            phi[i] = i - 1
        for t in range(count):
            p = primes[t]
            ip = i * p
            if ip > limit:
                break
            if i % p == 0:
                phi[ip] = phi[i] * p
                break
            phi[ip] = phi[i] * (p - 1)
    return phi


@nb.njit(cache=True, nogil=True)
def _small_primes(bound):
    flags = np.ones(bound + 1, dtype=np.bool_)
    flags[0] = False
    if bound >= 1:
        flags[1] = False
    i = 2
    while i * i <= bound:
        if flags[i]:
            for j in range(i * i, bound + 1, i):
                flags[j] = False
        i += 1
    return np.nonzero(flags)[0].astype(np.int64)


@nb.njit(cache=True, nogil=True)
def _segmented_mu(mu, start, limit, primes, seg_size):
    """Fill mu[start..limit] segment by segment."""
    prod = np.empty(seg_size, dtype=np.int64)
    lo = start
    while lo <= limit:
        hi = min(lo + seg_size - 1, limit)
        width = hi - lo + 1
        for i in range(width):
            mu[lo + i] = 1
            prod[i] = 1
        for t in range(primes.shape[0]):
            p = primes[t]
            if p * p > hi:
                break
            first = ((lo + p - 1) // p) * p
            for v in range(first, hi + 1, p):
                mu[v] = -mu[v]
                prod[v - lo] *= p
            pp = p * p
            first = ((lo + pp - 1) // pp) * pp
            for v in range(first, hi + 1, pp):
                mu[v] = 0
        for i in range(width):
            # one prime factor above sqrt(hi) remains unaccounted for
            if mu[lo + i] != 0 and prod[i] != lo + i:
                mu[lo + i] = -mu[lo + i]
        lo = hi + 1


@nb.njit(cache=True, nogil=True)
def _segmented_phi(phi, start, limit, primes, seg_size):
    rem = np.empty(seg_size, dtype=np.int64)
    lo = start
    while lo <= limit:
        hi = min(lo + seg_size - 1, limit)
        width = hi - lo + 1
        for i in range(width):
            phi[lo + i] = lo + i
            rem[i] = lo + i
        for t in range(primes.shape[0]):
            p = primes[t]
            if p * p > hi:
                break
            first = ((lo + p - 1) // p) * p
            for v in range(first, hi + 1, p):
                phi[v] -= phi[v] // p
                r = rem[v - lo]
                while r % p == 0:
                    r //= p
                rem[v - lo] = r
        for i in range(width):
            r = rem[i]
            if r > 1:
                phi[lo + i] -= phi[lo + i] // r
        lo = hi + 1


def build_mobius(
    limit: int,
    *,
    ceiling: int | None = None,
    linear_cutoff: int = LINEAR_CUTOFF,
    segment_size: int = SEGMENT_SIZE,
) -> MobiusTable:
    """Sieve mu(1..limit); linear up to ``linear_cutoff``, segmented above."""
    _check_limit(limit, ceiling)
    head = min(limit, max(linear_cutoff, 1))
    mu_head = _linear_mu(head, _prime_capacity(head))
    if head == limit:
        mu = mu_head
    else:
        mu = np.zeros(limit + 1, dtype=np.int8)
        mu[: head + 1] = mu_head
        primes = _small_primes(math.isqrt(limit) + 1)
        _segmented_mu(mu, head + 1, limit, primes, segment_size)
    return MobiusTable(limit, _freeze(mu))


def build_mertens(mob: MobiusTable) -> MertensTable:
    M = np.cumsum(mob.mu, dtype=np.int64)
    return MertensTable(mob.limit, _freeze(M))


def build_totient(
    limit: int,
    *,
    ceiling: int | None = None,
    linear_cutoff: int = LINEAR_CUTOFF,
    segment_size: int = SEGMENT_SIZE,
) -> TotientTable:
    _check_limit(limit, ceiling)
    head = min(limit, max(linear_cutoff, 1))
    phi_head = _linear_phi(head, _prime_capacity(head))
    if head == limit:
        phi = phi_head
    else:
        phi = np.zeros(limit + 1, dtype=np.int64)
        phi[: head + 1] = phi_head
        primes = _small_primes(math.isqrt(limit) + 1)
        _segmented_phi(phi, head + 1, limit, primes, segment_size)
    Phi = np.cumsum(phi, dtype=np.int64)
    return TotientTable(limit, _freeze(phi), _freeze(Phi))


@nb.njit(cache=True, nogil=True)
def grouped_quotient_sum(M, n):
    """sum_{k=1}^{n} M[n // k], one term per block of constant quotient."""
    total = 0
    k = 1
    while k <= n:
        q = n // k
        k_end = n // q
        total += (k_end - k + 1) * M[q]
        k = k_end + 1
    return total


@nb.njit(cache=True, nogil=True)
def ungrouped_quotient_sum(M, n):
    total = 0
    for k in range(1, n + 1):
        total += M[n // k]
    return total


@nb.njit(cache=True, nogil=True)
def identity_sweep(M, n_max):
    """Grouped sum_{k<=n} M(n//k) for every n in 1..n_max (index 0 unused)."""
    out = np.zeros(n_max + 1, dtype=np.int64)
    for n in range(1, n_max + 1):
        out[n] = grouped_quotient_sum(M, n)
    return out


def check_sum_identity(mert: MertensTable, n: int) -> bool:
    """True iff sum_{k=1}^{n} M(floor(n/k)) == 1."""
    if not 1 <= n <= mert.limit:
        raise DomainError(f"n={n} outside table range 1..{mert.limit}")
    return int(grouped_quotient_sum(mert.M, n)) == 1


def divisor_sum_mu(mob: MobiusTable, n_max: int) -> np.ndarray:
    """sum_{d | n} mu(d) for n in 1..n_max, by scattering each mu(d) to its multiples."""
    out = np.zeros(n_max + 1, dtype=np.int64)
    mu = mob.mu
    for d in range(1, n_max + 1):
        if mu[d]:
            out[d::d] += mu[d]
    return out
