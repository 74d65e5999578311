"""Sublinear Mertens function via M(x) = 1 - sum_{k=2}^{x} M(x // k).

A dense sieve table answers every x up to ``threshold``; above it the
recursion runs over the quotients x // k that exceed the threshold, and
every value it produces is memoized for later queries.
"""

from __future__ import annotations

import math
import os
import struct
import threading
import zlib
from pathlib import Path

import numba as nb
import numpy as np

from mertens_audit import sieve
from mertens_audit.errors import CapacityError, CorruptCacheError, DomainError

CACHE_MAGIC = b"MRTC0001"
_HEADER = struct.Struct("<8sQQ")
_ENTRY = np.dtype([("x", "<u8"), ("m", "<i8")])

# Every block term is at most x in magnitude and there are < 2 sqrt(x)
# blocks, so all partial sums stay below 2 x**1.5 < 2**63 for x <= 10**12.
MAX_X = 10**12

MIN_DEFAULT_THRESHOLD = 10**4
MAX_DEFAULT_THRESHOLD = 10**8


def default_threshold(x_max: int) -> int:
    """ceil(x_max**(2/3)) clamped to [1e4, 1e8] and to the memory ceiling."""
    t = math.ceil(max(x_max, 1) ** (2.0 / 3.0))
    t = min(max(t, MIN_DEFAULT_THRESHOLD), MAX_DEFAULT_THRESHOLD)
    return min(t, sieve.MEMORY_CEILING)


@nb.njit(cache=True, nogil=True)
def _mertens_above(x, M, t):
    """M(x // k) for k = 1..x // (t + 1), i.e. every quotient above t."""
    kmax = x // (t + 1)
    big = np.zeros(kmax + 1, dtype=np.int64)
    for k in range(kmax, 0, -1):
        v = x // k
        s = 1
        jmax = v // (t + 1)
        # quotients v // j > t are x // (k j) with k j <= kmax
        for j in range(2, jmax + 1):
            s -= big[k * j]
        j = jmax + 1
        if j < 2:
            j = 2
        while j <= v:
            q = v // j
            j_end = v // q
            s -= (j_end - j + 1) * M[q]
            j = j_end + 1
        big[k] = s
    return big


class MertensOracle:
    """Exact M(x): dense table up to ``threshold``, memoized recursion above.

    Reads are lock-free; memo insertion and threshold changes take a lock, so
    concurrent identical queries may duplicate work but never disagree.
    """

    def __init__(self, threshold: int = MIN_DEFAULT_THRESHOLD, *, ceiling: int | None = None):
        self.ceiling = sieve.MEMORY_CEILING if ceiling is None else ceiling
        self._lock = threading.Lock()
        self.memo: dict[int, int] = {}
        self.hits = 0
        self.computations = 0
        self.dropped_inconsistent = 0
        self._build_dense(threshold)

    @classmethod
    def for_max_query(cls, x_max: int, **kwargs) -> MertensOracle:
        return cls(default_threshold(x_max), **kwargs)

    def _build_dense(self, t: int) -> None:
        if t < 1:
            raise CapacityError(f"threshold must be >= 1, got {t}")
        self.dense = sieve.build_mertens(sieve.build_mobius(t, ceiling=self.ceiling))
        self.threshold = t

    def mertens(self, x: int) -> int:
        x = int(x)
        if x < 1:
            raise DomainError(f"M(x) requires x >= 1, got {x}")
        if x <= self.threshold:
            return int(self.dense.M[x])
        cached = self.memo.get(x)
        if cached is not None:
            self.hits += 1
            return cached
        if x > MAX_X:
            raise DomainError(f"x={x} exceeds the supported maximum {MAX_X}")
        if x // (self.threshold + 1) > self.ceiling:
            raise CapacityError(f"threshold {self.threshold} too small for x={x}")
        big = _mertens_above(x, self.dense.M, self.threshold)
        with self._lock:
            self.computations += 1
            for k in range(1, len(big)):
                self.memo.setdefault(x // k, int(big[k]))
            return self.memo[x]

    __call__ = mertens

    def table(self, upto: int) -> np.ndarray:
        """Dense M[0..upto]; grows the dense table if needed."""
        if upto > self.threshold:
            self.set_threshold(upto)
        return self.dense.M

    def set_threshold(self, t: int) -> MertensOracle:
        """Rebuild the dense table to ceiling ``t``.

        Memo entries now covered by the table are dropped after a consistency
        check; entries above ``t`` are kept.
        """
        with self._lock:
            self._build_dense(t)
            kept = {}
            for x, m in self.memo.items():
                if x > t:
                    kept[x] = m
                elif int(self.dense.M[x]) != m:
                    self.dropped_inconsistent += 1
            self.memo = kept
        return self

    def save(self, path: str | os.PathLike) -> None:
        cache_save(self, path)

    @classmethod
    def load(cls, path: str | os.PathLike, **kwargs) -> MertensOracle:
        return cache_load(path, **kwargs)


def mertens(oracle: MertensOracle, x: int) -> int:
    return oracle.mertens(x)


def set_threshold(oracle: MertensOracle, t: int) -> MertensOracle:
    return oracle.set_threshold(t)


def encode_cache(threshold: int, memo: dict[int, int]) -> bytes:
    keys = sorted(memo)
    entries = np.empty(len(keys), dtype=_ENTRY)
    entries["x"] = keys
    entries["m"] = [memo[k] for k in keys]
    body = _HEADER.pack(CACHE_MAGIC, threshold, len(keys)) + entries.tobytes()
    return body + struct.pack("<I", zlib.crc32(body))


def decode_cache(blob: bytes) -> tuple[int, dict[int, int]]:
    if len(blob) < _HEADER.size + 4:
        raise CorruptCacheError("cache file truncated")
    magic, threshold, count = _HEADER.unpack_from(blob)
    if magic != CACHE_MAGIC:
        raise CorruptCacheError(f"bad magic {magic!r}")
    expected = _HEADER.size + count * _ENTRY.itemsize + 4
    if len(blob) != expected:
        raise CorruptCacheError(f"cache length {len(blob)} != expected {expected}")
    (crc,) = struct.unpack_from("<I", blob, len(blob) - 4)
    if zlib.crc32(blob[:-4]) != crc:
        raise CorruptCacheError("checksum mismatch")
    entries = np.frombuffer(blob, dtype=_ENTRY, count=count, offset=_HEADER.size)
    xs = entries["x"].tolist()
    if any(a >= b for a, b in zip(xs, xs[1:])):
        raise CorruptCacheError("entries not strictly ascending")
    return threshold, dict(zip(xs, entries["m"].tolist()))


def cache_save(oracle: MertensOracle, path: str | os.PathLike) -> None:
    with oracle._lock:
        blob = encode_cache(oracle.threshold, oracle.memo)
    Path(path).write_bytes(blob)


def cache_load(path: str | os.PathLike, **kwargs) -> MertensOracle:
    threshold, memo = decode_cache(Path(path).read_bytes())
    oracle = MertensOracle(threshold, **kwargs)
    oracle.memo = memo
    return oracle
