"""Primes, prime powers and segmented factorization of integer ranges."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from . import kernels
from .errors import CapacityError, ConfigurationError, DomainError

SPF_MEMORY_CAP = 2**31
DEFAULT_SEGMENT = 2**20


class PrimePower(NamedTuple):
    p: int
    k: int
    value: int


@dataclass(frozen=True)
class Factorization:
    n: int
    parts: tuple[tuple[int, int], ...]

    def product(self) -> int:
        out = 1
        for p, k in self.parts:
            out *= p**k
        return out


@dataclass(frozen=True)
class FactorizationWindow:
    """Factorizations of every n in ``[lo, hi)`` stored as CSR arrays.

    ``primes[offsets[i]:offsets[i+1]]`` are the primes of ``lo + i`` in
    increasing order and ``exps`` the matching exponents.
    """

    lo: int
    hi: int
    offsets: np.ndarray
    primes: np.ndarray
    exps: np.ndarray

    def __len__(self) -> int:
        return self.hi - self.lo

    def __getitem__(self, n: int) -> Factorization:
        if not self.lo <= n < self.hi:
            raise IndexError(n)
        i = n - self.lo
        a, b = self.offsets[i], self.offsets[i + 1]
        parts = tuple(zip(self.primes[a:b].tolist(), self.exps[a:b].tolist()))
        return Factorization(n, parts)

    def __iter__(self) -> Iterator[Factorization]:
        for n in range(self.lo, self.hi):
            yield self[n]

    @property
    def entries(self) -> list[Factorization]:
        return list(self)


@lru_cache(maxsize=8)
def _primes_cached(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    mark[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if mark[p]:
            mark[p * p :: 2 * p] = False
    out = np.flatnonzero(mark).astype(np.int64)
    out.flags.writeable = False
    return out


def primes_up_to(n: int) -> np.ndarray:
    """Sorted int64 array of all primes <= n (read-only, cached)."""
    return _primes_cached(int(n))


class SpfTable:
    """Smallest prime factor of every 2 <= n <= limit."""

    def __init__(self, spf: np.ndarray):
        self._spf = spf
        self._spf.flags.writeable = False
        self.limit = spf.shape[0] - 1

    def smallest(self, n: int) -> int:
        if not 2 <= n <= self.limit:
            raise DomainError(f"n={n} outside [2, {self.limit}]")
        return int(self._spf[n])

    @property
    def array(self) -> np.ndarray:
        return self._spf

    @property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return idx[(self._spf == idx) & (idx >= 2)].astype(np.int64)

    @property
    def prime_count(self) -> int:
        idx = np.arange(self.limit + 1)
        return int(np.count_nonzero((self._spf == idx) & (idx >= 2)))


def build_spf_table(limit: int, memory_cap: int = SPF_MEMORY_CAP) -> SpfTable:
    limit = int(limit)
    if limit < 2 or limit > memory_cap:
        raise CapacityError(f"SPF limit {limit} outside [2, {memory_cap}]")
    return SpfTable(kernels.spf_table(limit))


def factorize(n: int, table: SpfTable) -> Factorization:
    if n < 1 or n > table.limit:
        raise DomainError(f"cannot factor {n} with a table up to {table.limit}")
    spf = table.array
    parts = []
    m = n
    while m > 1:
        p = int(spf[m])
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        parts.append((p, k))
    return Factorization(n, tuple(parts))


def _check_base(base: np.ndarray, hi: int) -> np.ndarray:
    base = np.ascontiguousarray(base, dtype=np.int64)
    root = math.isqrt(max(hi - 1, 0))
    need = primes_up_to(root)
    have = base[base <= root]
    if have.shape != need.shape or not np.array_equal(have, need):
        raise ConfigurationError(f"base primes must include every prime <= {root}")
    return base


def segment_bounds(lo: int, hi: int, segment_size: int) -> list[tuple[int, int]]:
    if segment_size < 1:
        raise ConfigurationError("segment size must be positive")
    return [(a, min(a + segment_size, hi)) for a in range(lo, hi, segment_size)]


def segmented_factorizations(
    lo: int,
    hi: int,
    base_primes: np.ndarray | None = None,
    segment_size: int = DEFAULT_SEGMENT,
) -> Iterator[FactorizationWindow]:
    """Stream complete factorizations of ``[lo, hi)`` window by window."""
    if lo < 1 or hi < lo:
        raise DomainError(f"invalid range [{lo}, {hi})")
    if base_primes is None:
        base_primes = primes_up_to(math.isqrt(max(hi - 1, 1)))
    base = _check_base(base_primes, hi)
    for a, b in segment_bounds(lo, hi, segment_size):
        offsets, primes, exps = kernels.factor_segment(a, b, base)
        yield FactorizationWindow(a, b, offsets, primes, exps)


def prime_power_arrays(X: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(p, k, p**k)`` for all prime powers <= X, sorted by value."""
    X = int(X)
    if X < 2:
        raise DomainError(f"X={X} < 2")
    return _pp_cached(X)


@lru_cache(maxsize=16)
def _pp_cached(X: int):
    primes = primes_up_to(X)
    ps, ks, vs = [primes], [np.ones_like(primes)], [primes]
    k = 2
    small = primes[primes <= math.isqrt(X)]
    while small.size:
        vals = small**k
        keep = vals <= X
        if not keep.any():
            break
        ps.append(small[keep])
        ks.append(np.full(int(keep.sum()), k, dtype=np.int64))
        vs.append(vals[keep])
        small = small[keep]
        k += 1
    p = np.concatenate(ps)
    kk = np.concatenate(ks)
    v = np.concatenate(vs)
    order = np.argsort(v, kind="stable")
    out = (p[order], kk[order], v[order])
    for a in out:
        a.flags.writeable = False
    return out


def prime_powers_up_to(X: int) -> list[PrimePower]:
    p, k, v = prime_power_arrays(X)
    return [PrimePower(a, b, c) for a, b, c in zip(p.tolist(), k.tolist(), v.tolist())]
