"""Pure numpy implementations of the compiled kernels in ``_core.pyx``.

Arithmetic is ordered the same way as in the compiled path (ascending base
primes, then the cofactor) so both backends return bitwise-equal values.
"""

from __future__ import annotations

import math

import numpy as np


def spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


def _powers_in_segment(rem: np.ndarray, lo: int, hi: int, p: int):
    """Slice of multiples of p in [lo, hi) and the exact exponent of p there."""
    start = (-lo) % p
    sl = slice(start, hi - lo, p)
    r = rem[sl]
    k = np.zeros(r.shape[0], dtype=np.int64)
    mask = np.ones(r.shape[0], dtype=bool)
    while True:
        mask &= r % p == 0
        if not mask.any():
            break
        r[mask] //= p
        k[mask] += 1
    rem[sl] = r
    return sl, k


def factor_segment(lo: int, hi: int, base: np.ndarray):
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    rows, ps, ks = [], [], []
    for p in base.tolist():
        if p * p > hi - 1:
            break
        sl, k = _powers_in_segment(rem, lo, hi, p)
        idx = np.arange(sl.start, size, p, dtype=np.int64)
        rows.append(idx)
        ps.append(np.full(idx.shape[0], p, dtype=np.int64))
        ks.append(k)
    big = np.flatnonzero(rem > 1)
    rows.append(big)
    ps.append(rem[big])
    ks.append(np.ones(big.shape[0], dtype=np.int64))
    rows_a = np.concatenate(rows)
    ps_a = np.concatenate(ps)
    ks_a = np.concatenate(ks)
    order = np.lexsort((ps_a, rows_a))
    counts = np.bincount(rows_a, minlength=size)
    offsets = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, ps_a[order], ks_a[order].astype(np.uint8)


def additive_segment(lo, hi, base, table, primes, prime_vals):
    rem = np.arange(lo, hi, dtype=np.int64)
    val = np.zeros(hi - lo, dtype=np.float64)
    for j, p in enumerate(base.tolist()):
        if p * p > hi - 1:
            break
        sl, k = _powers_in_segment(rem, lo, hi, p)
        val[sl] += table[j, k]
    big = np.flatnonzero(rem > 1)
    missing = 0
    if big.size:
        q = rem[big]
        idx = np.searchsorted(primes, q)
        idx_c = np.minimum(idx, primes.shape[0] - 1)
        found = (idx < primes.shape[0]) & (primes[idx_c] == q)
        if not found.all():
            missing = int(q[~found][0])
        val[big[found]] += prime_vals[idx_c[found]]
    return val, missing


def compensated_sum(a: np.ndarray) -> float:
    return math.fsum(a.tolist())
