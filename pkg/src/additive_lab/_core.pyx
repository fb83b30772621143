# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sieve kernels.

Every function here has a drop-in numpy twin in ``_fallback.py``; the two
must produce identical results (bitwise for the integer outputs).
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, uint8_t

cnp.import_array()

cdef enum:
    MAX_OMEGA = 16


def spf_table(int64_t limit):
    """Smallest-prime-factor array of length limit + 1 (entries 0, 1 are 0)."""
    cdef cnp.ndarray[int32_t, ndim=1] arr = np.zeros(limit + 1, dtype=np.int32)
    cdef int32_t[::1] spf = arr
    cdef int64_t i, j
    with nogil:
        i = 2
        while i <= limit:
            if spf[i] == 0:
                spf[i] = <int32_t>i
                if i * i <= limit:
                    j = i * i
                    while j <= limit:
                        if spf[j] == 0:
                            spf[j] = <int32_t>i
                        j += i
            i += 1
    return arr


def factor_segment(int64_t lo, int64_t hi, const int64_t[::1] base):
    """Factor every n in [lo, hi) by the ascending base primes.

    Returns CSR arrays ``(offsets, primes, exps)``; the cofactor left after
    sieving (a prime above the base range) is appended as the last part.
    """
    cdef int64_t size = hi - lo
    cdef cnp.ndarray[int64_t, ndim=1] rem_arr = np.arange(lo, hi, dtype=np.int64)
    cdef int64_t[::1] rem = rem_arr
    cdef cnp.ndarray[int64_t, ndim=2] pbuf_arr = np.zeros((size, MAX_OMEGA), dtype=np.int64)
    cdef cnp.ndarray[uint8_t, ndim=2] kbuf_arr = np.zeros((size, MAX_OMEGA), dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] cnt_arr = np.zeros(size, dtype=np.uint8)
    cdef int64_t[:, ::1] pbuf = pbuf_arr
    cdef uint8_t[:, ::1] kbuf = kbuf_arr
    cdef uint8_t[::1] cnt = cnt_arr
    cdef int64_t nb = base.shape[0]
    cdef int64_t j, p, m, i, r, total = 0
    cdef int k
    with nogil:
        for j in range(nb):
            p = base[j]
            if p * p > hi - 1:
                break
            m = ((lo + p - 1) // p) * p
            while m < hi:
                i = m - lo
                r = rem[i]
                k = 0
                while r % p == 0:
                    r = r // p
                    k += 1
                rem[i] = r
                pbuf[i, cnt[i]] = p
                kbuf[i, cnt[i]] = <uint8_t>k
                cnt[i] += 1
                m += p
        for i in range(size):
            if rem[i] > 1:
                pbuf[i, cnt[i]] = rem[i]
                kbuf[i, cnt[i]] = 1
                cnt[i] += 1
            total += cnt[i]
    cdef cnp.ndarray[int64_t, ndim=1] offsets = np.zeros(size + 1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] primes = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[uint8_t, ndim=1] exps = np.empty(total, dtype=np.uint8)
    cdef int64_t[::1] off = offsets
    cdef int64_t[::1] pr = primes
    cdef uint8_t[::1] ex = exps
    cdef int64_t pos = 0
    cdef int c
    with nogil:
        for i in range(size):
            off[i] = pos
            for c in range(cnt[i]):
                pr[pos] = pbuf[i, c]
                ex[pos] = kbuf[i, c]
                pos += 1
        off[size] = pos
    return offsets, primes, exps


def additive_segment(int64_t lo, int64_t hi, const int64_t[::1] base,
                     const double[:, ::1] table, const int64_t[::1] primes,
                     const double[::1] prime_vals):
    """Values of an additive function on [lo, hi).

    ``table[j, k]`` holds g(base[j]**k); the cofactor prime q is looked up in
    the sorted ``primes`` array and contributes ``prime_vals[idx(q)]``.
    Returns ``(values, missing)`` where ``missing`` is the first cofactor not
    found among ``primes`` (0 if none).
    """
    cdef int64_t size = hi - lo
    cdef cnp.ndarray[int64_t, ndim=1] rem_arr = np.arange(lo, hi, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(size, dtype=np.float64)
    cdef int64_t[::1] rem = rem_arr
    cdef double[::1] val = out
    cdef int64_t nb = base.shape[0]
    cdef int64_t np_ = primes.shape[0]
    cdef int64_t j, p, m, i, r, a, b, mid, missing = 0
    cdef int k
    with nogil:
        for j in range(nb):
            p = base[j]
            if p * p > hi - 1:
                break
            m = ((lo + p - 1) // p) * p
            while m < hi:
                i = m - lo
                r = rem[i]
                k = 0
                while r % p == 0:
                    r = r // p
                    k += 1
                rem[i] = r
                val[i] += table[j, k]
                m += p
        for i in range(size):
            r = rem[i]
            if r > 1:
                a = 0
                b = np_
                while a < b:
                    mid = (a + b) >> 1
                    if primes[mid] < r:
                        a = mid + 1
                    else:
                        b = mid
                if a < np_ and primes[a] == r:
                    val[i] += prime_vals[a]
                elif missing == 0:
                    missing = r
    return out, missing


def compensated_sum(const double[::1] a):
    """Neumaier-compensated sum of a contiguous float64 array."""
    cdef double s = 0.0, c = 0.0, t, x
    cdef int64_t i, n = a.shape[0]
    with nogil:
        for i in range(n):
            x = a[i]
            t = s + x
            if (s if s >= 0 else -s) >= (x if x >= 0 else -x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c
