"""Dual Turan-Kubilius ratios, the CRT exponential-sum identity, and
variance bounds restricted to sparse sets of integers.

Sequences ``a`` on [1, X] are arrays with ``a[i] = a(i + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .additive import AdditiveFunction
from .errors import DomainError, PreconditionError
from .scan import ScanConfig, csum, evaluate_range
from .sieve import build_spf_table, primes_up_to
from .stats import approx_variance_sq, asymptotic_mean


@dataclass(frozen=True, eq=False)
class SparseSet:
    X: int
    members: np.ndarray
    _counts: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        m = np.unique(np.asarray(self.members, dtype=np.int64))
        if m.size and (m[0] < 1 or m[-1] > self.X):
            raise DomainError(f"members must lie in [1, {self.X}]")
        object.__setattr__(self, "members", m)

    def __len__(self) -> int:
        return int(self.members.shape[0])

    def count(self, d: int) -> int:
        """|S_d(X)|, the number of members divisible by d."""
        d = int(d)
        if d not in self._counts:
            self._counts[d] = int(np.count_nonzero(self.members % d == 0))
        return self._counts[d]

    @classmethod
    def from_file(cls, path, X: int | None = None) -> "SparseSet":
        vals = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                vals.append(int(line))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: not an integer: {line!r}") from None
        arr = np.array(vals, dtype=np.int64)
        return cls(int(X) if X is not None else int(arr.max(initial=1)), arr)

    @classmethod
    def from_census(cls, census) -> "SparseSet":
        return cls(census.X, census.members)

    @classmethod
    def progression(cls, a: int, d: int, X: int) -> "SparseSet":
        """{m*d + a : m >= 0} intersected with [1, X]."""
        start = a % d or d
        return cls(X, np.arange(start, X + 1, d, dtype=np.int64))


# ---------------------------------------------------------- dual TK ratios


class DualTkResult(NamedTuple):
    ratio: float
    lhs: float
    norm: float
    zero: bool


def _multiple_sums(b: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """sum_{m <= len(b), q | m} b(m) for each q in the sorted array ``qs``."""
    L = b.shape[0]
    out = np.zeros(qs.shape[0], dtype=b.dtype)
    if L == 0 or qs.size == 0:
        return out
    cut = int(np.searchsorted(qs, math.isqrt(L), side="right"))
    for i, q in enumerate(qs[:cut].tolist()):
        out[i] = b[q - 1 :: q].sum()
    big = qs[cut:]
    if big.size:
        acc = np.zeros(big.shape[0], dtype=b.dtype)
        for m in range(1, L // int(big[0]) + 1):
            idx = m * big
            k = int(np.searchsorted(idx, L, side="right"))
            if k == 0:
                break
            acc[:k] += b[idx[:k] - 1]
        out[cut:] = acc
    return out


def _prepare_sequence(a, X) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 1 or a.shape[0] != X:
        raise DomainError(f"sequence must have length X={X}")
    return a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)


def dual_tk_ratio(a, X: int) -> DualTkResult:
    """sum_{p<=X} p |sum_{p|n} a(n) - (1/p) sum a(n)|^2 divided by X sum |a|^2."""
    X = int(X)
    if X < 2:
        raise DomainError("X must be >= 2")
    a = _prepare_sequence(a, X)
    norm = csum(np.abs(a) ** 2)
    if norm == 0:
        return DualTkResult(0.0, 0.0, 0.0, True)
    ps = primes_up_to(X)
    total = a.sum()
    D = _multiple_sums(a, ps)
    pf = ps.astype(np.float64)
    lhs = csum(pf * np.abs(D - total / pf) ** 2)
    return DualTkResult(lhs / (X * norm), lhs, norm, False)


def dual_tk_two_prime_ratio(a, X: int, literal: bool = False) -> DualTkResult:
    """Two-prime dual TK ratio over ordered pairs X^(1/4) < p != q <= X.

    Pairs with pq > X have no multiples in [1, X] and contribute
    |sum a|^2 / pq each; their total is taken from the reciprocal sums in
    closed form. ``literal`` sums every pair term by term instead.
    """
    X = int(X)
    if X < 10**4:
        raise DomainError("X must be >= 10^4")
    a = _prepare_sequence(a, X)
    norm = csum(np.abs(a) ** 2)
    if norm == 0:
        return DualTkResult(0.0, 0.0, 0.0, True)
    ps = primes_up_to(X)
    ps = ps[ps.astype(np.float64) > X**0.25]
    total = a.sum()
    T2 = abs(total) ** 2
    terms = []
    near = []  # reciprocals 1/pq of the pairs handled explicitly
    for p in ps.tolist():
        if literal:
            qs = ps[ps != p]
        else:
            qs = ps[(ps <= X // p) & (ps != p)]
            if qs.size == 0:
                if p * int(ps[0]) > X:
                    break
                continue
        b = a[p - 1 :: p]
        S = np.zeros(qs.shape[0], dtype=a.dtype)
        inside = qs <= b.shape[0]
        S[inside] = _multiple_sums(b, qs[inside])
        pq = float(p) * qs.astype(np.float64)
        terms.append(csum(pq * np.abs(S - total / pq) ** 2))
        near.append(csum(1.0 / pq))
    lhs = math.fsum(terms)
    if not literal:
        r = 1.0 / ps.astype(np.float64)
        far = csum(r) ** 2 - csum(r * r) - math.fsum(near)
        lhs += T2 * max(far, 0.0)
    return DualTkResult(lhs / (X * norm), lhs, norm, False)


# ------------------------------------------------------------ CRT identity


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _factor(n: int) -> dict[int, int]:
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _mobius(n: int) -> int:
    f = _factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _phi(n: int) -> int:
    out = n
    for p in _factor(n):
        out = out // p * (p - 1)
    return out


def ramanujan_sum(m: int, n: int) -> int:
    """c_m(n) = mu(m/d) phi(m) / phi(m/d) with d = gcd(m, n)."""
    d = math.gcd(m, n)
    return _mobius(m // d) * _phi(m) // _phi(m // d)


def crt_exp_identity_check(p: int, q: int, n: int) -> tuple[int, complex]:
    """(p 1_{p|n} - 1)(q 1_{q|n} - 1) and the sum of e(cn/pq) over reduced c."""
    p, q, n = int(p), int(q), int(n)
    if p == q:
        raise DomainError("p and q must be distinct")
    if not (_is_prime(p) and _is_prime(q)):
        raise DomainError("p and q must be prime")
    lhs = (p * (n % p == 0) - 1) * (q * (n % q == 0) - 1)
    m = p * q
    c = np.arange(1, m, dtype=np.int64)
    c = c[(c % p != 0) & (c % q != 0)]
    # reduce c*n mod m in integers before scaling to the unit circle
    theta = 2 * math.pi * ((c * (n % m)) % m) / m
    return lhs, complex(math.fsum(np.cos(theta).tolist()), math.fsum(np.sin(theta).tolist()))


def crt_identity_table(p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the CRT identity for every n in [1, pq]."""
    p, q = int(p), int(q)
    if p == q:
        raise DomainError("p and q must be distinct")
    m = p * q
    n = np.arange(1, m + 1, dtype=np.int64)
    lhs = (p * (n % p == 0) - 1) * (q * (n % q == 0) - 1)
    c = np.arange(1, m, dtype=np.int64)
    c = c[(c % p != 0) & (c % q != 0)]
    r = np.outer(n, c) % m
    rhs = np.exp(2j * np.pi * r / m).sum(axis=1)
    return lhs, rhs


# -------------------------------------------------- sparse variance bounds


@dataclass(frozen=True)
class SparseVarianceReport:
    X: int
    eps: float
    size: int
    lhs: float
    main_bound: float
    heavy_sum: float
    heavy_primes: np.ndarray
    heavy_reciprocal: float
    heavy_reciprocal_bound: float

    @property
    def constant(self) -> float:
        """lhs / (main_bound + heavy_sum)."""
        den = self.main_bound + self.heavy_sum
        return self.lhs / den if den > 0 else 0.0

    @property
    def reciprocal_constant(self) -> float:
        return self.heavy_reciprocal / self.heavy_reciprocal_bound if self.heavy_reciprocal_bound > 0 else 0.0


def prime_divisor_counts(S: SparseSet) -> tuple[np.ndarray, np.ndarray]:
    """Primes dividing some member and |S_p| for each, from one SPF pass."""
    if len(S) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    spf = build_spf_table(max(int(S.members[-1]), 2)).array
    m = S.members.copy()
    found = []
    while True:
        live = m > 1
        if not live.any():
            break
        m = m[live]
        s = spf[m].astype(np.int64)
        found.append(s)
        while True:
            div = m % s == 0
            if not div.any():
                break
            m = np.where(div, m // s, m)
    primes, counts = np.unique(np.concatenate(found), return_counts=True)
    return primes, counts


def sparse_variance_decomposition(
    g: AdditiveFunction, S: SparseSet, X: int | None = None, eps: float = 0.2, config: ScanConfig | None = None
) -> SparseVarianceReport:
    """Variance of g on a sparse set against B^2 (eps + eps^-1 sqrt(|S|/X)) plus the heavy-prime sum.

    A prime p is heavy when |S_p| > eps X / p.
    """
    X = int(X if X is not None else S.X)
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    members = S.members[S.members <= X]
    size = int(members.shape[0])
    if size / X >= eps / 2:
        raise PreconditionError(f"sparse-set density |S|/X = {size / X:.6g} must be below eps/2 = {eps / 2:.6g}")
    if size == 0:
        return SparseVarianceReport(X, eps, 0, 0.0, 0.0, 0.0, np.zeros(0, dtype=np.int64), 0.0, 0.0)
    v = evaluate_range(g, 1, X + 1, config)
    A = asymptotic_mean(g, X)
    B2 = approx_variance_sq(g, X)
    lhs = csum(np.abs(v[members - 1] - A) ** 2) / X
    primes, counts = prime_divisor_counts(SparseSet(X, members))
    heavy = primes[counts > eps * X / primes.astype(np.float64)]
    gp = np.abs(g.prime_values(heavy)) ** 2 if heavy.size else np.zeros(0)
    hf = heavy.astype(np.float64)
    return SparseVarianceReport(
        X=X,
        eps=eps,
        size=size,
        lhs=lhs,
        main_bound=B2 * (eps + math.sqrt(size / X) / eps),
        heavy_sum=csum(gp / hf) if heavy.size else 0.0,
        heavy_primes=heavy,
        heavy_reciprocal=csum(1.0 / hf) if heavy.size else 0.0,
        heavy_reciprocal_bound=size / (X * eps**2),
    )


def shifted_sparse_moment(
    g: AdditiveFunction, S: SparseSet, X: int | None = None, j: int = 0, config: ScanConfig | None = None
) -> float:
    """(1/X) sum over n <= X with n + j in S of |g(n) - A_g(X)|^2, divided by B_g(X)^2."""
    X = int(X if X is not None else S.X)
    n = S.members[S.members <= X] - int(j)
    n = n[(n >= 1) & (n <= X)]
    if n.size == 0:
        return 0.0
    B2 = approx_variance_sq(g, X)
    if B2 == 0:
        return 0.0
    v = evaluate_range(g, 1, X + 1, config)
    A = asymptotic_mean(g, X)
    return csum(np.abs(v[n - 1] - A) ** 2) / X / B2
