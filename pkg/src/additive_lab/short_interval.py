"""Short-interval discrepancies of additive functions and the MR sieve set.

Window sums over ``(n-h, n]`` come from blocked prefix sums of the values
centred at the long dyadic mean; block bases are merged exactly with
``math.fsum`` so the prefix never accumulates more than one block of drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .additive import AdditiveFunction
from .errors import DomainError
from .scan import ScanConfig, csum, evaluate_range
from .sieve import Factorization, primes_up_to
from .stats import approx_variance_sq

_BLOCK = 4096
_LOG_MAX = math.log(np.finfo(np.float64).max)


@dataclass(frozen=True)
class DiscrepancyReport:
    X: int
    h: int
    l1: float
    l2: float
    bound_l1: float
    trivial_bound_chain: float
    cs_chain_bound: float
    long_mean: float | complex
    B2: float

    @property
    def normalized_l1(self) -> float:
        return self.l1 / math.sqrt(self.B2) if self.B2 > 0 else 0.0

    @property
    def normalized_l2(self) -> float:
        return self.l2 / self.B2 if self.B2 > 0 else 0.0


class BoundTerms(NamedTuple):
    term_h: float
    term_X: float
    l2_term_h: float
    l2_term_X: float


def mr_bound_terms(h: float, X: float, gamma: float = 0.001) -> BoundTerms:
    """sqrt(loglog h / log h), (log X)^(-1/800) and their l2 analogues."""
    if h < 10 or X < 1000:
        raise DomainError("need h >= 10 and X >= 10^3")
    r = math.log(math.log(h)) / math.log(h)
    return BoundTerms(math.sqrt(r), math.log(X) ** (-1 / 800), r**0.99, math.log(X) ** (-gamma))


def blocked_prefix(c: np.ndarray) -> np.ndarray:
    """Prefix sums with a leading 0, exact to within one block of rounding."""
    n = c.shape[0]
    out = np.empty(n + 1, dtype=c.dtype)
    out[0] = 0
    nb = -(-n // _BLOCK)
    pad = np.zeros(nb * _BLOCK, dtype=c.dtype)
    pad[:n] = c
    blocks = pad.reshape(nb, _BLOCK)
    local = np.cumsum(blocks, axis=1)
    if np.iscomplexobj(c):
        tot = [csum(b) for b in blocks]
        re = np.array([math.fsum(t.real for t in tot[:i]) for i in range(nb)])
        im = np.array([math.fsum(t.imag for t in tot[:i]) for i in range(nb)])
        base = re + 1j * im
    else:
        tot = [csum(b) for b in blocks]
        running = []
        acc: list[float] = []
        for t in tot:
            running.append(math.fsum(acc))
            acc.append(t)
        base = np.array(running)
    out[1:] = (local + base[:, None]).reshape(-1)[:n]
    return out


def _check_h(h, X):
    if int(h) != h:
        raise DomainError(f"h={h} must be an integer")
    h = int(h)
    if not 10 <= h <= X / 100:
        raise DomainError(f"need 10 <= h <= X/100, got h={h}, X={X}")
    return h


def interval_discrepancies(
    g: AdditiveFunction, X: int, h_list: Sequence[int], config: ScanConfig | None = None
) -> list[DiscrepancyReport]:
    """Discrepancy reports for several h from one sieved pass."""
    X = int(X)
    if X < 1000:
        raise DomainError("X must be >= 10^3")
    hs = [_check_h(h, X) for h in h_list]
    n0 = X // 2 + 1  # first n > X/2
    hmax = max(hs)
    lo = n0 - hmax  # the chain bound reaches back to m = n0 - h
    v = evaluate_range(g, lo, X + 1, config)
    M = 2.0 / X * csum(v[n0 - lo :])
    c = v - M
    P = blocked_prefix(c)
    B2 = approx_variance_sq(g, X)
    idx = np.arange(n0 - lo, X + 1 - lo)  # positions of n in v
    reports = []
    for h in hs:
        D = (P[idx + 1] - P[idx + 1 - h]) / h
        aD = np.abs(D)
        tail = np.abs(c[n0 - h - lo :])  # m in (X/2 - h, X]
        bt = mr_bound_terms(h, X)
        reports.append(
            DiscrepancyReport(
                X=X,
                h=h,
                l1=2.0 / X * csum(aD),
                l2=2.0 / X * csum(aD**2),
                bound_l1=bt.term_h + bt.term_X,
                trivial_bound_chain=2.0 / X * csum(tail),
                cs_chain_bound=math.sqrt(1 + 2 * h / X) * math.sqrt(2.0 / X * csum(tail**2)),
                long_mean=M,
                B2=B2,
            )
        )
    return reports


def interval_discrepancy(
    g: AdditiveFunction, X: int, h: int, order: int = 1, config: ScanConfig | None = None
) -> DiscrepancyReport:
    """Discrepancy report at one (X, h); ``order`` only validates, both orders are filled."""
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    return interval_discrepancies(g, X, [h], config)[0]


def trivial_bound_chain(g: AdditiveFunction, X: int, h: int, config: ScanConfig | None = None) -> float:
    return interval_discrepancy(g, X, h, config=config).trivial_bound_chain


def two_scale_discrepancy(
    g: AdditiveFunction, X: int, h: int, h2: int | None = None, config: ScanConfig | None = None
) -> float:
    """(2/X) sum_{X/2<m<=X} |h^-1 W_h(m) - h2^-1 W_h2(m)| with h2 = X/(log X)^(1/3) by default."""
    X = int(X)
    h = _check_h(h, X)
    if h2 is None:
        h2 = int(X / math.log(X) ** (1 / 3))
    if not h <= h2 <= X // 2:
        raise DomainError("need h <= h2 <= X/2")
    n0 = X // 2 + 1
    lo = n0 - h2 + 1
    v = evaluate_range(g, lo, X + 1, config)
    M = 2.0 / X * csum(v[n0 - lo :])
    P = blocked_prefix(v - M)
    idx = np.arange(n0 - lo, X + 1 - lo)
    a = (P[idx + 1] - P[idx + 1 - h]) / h
    b = (P[idx + 1] - P[idx + 1 - h2]) / h2
    return 2.0 / X * csum(np.abs(a - b))


# ------------------------------------------------------------ sieve set S


@dataclass(frozen=True)
class MrSieveParams:
    eta: float | None
    log_pairs: tuple[tuple[float, float], ...]
    explicit: tuple[tuple[float, float], ...] | None = None

    @property
    def overridden(self) -> bool:
        return self.explicit is not None

    @property
    def J(self) -> int:
        return len(self.log_pairs)

    @property
    def degenerate(self) -> bool:
        return self.J == 0

    @property
    def pairs(self) -> tuple[tuple[float, float], ...]:
        """(P_j, Q_j) with math.inf marking an overflowed bound."""
        if self.explicit is not None:
            return self.explicit
        return tuple(tuple(math.exp(x) if x < _LOG_MAX else math.inf for x in pq) for pq in self.log_pairs)


def mr_sieve_params(
    h: float, X: float, eta: float | None = None, override: Sequence[tuple[float, float]] | None = None
) -> MrSieveParams:
    """Levels (P_j, Q_j) with Q_1 = h and P_1 = (log h)^(40/eta), computed in logs.

    J is the largest j with Q_j <= exp(sqrt(log X)) and P_j < Q_j at every
    level up to j; an explicit override bypasses the formula.
    """
    if override is not None:
        pairs = tuple((P, Q) for P, Q in override)
        for P, Q in pairs:
            if not (2 <= P < Q):
                raise DomainError(f"override pair ({P}, {Q}) needs 2 <= P < Q")
        logs = tuple((math.log(P), math.log(Q)) for P, Q in pairs)
        return MrSieveParams(eta, logs, explicit=pairs)
    if eta is None or not 0 < eta < 1 / 12:
        raise DomainError("eta must lie in (0, 1/12)")
    if h < 10:
        raise DomainError("h must be >= 10")
    logQ1 = math.log(h)
    logP1 = (40.0 / eta) * math.log(logQ1)
    cap = math.sqrt(math.log(X))
    logs = []
    j = 1
    while True:
        lp = j ** (4 * j) * logQ1 ** (j - 1) * logP1
        lq = j ** (4 * j + 2) * logQ1**j
        if lq > cap or lp >= lq:
            break
        logs.append((lp, lq))
        j += 1
    return MrSieveParams(eta, tuple(logs))


def s_membership(f: Factorization | int, params: MrSieveParams) -> bool:
    """True when every level j <= J has a prime factor in [P_j, Q_j]."""
    if isinstance(f, Factorization):
        ps = [p for p, _ in f.parts]
    else:
        n, ps, d = int(f), [], 2
        while d * d <= n:
            if n % d == 0:
                ps.append(d)
                while n % d == 0:
                    n //= d
            d += 1
        if n > 1:
            ps.append(n)
    for (P, Q) in params.pairs:
        if not any(P <= p <= Q for p in ps):
            return False
    return True


class ComplementDensity(NamedTuple):
    measured: float
    euler_bound: float
    mertens_form: float


def s_complement_density(X: int, params: MrSieveParams) -> ComplementDensity:
    """Density of integers in [X/3, X] outside S, with the union/Euler-product bound."""
    X = int(X)
    if params.degenerate:
        return ComplementDensity(0.0, 0.0, 0.0)
    lo = math.ceil(X / 3)
    size = X - lo + 1
    inside = np.ones(size, dtype=bool)
    euler = 0.0
    for (P, Q) in params.pairs:
        top = min(Q, X)
        ps = primes_up_to(int(top))
        ps = ps[ps >= P]
        hit = np.zeros(size, dtype=bool)
        for p in ps.tolist():
            hit[(-lo) % p :: p] = True
        inside &= hit
        euler += math.exp(float(np.sum(np.log1p(-1.0 / ps.astype(np.float64)))))
    lp1, lq1 = params.log_pairs[0]
    mertens = lp1 / lq1 * sum(1.0 / j**2 for j in range(1, params.J + 1))
    return ComplementDensity(1.0 - inside.mean(), euler, mertens)
