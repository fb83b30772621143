"""Consecutive gaps g(n) - g(n-1), the decrease set and its telescoping identity.

The convention g(0) = 0 is applied here, so the first gap is g(1) - g(0) = 0.
Scans stream windows and carry one value across each window boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .additive import AdditiveFunction
from .errors import ComplexValueError, DomainError
from .scan import ScanConfig, csum, evaluate_range, fmerge, iter_values
from .stats import approx_variance_sq, asymptotic_mean


@dataclass(frozen=True)
class DecreaseCensus:
    X: int
    members: np.ndarray
    density: float
    per_prime_counts: dict[int, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.members.shape[0])


def _require_real(g: AdditiveFunction):
    if g.is_complex:
        raise ComplexValueError(f"order relations need a real-valued function, got {g.name}")


def iter_gaps(g: AdditiveFunction, X: int, config: ScanConfig | None = None) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield ``(start, values, gaps)`` per window for n = 1..X."""
    prev = 0.0
    for a, v in iter_values(g, 1, int(X) + 1, config):
        shifted = np.empty_like(v)
        shifted[0] = prev
        shifted[1:] = v[:-1]
        prev = v[-1]
        yield a, v, v - shifted


def gap_moments(g: AdditiveFunction, X: int, orders: Sequence[int] = (1, 2), config: ScanConfig | None = None) -> dict[int, float]:
    X = int(X)
    if X < 2:
        raise DomainError("X must be >= 2")
    parts: dict[int, list] = {o: [] for o in orders}
    for _, _, d in iter_gaps(g, X, config):
        a = np.abs(d)
        for o in orders:
            parts[o].append(csum(a if o == 1 else a**o))
    return {o: fmerge(parts[o]) / X for o in orders}


def gap_moment(g: AdditiveFunction, X: int, order: int = 1, config: ScanConfig | None = None) -> float:
    """(1/floor X) sum_{n <= X} |g(n) - g(n-1)|^order."""
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    return gap_moments(g, X, (order,), config)[order]


def decrease_census(
    g: AdditiveFunction, X: int, primes: Sequence[int] | None = None, config: ScanConfig | None = None
) -> DecreaseCensus:
    """Members of {n <= X : g(n) < g(n-1)} (strict) and optional per-prime counts."""
    _require_real(g)
    X = int(X)
    chunks = []
    for a, _, d in iter_gaps(g, X, config):
        chunks.append(np.flatnonzero(d < 0) + a)
    members = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    counts = {}
    for p in primes or ():
        counts[int(p)] = int(np.count_nonzero(members % int(p) == 0))
    return DecreaseCensus(X, members.astype(np.int64), members.shape[0] / X, counts)


def telescoping_check(g: AdditiveFunction, X: int, config: ScanConfig | None = None) -> tuple[float, float, float]:
    """Both sides of sum_{n<=X}|g(n)-g(n-1)| = g(X) + 2 sum_{n in decrease set}(g(n-1)-g(n))."""
    _require_real(g)
    X = int(X)
    lhs_parts, drop_parts = [], []
    last = 0.0
    for _, v, d in iter_gaps(g, X, config):
        lhs_parts.append(csum(np.abs(d)))
        neg = d[d < 0]
        drop_parts.append(csum(-neg))
        last = float(v[-1])
    lhs = fmerge(lhs_parts)
    rhs = last + 2.0 * fmerge(drop_parts)
    return lhs, rhs, abs(lhs - rhs)


def gap_triangle_chain(g: AdditiveFunction, X: int, config: ScanConfig | None = None) -> tuple[float, float]:
    """(l1 gap average, (1/X)[sum_{2<=n<=X}|g(n)-A| + sum_{m<=X-1}|g(m)-A|])."""
    X = int(X)
    A = asymptotic_mean(g, X)
    gap_parts, dev_parts = [], []
    for a, v, d in iter_gaps(g, X, config):
        gap_parts.append(csum(np.abs(d)))
        dev_parts.append(csum(np.abs(v - A)))
    g1 = float(np.real(evaluate_range(g, 1, 2)[0]))
    gX = complex(evaluate_range(g, X, X + 1)[0])
    total = fmerge(dev_parts)
    rhs = (total - abs(g1 - A)) + (total - abs(gX - A))
    return fmerge(gap_parts) / X, rhs / X


def gap_ratio_bound(eps: float, X: int) -> float | None:
    """sqrt(loglog(1/eps)/log(1/eps)) + (log X)^(-1/800); None unless 0 < eps < 1/3."""
    if not 0 < eps < 1 / 3:
        return None
    L = math.log(1.0 / eps)
    return math.sqrt(math.log(L) / L) + math.log(X) ** (-1.0 / 800)


def gap_vs_moment_report(
    g: AdditiveFunction,
    X: int,
    n_points: int = 6,
    h_list: Sequence[int] = (10, 100),
    config: ScanConfig | None = None,
) -> dict:
    """Gap averages against centred moments over a Y-grid in (X/log X, X]."""
    X = int(X)
    if X < 1000:
        raise DomainError("X must be >= 10^3")
    v = evaluate_range(g, 1, X + 1, config)
    d = np.diff(np.concatenate([[0.0], v]))
    ad = np.abs(d)
    B2 = approx_variance_sq(g, X)
    B = math.sqrt(B2)
    lo = X / math.log(X)
    grid = sorted({int(round(y)) for y in np.geomspace(lo, X, n_points + 1)[1:]} | {X})
    rows = []
    for Y in grid:
        A = asymptotic_mean(g, Y)
        dev = np.abs(v[:Y] - A)
        rows.append(
            {
                "Y": Y,
                "gap_l1": csum(ad[:Y]) / Y,
                "gap_l2": csum(ad[:Y] ** 2) / Y,
                "moment1": csum(dev) / Y,
                "moment2": csum(dev**2) / Y,
            }
        )
    eps = max(r["gap_l1"] for r in rows) / B if B > 0 else 0.0
    max_gap_sq = max(csum(ad[:Y] ** 2) for Y in grid)
    return {
        "X": X,
        "B2": B2,
        "rows": rows,
        "gap_ratio": eps,
        "gap_ratio_bound": gap_ratio_bound(eps, X) if B > 0 else None,
        "moment1_over_B": rows[-1]["moment1"] / B if B > 0 else 0.0,
        "window_gap_terms": {h: h * h / X * max_gap_sq for h in h_list},
    }
