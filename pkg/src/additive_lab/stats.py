"""Global functionals of an additive function at scale X.

Prime-power sums are exact finite sums over ``p**k <= X``; sums over
``n <= X`` are single sieved passes with compensated per-window partials.
Empirical means divide by ``floor(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .additive import AdditiveFunction, shift_by_log, tabulate
from .errors import ComplexValueError, DegenerateFunctionError, DomainError, NumericDomainError
from .scan import ScanConfig, csum, iter_values, fmerge
from .sieve import prime_power_arrays


@dataclass(frozen=True)
class GlobalStats:
    X: int
    A: float | complex
    B2: float
    lambda0: float | None
    tail_F: dict[float, float | None] = field(default_factory=dict)
    pp_tail: float | None = None
    moments: dict[float, float] = field(default_factory=dict)


def _check_X(X, least=2) -> int:
    X = int(X)
    if X < least:
        raise DomainError(f"X={X} < {least}")
    return X


def _require_real(g: AdditiveFunction, what: str):
    if g.is_complex:
        raise ComplexValueError(f"{what} requires a real-valued function, got {g.name}")


def asymptotic_mean(g: AdditiveFunction, X: int):
    """A_g(X) = sum over p^k <= X of g(p^k) p^-k (1 - 1/p)."""
    t = tabulate(g, _check_X(X))
    return csum(t.g / t.pk * (1.0 - 1.0 / t.p))


def approx_variance_sq(g: AdditiveFunction, X: int) -> float:
    """B_g(X)^2 = sum over p^k <= X of |g(p^k)|^2 / p^k."""
    t = tabulate(g, _check_X(X))
    with np.errstate(over="ignore"):
        out = csum(np.abs(t.g) ** 2 / t.pk)
    if not math.isfinite(out):
        raise NumericDomainError(f"B_{g.name}({X})^2 overflows")
    return out


def _B(g, X) -> float:
    B2 = approx_variance_sq(g, X)
    if B2 <= 0:
        raise DegenerateFunctionError(f"B_{g.name}({X}) = 0")
    return math.sqrt(B2)


def tail_functional(g: AdditiveFunction, X: int, eps: float) -> float:
    """Share of B_g(X)^2 carried by primes with |g(p)| > B_g(X)/eps."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    B = _B(g, X)
    t = tabulate(g, X)
    ones = t.k == 1
    a = np.abs(t.g[ones])
    big = a > B / eps
    return csum(a[big] ** 2 / t.pk[ones][big]) / B**2


def prime_power_tail(g: AdditiveFunction, X: int) -> float:
    """Share of B_g(X)^2 carried by the prime powers with k >= 2."""
    B = _B(g, X)
    t = tabulate(g, X)
    hi = t.k >= 2
    return csum(np.abs(t.g[hi]) ** 2 / t.pk[hi]) / B**2


def ruzsa_lambda0(g: AdditiveFunction, X: int) -> float:
    """lambda_0(X) = 2 (log X)^-2 * sum over p <= X of g(p) log p / p."""
    X = _check_X(X, 3)
    _require_real(g, "ruzsa_lambda0")
    t = tabulate(g, X)
    ones = t.k == 1
    p = t.p[ones].astype(np.float64)
    return 2.0 / math.log(X) ** 2 * csum(t.g[ones] * np.log(p) / p)


def centred_moments(
    g: AdditiveFunction,
    X: int,
    alphas: Sequence[float],
    center=None,
    config: ScanConfig | None = None,
) -> dict[float, float]:
    """(1/floor X) sum_{n <= X} |g(n) - center|^alpha for each alpha, one pass.

    ``center`` defaults to A_g(X).
    """
    X = _check_X(X)
    for a in alphas:
        if a < 1:
            raise DomainError("moment order must be >= 1")
    if center is None:
        center = asymptotic_mean(g, X)
    parts: dict[float, list] = {a: [] for a in alphas}
    for _, v in iter_values(g, 1, X + 1, config):
        d = np.abs(v - center)
        for a in alphas:
            parts[a].append(csum(d if a == 1 else d**a))
    return {a: fmerge(parts[a]) / X for a in alphas}


def centred_moment(g, X, alpha=2.0, center=None, config: ScanConfig | None = None) -> float:
    return centred_moments(g, X, [alpha], center, config)[alpha]


def ruzsa_bracket(g: AdditiveFunction, X: int) -> float:
    """B_{g - lambda_0 log}(X)^2 + lambda_0^2."""
    lam = ruzsa_lambda0(g, X)
    return approx_variance_sq(shift_by_log(g, lam), X) + lam**2


class MeanCheck(NamedTuple):
    empirical: float | complex
    asymptotic: float | complex
    deviation_scaled: float
    degenerate: bool


def mean_vs_empirical(g: AdditiveFunction, X: int, config: ScanConfig | None = None) -> MeanCheck:
    """Empirical mean over n <= X against A_g(X), deviation scaled by sqrt(log X)/B."""
    X = _check_X(X, 3)
    emp = fmerge(csum(v) for _, v in iter_values(g, 1, X + 1, config)) / X
    A = asymptotic_mean(g, X)
    B2 = approx_variance_sq(g, X)
    diff = abs(emp - A)
    if B2 == 0:
        return MeanCheck(emp, A, diff, True)
    return MeanCheck(emp, A, diff * math.sqrt(math.log(X)) / math.sqrt(B2), False)


def pp_sum_range(delta: float, X: int) -> tuple[float, float]:
    """sum over X^delta < p^k <= X of 1/p^k, and its ratio to log(1/delta)."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    _, _, v = prime_power_arrays(_check_X(X))
    sel = v > X**delta
    s = csum(1.0 / v[sel])
    return s, s / math.log(1.0 / delta)


def mean_drift(g: AdditiveFunction, y: int, z: int) -> float:
    """|A_g(y) - A_g(z)| sqrt(log y) / B_g(y) for y/2 <= z <= y."""
    if not (y / 2 <= z <= y):
        raise DomainError("need y/2 <= z <= y")
    B = _B(g, y)
    return abs(asymptotic_mean(g, y) - asymptotic_mean(g, z)) * math.sqrt(math.log(y)) / B


def pointwise_constant(g: AdditiveFunction, X: int, config: ScanConfig | None = None) -> float:
    """Smallest C with max_{X/2 < n <= X} |g(n)|/n <= C B_g(X) log X / sqrt(X)."""
    X = _check_X(X, 3)
    B = _B(g, X)
    lo = X // 2 + 1
    best = 0.0
    for a, v in iter_values(g, lo, X + 1, config):
        n = np.arange(a, a + v.shape[0], dtype=np.float64)
        best = max(best, float(np.max(np.abs(v) / n)))
    return best / (B * math.log(X) / math.sqrt(X))


def global_stats(
    g: AdditiveFunction,
    X: int,
    eps_list: Sequence[float] = (0.1, 0.25, 0.5),
    moment_orders: Sequence[float] = (1.0, 1.5, 2.0),
    config: ScanConfig | None = None,
) -> GlobalStats:
    X = _check_X(X, 3)
    A = asymptotic_mean(g, X)
    B2 = approx_variance_sq(g, X)
    lam = None if g.is_complex else ruzsa_lambda0(g, X)
    if B2 > 0:
        tails = {e: tail_functional(g, X, e) for e in eps_list}
        ppt = prime_power_tail(g, X)
    else:
        tails = {e: None for e in eps_list}
        ppt = None
    moments = centred_moments(g, X, list(moment_orders), A, config)
    return GlobalStats(X, A, B2, lam, tails, ppt, moments)


def trend_report(g: AdditiveFunction, X_list: Sequence[int], eps_list: Sequence[float] = (0.1, 0.25, 0.5)):
    """Finite-X proxies of the tail functionals across several scales.

    The limsup definitions are not computable from one X; the trend across
    ascending X is what is reported.
    """
    rows = []
    for X in sorted(int(x) for x in X_list):
        B2 = approx_variance_sq(g, X)
        row = {"X": X, "B2": B2}
        if B2 > 0:
            row["pp_tail"] = prime_power_tail(g, X)
            row["tail_F"] = {e: tail_functional(g, X, e) for e in eps_list}
        rows.append(row)
    return rows
