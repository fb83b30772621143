"""Closeness of additive functions to multiples of log.

lambda(X) is the least-squares coefficient of log on prime powers. A_g(t)
at arbitrary t is read off one prefix array over the prime powers <= X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .additive import AdditiveFunction, Mode, shift_by_log, tabulate
from .errors import ComplexValueError, DomainError
from .gaps import decrease_census, gap_moment
from .scan import ScanConfig, csum, iter_values
from .short_interval import blocked_prefix
from .stats import approx_variance_sq, centred_moment, ruzsa_lambda0, tail_functional


def _require_real(g: AdditiveFunction, what: str):
    if g.is_complex:
        raise ComplexValueError(f"{what} requires a real-valued function, got {g.name}")


class _MeanCurve:
    """t -> A_g(t) for 1 <= t <= X."""

    def __init__(self, g: AdditiveFunction, X: int):
        t = tabulate(g, X)
        self.table = t
        self.pk = t.pk
        self.prefix = blocked_prefix(t.g / t.pk * (1.0 - 1.0 / t.p))

    def __call__(self, t):
        return self.prefix[np.searchsorted(self.pk, np.floor(t), side="right")]


def elliott_sum(g: AdditiveFunction, X: int, delta: float) -> float:
    """sum over X^delta < p^k <= X of |g(p^k) - A_g(X) + A_g(X/p^k)| / p^k."""
    X, delta = _elliott_args(X, delta)
    curve = _MeanCurve(g, X)
    t = curve.table
    sel = t.pk > X**delta
    pk = t.pk[sel]
    AX = curve.prefix[-1]
    inner = curve(X // pk)
    return csum(np.abs(t.g[sel] - AX + inner) / pk)


def _elliott_args(X, delta):
    X = int(X)
    if X < 1000:
        raise DomainError("X must be >= 10^3")
    if not 0 < delta <= 0.25:
        raise DomainError("delta must lie in (0, 1/4]")
    return X, float(delta)


def elliott_range_floor(X: int) -> float:
    """loglog X / sqrt(log X), the lower end of the delta range where the bound is stated."""
    L = math.log(X)
    return math.log(L) / math.sqrt(L)


def elliott_rhs(g: AdditiveFunction, X: int, delta: float, alpha: float = 1.5, config: ScanConfig | None = None) -> float:
    """(log 1/delta)^(1/2) M_alpha^(1/alpha) + B_g(X) (log X)^(-1/4), unit constants."""
    X, delta = _elliott_args(X, delta)
    if not 1 < alpha < 2:
        raise DomainError("alpha must lie in (1, 2)")
    M = centred_moment(g, X, alpha, config=config)
    B = math.sqrt(approx_variance_sq(g, X))
    return math.sqrt(math.log(1 / delta)) * M ** (1 / alpha) + B * math.log(X) ** -0.25


class LambdaFit(NamedTuple):
    lambda_star: float
    residual: float
    lambda0: float


def best_lambda_l2(g: AdditiveFunction, X: int) -> LambdaFit:
    """Minimiser of sum_{p^k <= X} |g(p^k) - lam log p^k|^2 / p^k and its residual."""
    X = int(X)
    if X < 3:
        raise DomainError("X must be >= 3")
    _require_real(g, "best_lambda_l2")
    t = tabulate(g, X)
    lp = np.log(t.pk)
    lam = csum(t.g * lp / t.pk) / csum(lp * lp / t.pk)
    res = csum((t.g - lam * lp) ** 2 / t.pk)
    return LambdaFit(lam, res, ruzsa_lambda0(g, X))


@dataclass(frozen=True)
class RigidityFit:
    X: int
    delta: float
    lam: float
    eta: float
    B: float
    l1_residual: float
    l2_residual: float
    t_grid: np.ndarray
    affine_residuals: np.ndarray
    sup_residual: float
    slow_variation: dict[float, tuple[float, float]] = field(default_factory=dict)
    lambda_l2: float | None = None
    lambda0: float | None = None


def _fit_line(curve: _MeanCurve, lo: float, hi: float, n: int) -> tuple[float, float, np.ndarray, np.ndarray]:
    ts = np.geomspace(lo, hi, n)
    y = curve(ts)
    lt = np.log(ts)
    design = np.column_stack([lt, -np.ones_like(lt)])
    (lam, eta), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(lam), float(eta), ts, y - (lam * lt - eta)


def affine_fit(
    g: AdditiveFunction,
    X: int,
    delta: float = 0.25,
    t_grid_size: int = 32,
    u_list: Sequence[float] = (0.5, 0.75),
) -> RigidityFit:
    """Least-squares A_g(t) ~ lam log t - eta over a geometric grid in [X^delta, X].

    Residuals are scaled by B_g(X). Slow variation refits on [X^(u delta), X^u].
    """
    X = int(X)
    _require_real(g, "affine_fit")
    if not 0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    if t_grid_size < 8:
        raise DomainError("t grid needs at least 8 points")
    lo = X**delta
    if lo < 2 or math.floor(lo) == X:
        raise DomainError("degenerate t grid")
    curve = _MeanCurve(g, X)
    B2 = approx_variance_sq(g, X)
    B = math.sqrt(B2)
    lam, eta, ts, res = _fit_line(curve, lo, X, t_grid_size)
    scale = B if B > 0 else 1.0
    slow = {}
    for u in u_list:
        Xu = X**u
        if Xu**delta < 2:
            raise DomainError(f"X^(u delta) too small for u={u}")
        lam_u, eta_u, _, _ = _fit_line(curve, Xu**delta, Xu, t_grid_size)
        slow[float(u)] = ((lam_u - lam) * math.log(X) / scale, (eta_u - eta) / scale)
    t = curve.table
    lp = np.log(t.pk)
    dev = t.g - lam * lp
    upper = t.pk > lo
    fit = best_lambda_l2(g, X) if X >= 3 else None
    return RigidityFit(
        X=X,
        delta=delta,
        lam=lam,
        eta=eta,
        B=B,
        l1_residual=csum(np.abs(dev[upper]) / t.pk[upper]),
        l2_residual=csum(dev**2 / t.pk),
        t_grid=ts,
        affine_residuals=res / scale,
        sup_residual=float(np.max(np.abs(res))) / scale,
        slow_variation=slow,
        lambda_l2=fit.lambda_star if fit else None,
        lambda0=fit.lambda0 if fit else None,
    )


def ae_log_report(g: AdditiveFunction, X: int, fit: RigidityFit, theta: float, config: ScanConfig | None = None) -> float:
    """Fraction of n <= X with |g(n) - (lam log n - eta)| > theta B_g(X)."""
    if theta <= 0:
        raise DomainError("theta must be positive")
    X = int(X)
    bound = theta * math.sqrt(approx_variance_sq(g, X))
    bad = 0
    for a, v in iter_values(g, 1, X + 1, config):
        n = np.arange(a, a + v.shape[0], dtype=np.float64)
        bad += int(np.count_nonzero(np.abs(v - (fit.lam * np.log(n) - fit.eta)) > bound))
    return bad / X


def slow_variation_profile(g: AdditiveFunction, X: int, u_list: Sequence[float]) -> dict[float, float]:
    """u -> (lambda(X^u) - lambda(X)) log X / B_g(X) with lambda from best_lambda_l2."""
    X = int(X)
    base = best_lambda_l2(g, X).lambda_star
    B = math.sqrt(approx_variance_sq(g, X))
    out = {}
    for u in u_list:
        if not 0 < u <= 1:
            raise DomainError(f"u={u} must lie in (0, 1]")
        Xu = X if u == 1 else int(X**u)
        if Xu < 1000:
            raise DomainError(f"X^u = {Xu} < 10^3 for u={u}")
        lam = best_lambda_l2(g, Xu).lambda_star
        out[float(u)] = (lam - base) * math.log(X) / B if B > 0 else 0.0
    return out


def growth_dichotomy_report(g: AdditiveFunction, X_list: Sequence[int]) -> dict:
    """Per scale: lambda log X / B, B_{g - lambda0 log}^2 / B^2 and log B / loglog X."""
    xs = [int(x) for x in X_list]
    if len(xs) < 3 or xs != sorted(xs):
        raise DomainError("need at least 3 ascending scales")
    rows, degenerate = [], False
    for X in xs:
        B2 = approx_variance_sq(g, X)
        if B2 == 0:
            degenerate = True
            rows.append({"X": X, "B2": 0.0})
            continue
        B = math.sqrt(B2)
        fit = best_lambda_l2(g, X)
        rows.append(
            {
                "X": X,
                "B2": B2,
                "lambda_scaled": fit.lambda_star * math.log(X) / B,
                "shifted_ratio": approx_variance_sq(shift_by_log(g, fit.lambda0), X) / B2,
                "growth_exponent": math.log(B) / math.log(math.log(X)),
            }
        )
    return {"rows": rows, "degenerate": degenerate}


@dataclass(frozen=True)
class ErdosVerdict:
    verdict: str
    X: int
    decrease_count: int
    decrease_density: float
    density_scaled: float
    tail_F: dict[float, float]
    gap_l1: float
    r_X: float
    gap_bound: float
    kw_threshold: float
    c_estimate: float | None
    notes: tuple[str, ...] = ()


def weak_erdos_pipeline(
    g: AdditiveFunction,
    X: int,
    delta_exponent: float = 0.1,
    eps_grid: Sequence[float] = (0.1, 0.25, 0.4),
    tail_tolerance: float = 0.1,
    kw_threshold: float = 0.01,
    config: ScanConfig | None = None,
) -> ErdosVerdict:
    """Check the sparse-decrease-set route to g = c log at one scale.

    Verdicts are ``consistent-with-c·log``, ``hypothesis-failed(<name>)`` or
    ``inconclusive``. The density hypothesis reads
    |B(X)| <= X / (log X)^(2 + delta_exponent).
    """
    _require_real(g, "weak_erdos_pipeline")
    X = int(X)
    if delta_exponent <= 0:
        raise DomainError("delta_exponent must be positive")
    notes = []
    if g.mode is not Mode.COMPLETE:
        notes.append("function is not completely additive")
    census = decrease_census(g, X, config=config)
    L = math.log(X)
    scaled = census.size * L ** (2 + delta_exponent) / X
    B2 = approx_variance_sq(g, X)
    tails = {float(e): (tail_functional(g, X, e) if B2 > 0 else 0.0) for e in eps_grid}
    gl1 = gap_moment(g, X, 1, config)
    r = math.sqrt(census.size / X) + L / math.sqrt(X)
    c_est = best_lambda_l2(g, X).lambda_star
    if scaled > 1:
        verdict = "hypothesis-failed(decrease-set-density)"
    elif tails[min(tails)] > tail_tolerance:
        verdict = "hypothesis-failed(tail-functional)"
    elif gl1 <= kw_threshold:
        verdict = "consistent-with-c·log"
    else:
        verdict = "inconclusive"
    return ErdosVerdict(
        verdict=verdict,
        X=X,
        decrease_count=census.size,
        decrease_density=census.density,
        density_scaled=scaled,
        tail_F=tails,
        gap_l1=gl1,
        r_X=r,
        gap_bound=r * math.sqrt(B2),
        kw_threshold=kw_threshold,
        c_estimate=c_est,
        notes=tuple(notes),
    )
