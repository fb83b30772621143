"""Multiplicative functions built from additive ones, and pretentious distances.

Here e(x) = exp(2 pi i x). Twisted prime sums sum_p w_p p^(-i lam) over a
uniform lambda grid are evaluated by rotating one phase vector per step and
re-synchronising it exactly every ``_RESYNC`` steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .additive import AdditiveFunction, split_by_prime_size
from .errors import DegenerateFunctionError, DomainError, NumericDomainError
from .scan import csum
from .sieve import primes_up_to
from .stats import approx_variance_sq

_RESYNC = 256
_UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MultiplicativeFunction:
    name: str
    rule: Callable[[int, int], complex]
    prime_rule: Callable[[np.ndarray], np.ndarray] | None = None
    bound_B: float | None = None

    def value(self, p: int, k: int = 1) -> complex:
        return complex(self.rule(p, k))

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        if self.prime_rule is not None:
            return np.asarray(self.prime_rule(primes), dtype=np.complex128)
        return np.array([self.rule(p, 1) for p in primes.tolist()], dtype=np.complex128)

    def at(self, parts) -> complex:
        out = 1.0 + 0j
        for p, k in parts:
            out *= self.value(p, k)
        return out


def constant_one() -> MultiplicativeFunction:
    return MultiplicativeFunction("1", lambda p, k: 1.0, lambda ps: np.ones(ps.shape[0], dtype=np.complex128))


def liouville() -> MultiplicativeFunction:
    """(p, k) -> (-1)^k."""
    return MultiplicativeFunction(
        "liouville", lambda p, k: (-1.0) ** k, lambda ps: -np.ones(ps.shape[0], dtype=np.complex128)
    )


def check_declared_bound(f: MultiplicativeFunction, X: int) -> bool:
    """True when |f(p)| <= bound_B for every p <= X (or no bound is declared)."""
    if f.bound_B is None:
        return True
    _, fv = _prime_data(f, X)
    return bool(np.all(np.abs(fv) <= f.bound_B * (1 + _UNIT_TOL)))


def twist(lam: float) -> MultiplicativeFunction:
    """n -> n^(i lam)."""
    return MultiplicativeFunction(
        f"n^(i{lam:g})",
        lambda p, k: np.exp(1j * lam * k * math.log(p)),
        lambda ps: np.exp(1j * lam * np.log(ps.astype(np.float64))),
    )


def from_prime_values(name: str, primes: np.ndarray, values: np.ndarray, completely: bool = True) -> MultiplicativeFunction:
    """Multiplicative function with tabulated f(p); f(p^k) = f(p)^k if ``completely``."""
    lookup = dict(zip(primes.tolist(), values.tolist()))
    keys = np.asarray(primes)
    vals = np.asarray(values, dtype=np.complex128)

    def prime_rule(ps):
        idx = np.searchsorted(keys, ps)
        if np.any(idx >= keys.shape[0]) or np.any(keys[np.minimum(idx, keys.shape[0] - 1)] != ps):
            raise DomainError(f"{name}: prime outside the tabulated range")
        return vals[idx]

    return MultiplicativeFunction(name, lambda p, k: lookup[p] ** (k if completely else 1), prime_rule)


def exp_additive(g: AdditiveFunction, t: float, X: int) -> MultiplicativeFunction:
    """G(n) = e(t g(n) / B_g(X))."""
    B2 = approx_variance_sq(g, X)
    if B2 <= 0:
        raise DegenerateFunctionError(f"B_{g.name}({X}) = 0")
    c = 2j * math.pi * t / math.sqrt(B2)
    return MultiplicativeFunction(
        f"e({t:g}*{g.name}/B)",
        lambda p, k: np.exp(c * g.value(p, k)),
        lambda ps: np.exp(c * g.prime_values(ps)),
    )


def f_z(g: AdditiveFunction, X: int, delta: float, z: complex) -> MultiplicativeFunction:
    """F_z(n) = z^(g_C(n)/B_g(X)) with g_C the small-prime part of g."""
    g_c, _ = split_by_prime_size(g, X, delta)
    B = math.sqrt(approx_variance_sq(g, X))
    logz = np.log(complex(z))
    return MultiplicativeFunction(
        f"F_{z}",
        lambda p, k: np.exp(logz * g_c.value(p, 1) / B),
        lambda ps: np.exp(logz * g_c.prime_values(ps) / B),
    )


# ----------------------------------------------------------------- distances


def _prime_data(f: MultiplicativeFunction, X: int):
    X = int(X)
    if X < 2:
        raise DomainError("X must be >= 2")
    ps = primes_up_to(X)
    return ps, f.prime_values(ps)


def _require_unit(vals: np.ndarray, name: str):
    if np.any(np.abs(vals) > 1 + _UNIT_TOL):
        raise DomainError(f"{name} exceeds 1 in modulus at some prime; use rho_distance_sq")


def distance_sq(f: MultiplicativeFunction, g: MultiplicativeFunction, X: int) -> float:
    """D(f, g; X)^2 = sum_{p <= X} (1 - Re f(p) conj g(p)) / p."""
    ps, fv = _prime_data(f, X)
    gv = g.prime_values(ps)
    _require_unit(fv, f.name)
    _require_unit(gv, g.name)
    # 1 - Re f conj(g) = |f - g|^2 / 2 + (1 - (|f|^2 + |g|^2) / 2); the second part vanishes on the unit circle
    off = 1.0 - (np.abs(fv) ** 2 + np.abs(gv) ** 2) / 2
    off[np.abs(off) < _UNIT_TOL] = 0.0
    return max(csum((np.abs(fv - gv) ** 2 / 2 + off) / ps), 0.0)


def pretentious_distance_sq(f: MultiplicativeFunction, lam: float, X: int) -> float:
    """D(f, n^(i lam); X)^2."""
    ps, fv = _prime_data(f, X)
    _require_unit(fv, f.name)
    tw = np.exp(-1j * lam * np.log(ps.astype(np.float64)))
    return max(csum((1.0 - (fv * tw).real) / ps), 0.0)


def rho_distance_sq(f: MultiplicativeFunction, t: float, X: int) -> float:
    """rho(f, n^(it); X)^2 = sum_{p <= X} (|f(p)| - Re f(p) p^(-it)) / p."""
    ps, fv = _prime_data(f, X)
    tw = np.exp(-1j * t * np.log(ps.astype(np.float64)))
    return max(csum((np.abs(fv) - (fv * tw).real) / ps), 0.0)


def _twisted_scan(weights: np.ndarray, logp: np.ndarray, lam0: float, step: float, n: int) -> np.ndarray:
    """Re sum_p weights_p exp(-i lam logp_p) at lam = lam0 + j*step, j < n."""
    out = np.empty(n)
    rot = np.exp(-1j * step * logp)
    j = 0
    while j < n:
        cur = weights * np.exp(-1j * (lam0 + j * step) * logp)
        stop = min(n, j + _RESYNC)
        for i in range(j, stop):
            out[i] = cur.real.sum()
            cur *= rot
        j = stop
    return out


class DistanceResult(NamedTuple):
    lambda_star: float
    value: float
    grid_resolution: float
    t0_scaled: float


def _minimize(objective, base_total, weights, logp, lo, hi, spacing) -> tuple[float, float]:
    n = int(math.ceil((hi - lo) / spacing)) + 1
    step = (hi - lo) / (n - 1) if n > 1 else 0.0
    vals = base_total - _twisted_scan(weights, logp, lo, step, n)
    j = int(np.argmin(vals))
    a = lo + max(j - 1, 0) * step
    b = lo + min(j + 1, n - 1) * step
    best_x, best_v = lo + j * step, objective(lo + j * step)
    width0 = max(b - a, 1e-300)
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > 1e-4 * width0:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(d)
    for x, v in ((c, fc), (d, fd), (a, objective(a)), (b, objective(b))):
        if v < best_v:
            best_x, best_v = x, v
    return best_x, best_v


def distance_minimize(f: MultiplicativeFunction, X: int, T: float) -> DistanceResult:
    """M_f(X; T) = min over |lam| <= T of D(f, n^(i lam); X)^2.

    Grid search at spacing <= 1/(2 log X), then golden-section refinement of
    the best bracket down to 1e-4 of its width.
    """
    if T <= 0:
        raise DomainError("T must be positive")
    ps, fv = _prime_data(f, X)
    _require_unit(fv, f.name)
    logp = np.log(ps.astype(np.float64))
    w = fv / ps
    base = float(np.sum(1.0 / ps))
    spacing = 1.0 / (2.0 * math.log(X))

    def objective(lam):
        return max(base - float((w * np.exp(-1j * lam * logp)).real.sum()), 0.0)

    lam, val = _minimize(objective, base, w, logp, -T, T, spacing)
    return DistanceResult(lam, pretentious_distance_sq(f, lam, X), spacing, lam * math.log(X))


def t0_minimize(f: MultiplicativeFunction, X: int, T: float | None = None) -> DistanceResult:
    """Minimiser of t -> rho(f, n^(it); X)^2.

    Searches |t| <= (log X)^2 by default and widens by a factor 4 (up to X)
    while the minimiser sits on the boundary.
    """
    ps, fv = _prime_data(f, X)
    logp = np.log(ps.astype(np.float64))
    w = fv / ps
    base = float(np.sum(np.abs(fv) / ps))
    spacing = 1.0 / (2.0 * math.log(X))
    T = float(T) if T is not None else min(math.log(X) ** 2, float(X))

    def objective(t):
        return max(base - float((w * np.exp(-1j * t * logp)).real.sum()), 0.0)

    while True:
        t, val = _minimize(objective, base, w, logp, -T, T, spacing)
        if abs(abs(t) - T) > spacing or T >= X:
            break
        T = min(4 * T, float(X))
    return DistanceResult(t, rho_distance_sq(f, t, X), spacing, t * math.log(X))


def triangle_check(f, g, h, X) -> tuple[float, float, float]:
    """(D(f,h), D(f,g), D(g,h)) at X for functions unimodular on primes."""
    return (
        math.sqrt(distance_sq(f, h, X)),
        math.sqrt(distance_sq(f, g, X)),
        math.sqrt(distance_sq(g, h, X)),
    )


def euler_products(f: MultiplicativeFunction, X: int) -> tuple[float, float]:
    """H(f;X) = prod (1 + (|f(p)|-1)^2/p) and P_f(X) = prod (1 + (|f(p)|-1)/p)."""
    ps, fv = _prime_data(f, X)
    a = np.abs(fv)
    pf = ps.astype(np.float64)
    factors = 1.0 + (a - 1.0) / pf
    if np.any(factors <= 0):
        bad = int(ps[np.argmax(factors <= 0)])
        raise NumericDomainError(f"Euler factor of P_f at p={bad} is not positive")
    logH = csum(np.log1p((a - 1.0) ** 2 / pf))
    logP = csum(np.log(factors))
    return math.exp(logH), math.exp(logP)


# ------------------------------------------------------ divisor-bounded class


def divisor_power(B: float, nu: int) -> float:
    """d_B(p^nu) = binom(B + nu - 1, nu) for real B >= 1."""
    out = 1.0
    for i in range(1, nu + 1):
        out *= (B + i - 1) / i
    return out


def divisor_bound_check(f: MultiplicativeFunction, X: int, B: float, sample_size: int = 1000) -> dict:
    """Check |f(p^nu)| <= d_B(p^nu) on all prime powers <= X and |f(n)| <= d_B(n) on a sample."""
    from .sieve import prime_power_arrays

    if B < 1:
        raise DomainError("B must be >= 1")
    p, k, v = prime_power_arrays(X)
    report = {"B": B, "X": int(X), "passed": True, "first_violation": None}
    for a, b, c in zip(p.tolist(), k.tolist(), v.tolist()):
        fv = abs(f.value(a, b))
        d = divisor_power(B, b)
        if fv > d * (1 + 1e-12):
            report.update(passed=False, first_violation={"n": c, "abs_f": fv, "d_B": d})
            return report
    ns = np.unique(np.linspace(2, X, num=min(sample_size, max(X - 1, 1)), dtype=np.int64))
    for n in ns.tolist():
        parts, m, q = [], n, 2
        while q * q <= m:
            if m % q == 0:
                e = 0
                while m % q == 0:
                    m //= q
                    e += 1
                parts.append((q, e))
            q += 1
        if m > 1:
            parts.append((m, 1))
        fv = abs(f.at(parts))
        d = math.prod(divisor_power(B, e) for _, e in parts)
        if fv > d * (1 + 1e-12):
            report.update(passed=False, first_violation={"n": n, "abs_f": fv, "d_B": d})
            return report
    report["checked_prime_powers"] = int(v.shape[0])
    report["checked_sample"] = int(ns.shape[0])
    return report


def condition_ii_check(f: MultiplicativeFunction, X: int, A: float) -> dict:
    """min over dyadic u < v of sum_{u<p<=v} |f(p)|/p - A sum 1/p + 1/log u."""
    if A <= 0:
        raise DomainError("A must be positive")
    ps, fv = _prime_data(f, X)
    pf = ps.astype(np.float64)
    cf = np.concatenate([[0.0], np.cumsum(np.abs(fv) / pf)])
    c1 = np.concatenate([[0.0], np.cumsum(1.0 / pf)])
    grid = [2**i for i in range(1, int(math.log2(X)) + 1)]
    if grid[-1] != X:
        grid.append(int(X))
    pos = np.searchsorted(ps, grid, side="right")
    best, arg = math.inf, None
    for i, u in enumerate(grid):
        for j in range(i + 1, len(grid)):
            m = (cf[pos[j]] - cf[pos[i]]) - A * (c1[pos[j]] - c1[pos[i]]) + 1.0 / math.log(u)
            if m < best:
                best, arg = m, (u, grid[j])
    return {"A": A, "min_margin": best, "argmin": arg, "pairs": len(grid) * (len(grid) - 1) // 2, "passed": best >= 0}


def dichotomy_report(g: AdditiveFunction, X: int, t: float, eps: float, T: float | None = None) -> dict:
    """Twist dichotomy: either M_G(X;T) >= 4 log(1/eps) or |lambda*| is small."""
    G = exp_additive(g, t, X)
    T = T if T is not None else math.log(X) ** 2
    res = distance_minimize(G, X, T)
    thr = 4 * math.log(1 / eps)
    return {
        "t": t,
        "eps": eps,
        "T": T,
        "M": res.value,
        "threshold": thr,
        "lambda_star": res.lambda_star,
        "branch": "large-distance" if res.value >= thr else "bounded-twist",
    }
