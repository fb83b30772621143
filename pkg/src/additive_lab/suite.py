"""The acceptance table: numbered checks with fixed scales and tolerances.

Each check returns a :class:`CheckResult`; ``run_suite`` runs them in order.
The CLI ``report`` command and the acceptance tests both use this table.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .additive import builtin
from .gaps import decrease_census, gap_moment, gap_moments, telescoping_check
from .pretentious import (
    MultiplicativeFunction,
    distance_minimize,
    from_prime_values,
    triangle_check,
)
from .rigidity import ae_log_report, affine_fit, weak_erdos_pipeline
from .scan import ScanConfig, evaluate_range
from .short_interval import interval_discrepancies, mr_sieve_params, s_complement_density
from .sieve import primes_up_to
from .sparse import crt_identity_table, dual_tk_ratio, dual_tk_two_prime_ratio, ramanujan_sum
from .stats import (
    approx_variance_sq,
    centred_moment,
    global_stats,
    mean_vs_empirical,
    ruzsa_bracket,
    tail_functional,
)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    runtime: float
    budget: float | None
    measured: dict = field(default_factory=dict)

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d} {self.name} ({self.runtime:.2f}s) {shown}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _g(spec: str):
    name, _, param = spec.partition(":")
    return builtin(name, float(param) if name == "clog" else (int(param) if param else None))


# -------------------------------------------------------------- the checks


def telescoping() -> tuple[bool, dict]:
    worst = 0.0
    for spec in ("big_omega", "omega", "clog:3", "erdos:5"):
        lhs, rhs, diff = telescoping_check(_g(spec), 10**5)
        worst = max(worst, diff / (1 + abs(lhs)))
    return worst <= 1e-8, {"worst_scaled_diff": worst}


def counterexample_census(sample: int = 10**4, seed: int = 0) -> tuple[bool, dict]:
    X, p0 = 10**6, 101
    g = builtin("erdos", p0)
    census = decrease_census(g, X)
    expected = np.arange(p0 + 1, X + 1, p0)
    exact = bool(np.array_equal(census.members, expected))
    outside = np.setdiff1d(np.arange(1, X + 1), census.members)
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(outside, size=sample, replace=False))
    v = evaluate_range(g, 1, X + 1)[pick - 1]
    off = np.abs(v - np.log(pick.astype(np.float64))) > 1e-9
    return exact and census.size == 9900 and not off.any(), {
        "size": census.size,
        "set_matches": exact,
        "log_mismatches": int(off.sum()),
        "mismatches_divisible_by_p0": int(np.count_nonzero(pick[off] % p0 == 0)),
    }


def clog_variance_asymptotic() -> tuple[bool, dict]:
    X, c = 10**7, 2.0
    ratio = math.sqrt(approx_variance_sq(builtin("clog", c), X)) / (abs(c) / math.sqrt(2) * math.log(X))
    return 0.9 <= ratio <= 1.1, {"ratio": ratio}


def clog_tail_vanishes() -> tuple[bool, dict]:
    vals = [tail_functional(builtin("clog", c), 10**6, 0.4) for c in (1.0, 2.0)]
    return all(v == 0.0 for v in vals), {"F": max(vals)}


def crt_identity() -> tuple[bool, dict]:
    ps = primes_up_to(30).tolist()
    checked, worst, exact = 0, 0.0, True
    for p in ps:
        for q in ps:
            if p == q:
                continue
            lhs, rhs = crt_identity_table(p, q)
            n = np.arange(1, p * q + 1)
            oracle = np.array([ramanujan_sum(p * q, int(k)) for k in n])
            exact &= bool(np.array_equal(lhs, oracle))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))) / (p * q))
            checked += n.shape[0]
    return exact and worst <= 1e-9, {"cases": checked, "exact": exact, "worst_scaled_diff": worst}


def tk_ratio() -> tuple[bool, dict]:
    worst = 0.0
    for spec in ("omega", "big_omega"):
        for X in (10**5, 10**6):
            g = _g(spec)
            worst = max(worst, centred_moment(g, X, 2.0) / approx_variance_sq(g, X))
    return worst <= 4, {"max_ratio": worst}


def ruzsa_two_sided() -> tuple[bool, dict]:
    lo, hi = math.inf, 0.0
    for spec in ("omega", "big_omega", "clog:1", "erdos:101"):
        g = _g(spec)
        r = centred_moment(g, 10**6, 2.0) / ruzsa_bracket(g, 10**6)
        lo, hi = min(lo, r), max(hi, r)
    return 1 / 64 <= lo and hi <= 64, {"min_ratio": lo, "max_ratio": hi}


def l1_decay() -> tuple[bool, dict]:
    X = 10**7
    reps = interval_discrepancies(builtin("big_omega"), X, [10, 10**3, 10**5])
    l1 = [r.l1 for r in reps]
    ordered = l1[0] > l1[1] > l1[2]
    chain = all(r.l1 <= r.trivial_bound_chain for r in reps)
    scaled = reps[2].normalized_l1
    return ordered and chain and scaled <= 0.2, {
        "l1_h10": l1[0],
        "l1_h1e3": l1[1],
        "l1_h1e5": l1[2],
        "l1_over_B_h1e5": scaled,
        "below_trivial_chain": chain,
    }


def l2_smallness() -> tuple[bool, dict]:
    a = interval_discrepancies(builtin("clog", 1.0), 10**6, [10**3])[0].normalized_l2
    b = interval_discrepancies(builtin("big_omega"), 10**7, [10**4])[0].normalized_l2
    return a <= 1e-3 and b <= 0.3, {"clog_l2_over_B2": a, "big_omega_l2_over_B2": b}


def omega_gap_lower_bound() -> tuple[bool, dict]:
    X = 10**6
    m = gap_moment(builtin("omega"), X, 1)
    target = 0.5 * math.sqrt(math.log(math.log(X)))
    return m >= target, {"gap_l1": m, "threshold": target}


def dual_tk(seed: int = 0) -> tuple[bool, dict]:
    worst = 0.0
    for X in (10**4, 10**5):
        n = np.arange(1, X + 1)
        seqs = [
            np.ones(X),
            (n % 101 == 1).astype(np.float64),
            np.random.default_rng(seed).choice([-1.0, 1.0], size=X),
        ]
        for a in seqs:
            worst = max(worst, dual_tk_ratio(a, X).ratio, dual_tk_two_prime_ratio(a, X).ratio)
    return worst <= 8, {"max_ratio": worst}


def twist_recovery(trials: int = 1000, seed: int = 0) -> tuple[bool, dict]:
    f = MultiplicativeFunction(
        "p^2i", lambda p, k: np.exp(2j * k * math.log(p)), lambda ps: np.exp(2j * np.log(ps.astype(np.float64)))
    )
    res = distance_minimize(f, 10**6, 5.0)
    located = abs(res.lambda_star - 2.0) <= 2 * res.grid_resolution and res.value <= 0.05
    ps = primes_up_to(10**4)
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        fs = [from_prime_values(f"u{i}", ps, np.exp(2j * math.pi * rng.random(ps.shape[0]))) for i in range(3)]
        d_fh, d_fg, d_gh = triangle_check(*fs, 10**4)
        worst = max(worst, d_fh - d_fg - d_gh)
    return located and worst <= 1e-9, {
        "lambda_star": res.lambda_star,
        "M": res.value,
        "grid": res.grid_resolution,
        "max_triangle_excess": worst,
    }


def affine_rigidity() -> tuple[bool, dict]:
    X = 10**6
    g = builtin("clog", 3.0)
    fit = affine_fit(g, X, 0.25)
    slow = max(abs(x) for pair in fit.slow_variation.values() for x in pair)
    frac = ae_log_report(g, X, fit, 0.1)
    ok = 2.94 <= fit.lam <= 3.06 and fit.sup_residual <= 0.05 and slow <= 0.1 and frac <= 0.01
    return ok, {"lambda": fit.lam, "sup_residual": fit.sup_residual, "max_slow_delta": slow, "ae_fraction": frac}


def erdos_verdicts() -> tuple[bool, dict]:
    X = 10**6
    v = {spec: weak_erdos_pipeline(_g(spec), X) for spec in ("clog:2", "erdos:101", "big_omega")}
    ok = (
        v["clog:2"].verdict == "consistent-with-c·log"
        and v["erdos:101"].verdict.startswith("hypothesis-failed")
        and v["big_omega"].verdict.startswith("hypothesis-failed")
        and abs(v["erdos:101"].decrease_density - 0.0099) < 1e-12
    )
    return ok, {
        "clog2": v["clog:2"].verdict,
        "erdos101": v["erdos:101"].verdict,
        "big_omega": v["big_omega"].verdict,
        "erdos101_density": v["erdos:101"].decrease_density,
        "big_omega_density": v["big_omega"].decrease_density,
    }


def sieve_complement() -> tuple[bool, dict]:
    params = mr_sieve_params(10**4, 10**6, override=[(100, 10**4)])
    d = s_complement_density(10**6, params)
    formula = mr_sieve_params(10**4, 10**6, eta=1 / 20)
    rel = abs(d.measured - d.euler_bound) / d.euler_bound
    return rel <= 0.2 and formula.degenerate, {
        "measured": d.measured,
        "euler_product": d.euler_bound,
        "relative_gap": rel,
        "formula_J": formula.J,
    }


def _numeric_snapshot(config: ScanConfig) -> list[float]:
    X = 2 * 10**5
    out: list[float] = []
    for spec in ("big_omega", "clog:1", "erdos:101"):
        g = _g(spec)
        st = global_stats(g, X, config=config)
        out += [st.A, st.B2, *st.moments.values()]
        out += list(gap_moments(g, X, (1, 2), config).values())
        out += list(telescoping_check(g, X, config)[:2])
        out.append(decrease_census(g, X, config=config).size)
        out.append(mean_vs_empirical(g, X, config).empirical)
        for r in interval_discrepancies(g, X, [10, 100, 1000], config):
            out += [r.l1, r.l2, r.trivial_bound_chain, r.cs_chain_bound]
    return [float(x) for x in out]


def determinism() -> tuple[bool, dict]:
    configs = [ScanConfig(segment_size=s, threads=t) for t in (1, 4) for s in (2**12, 2**20)]
    base = _numeric_snapshot(configs[0])
    worst = 0.0
    for cfg in configs[1:]:
        other = _numeric_snapshot(cfg)
        for a, b in zip(base, other):
            worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    repeat = _numeric_snapshot(configs[0]) == base
    fixed = _numeric_snapshot(configs[-1]) == _numeric_snapshot(configs[-1])
    return worst <= 1e-9 and repeat and fixed, {"max_relative_diff": worst, "repeatable": repeat and fixed, "n_values": len(base)}


CHECKS: list[tuple[int, str, Callable[[], tuple[bool, dict]], float | None]] = [
    (1, "telescoping identity", telescoping, 1.0),
    (2, "counterexample decrease-set census", counterexample_census, 5.0),
    (3, "B of c*log against |c| log X / sqrt 2", clog_variance_asymptotic, 10.0),
    (4, "tail functional of c*log vanishes", clog_tail_vanishes, None),
    (5, "CRT exponential-sum identity", crt_identity, 1.0),
    (6, "Turan-Kubilius ratio", tk_ratio, 10.0),
    (7, "second moment against the Ruzsa bracket", ruzsa_two_sided, None),
    (8, "short-interval l1 decay", l1_decay, 60.0),
    (9, "short-interval l2 smallness", l2_smallness, None),
    (10, "gap lower bound for omega", omega_gap_lower_bound, None),
    (11, "dual Turan-Kubilius ratios", dual_tk, None),
    (12, "twist recovery and triangle inequality", twist_recovery, None),
    (13, "affine fit of A_g(t) for c*log", affine_rigidity, None),
    (14, "decrease-set pipeline verdicts", erdos_verdicts, None),
    (15, "sieve-set complement density", sieve_complement, None),
    (16, "determinism across threads and segments", determinism, None),
]


def run_check(number: int) -> CheckResult:
    num, name, fn, budget = CHECKS[number - 1]
    t0 = time.perf_counter()
    ok, measured = fn()
    dt = time.perf_counter() - t0
    within = budget is None or dt <= budget
    measured["within_budget"] = within
    return CheckResult(num, name, ok and within, dt, budget, measured)


def run_suite(numbers=None) -> list[CheckResult]:
    return [run_check(n) for n in (numbers or range(1, len(CHECKS) + 1))]
