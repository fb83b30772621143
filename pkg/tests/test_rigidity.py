import math

import numpy as np
import pytest

from additive_lab import builtin
from additive_lab.additive import linear_combination, zero
from additive_lab.errors import ComplexValueError, DomainError
from additive_lab.rigidity import (
    _MeanCurve,
    ae_log_report,
    affine_fit,
    best_lambda_l2,
    elliott_range_floor,
    elliott_rhs,
    elliott_sum,
    growth_dichotomy_report,
    slow_variation_profile,
    weak_erdos_pipeline,
)
from additive_lab.stats import approx_variance_sq, asymptotic_mean

import oracles


def test_mean_curve_matches_asymptotic_mean(big_omega):
    curve = _MeanCurve(big_omega, 10**4)
    for t in (2, 10, 99.5, 1000, 10**4):
        assert curve(np.array([t]))[0] == pytest.approx(asymptotic_mean(big_omega, int(t)), rel=1e-13)


def test_elliott_sum_against_direct():
    g = builtin("erdos", 7)
    X, delta = 5000, 0.25
    A = lambda t: asymptotic_mean(g, int(t)) if t >= 2 else 0.0  # noqa: E731
    direct = math.fsum(
        abs(sum(g.value(p, k) for p, k in oracles.trial_factor(q)) - A(X) + A(X // q)) / q
        for q in oracles.prime_powers(X)
        if q > X**delta
    )
    assert elliott_sum(g, X, delta) == pytest.approx(direct, rel=1e-12)


def test_elliott_examples(big_omega):
    X = 10**6
    assert elliott_sum(zero(), X, 0.25) == 0
    g = builtin("c_log", 1.0)
    assert elliott_sum(g, X, 0.25) / math.sqrt(approx_variance_sq(g, X)) <= 0.2
    assert elliott_sum(big_omega, X, 0.25) <= elliott_rhs(big_omega, X, 0.25)
    with pytest.raises(DomainError):
        elliott_sum(g, X, 0.3)
    # the stated lower end of the delta range exceeds 1/4 at this scale
    assert elliott_range_floor(X) > 0.25


def test_elliott_log_decreases_with_X():
    g = builtin("c_log", 1.0)
    vals = [elliott_sum(g, x, 0.25) / math.sqrt(approx_variance_sq(g, x)) for x in (10**4, 10**5, 10**6)]
    assert vals[0] > vals[1] > vals[2]


def test_best_lambda_exact_cases():
    fit = best_lambda_l2(builtin("c_log", 7.0), 10**5)
    assert fit.lambda_star == pytest.approx(7, rel=1e-13)
    assert fit.residual == pytest.approx(0, abs=1e-18 * 49 * 10**5)
    z = best_lambda_l2(zero(), 10**4)
    assert z.lambda_star == 0 and z.residual == 0
    with pytest.raises(ComplexValueError):
        best_lambda_l2(builtin("c_log", 1j), 100)


def test_best_lambda_is_argmin(big_omega):
    X = 10**5
    fit = best_lambda_l2(big_omega, X)
    qs = oracles.prime_powers(X)

    def res(lam):
        return math.fsum(
            (sum(big_omega.value(p, k) for p, k in oracles.trial_factor(q)) - lam * math.log(q)) ** 2 / q for q in qs
        )

    assert fit.residual == pytest.approx(res(fit.lambda_star), rel=1e-10)
    step = 0.01 * abs(fit.lambda_star) + 0.01
    assert fit.residual <= res(fit.lambda_star + step)
    assert fit.residual <= res(fit.lambda_star - step)


def test_best_lambda_omega_vs_lambda0(big_omega):
    fit = best_lambda_l2(big_omega, 10**6)
    assert fit.lambda_star > 0
    assert 0.5 <= fit.lambda_star / fit.lambda0 <= 2


def test_affine_fit_log():
    fit = affine_fit(builtin("c_log", 3.0), 10**6)
    assert fit.lam == pytest.approx(3, rel=0.02)
    assert fit.sup_residual <= 0.05


def test_affine_fit_independent_slope():
    # slope of A_g(t) against log t at the grid points, recomputed with a plain polyfit
    g = builtin("erdos", 101)
    X = 10**5
    fit = affine_fit(g, X)
    y = [asymptotic_mean(g, int(t)) for t in fit.t_grid]
    slope, icpt = np.polyfit(np.log(fit.t_grid), y, 1)
    assert fit.lam == pytest.approx(slope, rel=1e-10)
    assert fit.eta == pytest.approx(-icpt, rel=1e-8, abs=1e-10)


def test_affine_fit_linear_in_log(big_omega):
    X = 10**5
    a = affine_fit(big_omega, X)
    b = affine_fit(linear_combination(1.0, big_omega, 2.0, builtin("c_log", 1.0)), X)
    c = affine_fit(builtin("c_log", 2.0), X)
    assert b.lam == pytest.approx(a.lam + c.lam, rel=1e-10)
    assert b.eta == pytest.approx(a.eta + c.eta, rel=1e-8)


def test_affine_fit_zero():
    fit = affine_fit(zero(), 10**4)
    assert fit.lam == 0 and fit.eta == 0 and fit.sup_residual == 0


def test_affine_fit_counterexample():
    fit = affine_fit(builtin("erdos", 101), 10**6)
    assert fit.lam == pytest.approx(1, rel=0.1)


def test_ae_log_report(big_omega):
    g = builtin("c_log", 2.0)
    X = 10**5
    fit = affine_fit(g, X)
    assert ae_log_report(g, X, fit, 0.1) <= 0.01
    z = zero()
    assert ae_log_report(z, 10**4, affine_fit(z, 10**4), 0.3) == 0
    frac = ae_log_report(big_omega, X, affine_fit(big_omega, X), 0.5)
    assert 0 <= frac <= 1


def test_slow_variation():
    prof = slow_variation_profile(builtin("c_log", 5.0), 10**6, (0.5, 0.75, 1.0))
    assert all(abs(v) < 1e-12 for v in prof.values())
    prof = slow_variation_profile(builtin("erdos", 101), 10**6, (0.5, 0.75))
    assert all(abs(v) <= 0.2 for v in prof.values())
    with pytest.raises(DomainError):
        slow_variation_profile(builtin("c_log", 1.0), 10**6, (0.4,))


def test_growth_dichotomy(omega):
    rep = growth_dichotomy_report(builtin("c_log", 1.0), [10**4, 10**5, 10**6])
    assert 0.8 <= rep["rows"][-1]["growth_exponent"] <= 1.2
    assert growth_dichotomy_report(zero(), [10**3, 10**4, 10**5])["degenerate"]
    rep = growth_dichotomy_report(omega, [10**4, 10**5, 10**6])
    assert rep["rows"][-1]["growth_exponent"] <= 0.5
    with pytest.raises(DomainError):
        growth_dichotomy_report(omega, [10**5, 10**4, 10**6])


def test_weak_erdos_verdicts(big_omega):
    X = 10**6
    v = weak_erdos_pipeline(builtin("c_log", 2.0), X)
    assert v.verdict == "consistent-with-c·log"
    assert v.decrease_count == 0
    assert v.gap_l1 == pytest.approx(2 * math.log(X) / X, rel=1e-9)
    v = weak_erdos_pipeline(builtin("erdos", 101), X)
    assert v.verdict == "hypothesis-failed(decrease-set-density)"
    assert v.decrease_density == pytest.approx(0.0099)
    assert v.decrease_density > math.log(X) ** -2.1
    v = weak_erdos_pipeline(big_omega, 10**5)
    assert v.verdict == "hypothesis-failed(decrease-set-density)"
    assert 0.25 <= v.decrease_density <= 0.45
