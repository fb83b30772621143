import math

import numpy as np
import pytest

from additive_lab import builtin
from additive_lab.additive import linear_combination, shift_by_log, zero
from additive_lab.errors import ComplexValueError, DegenerateFunctionError, DomainError
from additive_lab.stats import (
    approx_variance_sq,
    asymptotic_mean,
    centred_moment,
    centred_moments,
    global_stats,
    mean_vs_empirical,
    pp_sum_range,
    prime_power_tail,
    ruzsa_bracket,
    ruzsa_lambda0,
    tail_functional,
)

import oracles

OMEGA10 = [2, 4, 8, 3, 9, 5, 7]


def test_hand_values_at_ten(big_omega):
    A = math.fsum(math.log(q, oracles.trial_factor(q)[0][0]) / q * (1 - 1 / oracles.trial_factor(q)[0][0]) for q in OMEGA10)
    assert asymptotic_mean(big_omega, 10) == pytest.approx(A, rel=1e-14)
    assert asymptotic_mean(big_omega, 10) == pytest.approx(1.340319, abs=1e-6)
    B2 = 1 / 2 + 1 + 9 / 8 + 1 / 3 + 4 / 9 + 1 / 5 + 1 / 7
    assert approx_variance_sq(big_omega, 10) == pytest.approx(B2, rel=1e-14)


def test_zero_function():
    z = zero()
    assert asymptotic_mean(z, 10**4) == 0
    assert approx_variance_sq(z, 10**4) == 0
    assert ruzsa_lambda0(z, 10**4) == 0
    assert ruzsa_bracket(z, 10**4) == 0
    assert centred_moment(z, 10**4, 2.0, center=0) == 0
    m = mean_vs_empirical(z, 10**4)
    assert m.degenerate and m.deviation_scaled == 0
    with pytest.raises(DegenerateFunctionError):
        tail_functional(z, 100, 0.5)
    with pytest.raises(DegenerateFunctionError):
        prime_power_tail(z, 100)


def test_linearity_and_scaling(big_omega, omega):
    X = 10**4
    g = linear_combination(2.0, big_omega, -3.0, omega)
    assert asymptotic_mean(g, X) == pytest.approx(2 * asymptotic_mean(big_omega, X) - 3 * asymptotic_mean(omega, X))
    s = linear_combination(-4.0, big_omega)
    assert approx_variance_sq(s, X) == pytest.approx(16 * approx_variance_sq(big_omega, X), rel=1e-13)


def test_c_log_variance_asymptotic():
    X = 10**7
    B = math.sqrt(approx_variance_sq(builtin("c_log", 2.0), X))
    assert 0.9 <= B / ((2 / math.sqrt(2)) * math.log(X)) <= 1.1


def test_tail_functional_examples(big_omega):
    assert tail_functional(builtin("c_log", 1.0), 10**6, 0.4) == 0
    assert approx_variance_sq(big_omega, 10**4) > 4
    assert tail_functional(big_omega, 10**4, 0.5) == 0
    g = builtin("erdos", 5)
    B2 = approx_variance_sq(g, 10)
    # only g(5) = 5 clears B/eps; every log p stays below it
    eps = 0.9
    assert math.log(7) < math.sqrt(B2) / eps < 5
    assert tail_functional(g, 10, eps) == pytest.approx((25 / 5) / B2, rel=1e-14)


def test_prime_power_tail(omega):
    X = 10**4
    num = math.fsum(1 / q for q in oracles.prime_powers(X) if oracles.trial_factor(q)[0][1] >= 2)
    assert prime_power_tail(omega, X) == pytest.approx(num / approx_variance_sq(omega, X), rel=1e-12)
    # the k >= 2 share for log decays like (log X)^-2
    tails = [prime_power_tail(builtin("c_log", 1.0), x) for x in (10**4, 10**6, 10**7)]
    assert tails[0] > tails[1] > tails[2]
    assert tails[2] <= 0.05
    assert prime_power_tail(omega, 10**6) < prime_power_tail(omega, 10**3)


def test_lambda0_against_direct_sum():
    X = 10**4
    g = builtin("erdos", 7)
    direct = 2 / math.log(X) ** 2 * math.fsum(
        g.value(p) * math.log(p) / p for p in range(2, X + 1) if oracles.is_prime(p)
    )
    assert ruzsa_lambda0(g, X) == pytest.approx(direct, rel=1e-12)
    lam = ruzsa_lambda0(builtin("c_log", 1.0), 10**6)
    assert 0.5 < lam < 1.0
    assert ruzsa_lambda0(builtin("c_log", 1.0), 10**4) < lam
    with pytest.raises(ComplexValueError):
        ruzsa_lambda0(builtin("c_log", 1j), 100)


def test_bracket_is_direct_evaluation():
    g = builtin("c_log", 2.0)
    X = 10**5
    lam = ruzsa_lambda0(g, X)
    assert ruzsa_bracket(g, X) == pytest.approx(approx_variance_sq(shift_by_log(g, lam), X) + lam**2)
    assert ruzsa_bracket(g, X) > 0


def test_moments_against_brute(big_omega):
    X = 3000
    v = np.array(oracles.values(big_omega, X)[1:])
    A = asymptotic_mean(big_omega, X)
    got = centred_moments(big_omega, X, [1.0, 1.5, 2.0])
    for a in (1.0, 1.5, 2.0):
        assert got[a] == pytest.approx(math.fsum(np.abs(v - A) ** a) / X, rel=1e-12)


def test_moment_holder_monotone(omega):
    X = 10**5
    m = centred_moments(omega, X, [1.0, 1.5, 2.0])
    assert m[1.0] <= m[1.5] ** (1 / 1.5) + 1e-12 <= m[2.0] ** 0.5 + 2e-12


def test_omega_second_moment_order_of_B2(omega):
    X = 10**6
    ratio = centred_moment(omega, X, 2.0) / approx_variance_sq(omega, X)
    # empirical variance of omega is about loglog X - 1.83 while B^2 is about loglog X + 1.03
    assert 0.2 < ratio < 4


def test_mean_vs_empirical(big_omega):
    assert mean_vs_empirical(big_omega, 10**6).deviation_scaled <= 10
    m = mean_vs_empirical(builtin("c_log", 1.0), 10**5)
    assert m.empirical == pytest.approx(math.log(10**5) - 1, abs=1e-3)
    assert m.deviation_scaled <= 10


def test_pp_sum_range():
    X = 10**4
    s, _ = pp_sum_range(0.5, X)
    assert s == pytest.approx(math.fsum(1 / q for q in oracles.prime_powers(X) if q > 100), rel=1e-13)
    _, r = pp_sum_range(0.25, 10**6)
    assert r <= 1.5
    assert pp_sum_range(1 - 1e-15, 10**4)[0] == 0
    with pytest.raises(DomainError):
        pp_sum_range(1.0, 100)


def test_global_stats_bundle(big_omega):
    st = global_stats(big_omega, 10**4)
    assert st.B2 == approx_variance_sq(big_omega, 10**4)
    assert set(st.tail_F) == {0.1, 0.25, 0.5}
    assert st.moments[2.0] == pytest.approx(centred_moment(big_omega, 10**4, 2.0))
    z = global_stats(zero(), 100)
    assert z.pp_tail is None and all(v is None for v in z.tail_F.values())
