import math

import numpy as np
import pytest

from additive_lab import builtin
from additive_lab.errors import DomainError
from additive_lab.pretentious import (
    constant_one,
    condition_ii_check,
    dichotomy_report,
    distance_minimize,
    distance_sq,
    divisor_bound_check,
    divisor_power,
    euler_products,
    exp_additive,
    f_z,
    from_prime_values,
    liouville,
    pretentious_distance_sq,
    rho_distance_sq,
    t0_minimize,
    triangle_check,
    twist,
)
from additive_lab.sieve import primes_up_to

import oracles


def _primes(X):
    return [p for p in range(2, X + 1) if oracles.is_prime(p)]


def test_exp_additive_basics(omega):
    X = 10**4
    ps = primes_up_to(X)
    assert np.allclose(exp_additive(omega, 0.0, X).prime_values(ps), 1)
    assert np.allclose(np.abs(exp_additive(builtin("big_omega"), 0.3, X).prime_values(ps)), 1, atol=1e-14)
    G = exp_additive(builtin("c_log", 1.0), 0.4, X)
    B = math.sqrt(math.fsum(math.log(q) ** 2 / q for q in oracles.prime_powers(X)))
    lam = 2 * math.pi * 0.4 / B
    sample = ps[:100]
    assert np.allclose(G.prime_values(sample), twist(lam).prime_values(sample), atol=1e-12)


def test_distance_examples():
    X = 10**4
    assert pretentious_distance_sq(constant_one(), 0.0, X) == 0
    assert pretentious_distance_sq(twist(2.0), 2.0, X) == pytest.approx(0, abs=1e-12)
    direct = math.fsum(2 / p for p in _primes(X))
    assert distance_sq(liouville(), constant_one(), X) == pytest.approx(direct, rel=1e-13)


def test_distance_rejects_large_values():
    two = from_prime_values("2", primes_up_to(100), np.full(25, 2.0))
    with pytest.raises(DomainError):
        pretentious_distance_sq(two, 0.0, 100)


def test_minimize_one():
    r = distance_minimize(constant_one(), 10**4, 3.0)
    assert r.value == pytest.approx(0, abs=1e-9)
    assert abs(r.lambda_star) < 1e-3


def test_minimize_finds_twist():
    X = 10**6
    r = distance_minimize(twist(2.0), X, 5.0)
    assert abs(r.lambda_star - 2.0) <= r.grid_resolution
    assert r.value <= 0.05
    assert r.value <= pretentious_distance_sq(twist(2.0), 0.0, X)


def test_minimize_with_too_small_range():
    # the true twist lies outside [-1, 1]; the best point inside is a shallow interior dip
    X = 10**5
    f = twist(2.0)
    r = distance_minimize(f, X, 1.0)
    fine = np.linspace(-1, 1, 4001)
    brute = min(pretentious_distance_sq(f, lam, X) for lam in fine)
    assert abs(r.lambda_star) <= 1.0
    assert r.value <= brute + 1e-9
    assert r.value > 1


def test_triangle_inequality():
    X = 10**4
    ps = primes_up_to(X)
    rng = np.random.default_rng(11)
    worst = -math.inf
    for i in range(1000):
        fs = [from_prime_values(str(j), ps, np.exp(2j * math.pi * rng.random(ps.shape[0]))) for j in range(3)]
        fh, fg, gh = triangle_check(*fs, X)
        worst = max(worst, fh - fg - gh)
    assert worst <= 1e-9
    f = fs[0]
    fh, fg, gh = triangle_check(f, f, fs[2], X)
    assert fg == 0 and fh == gh


def test_rho_examples():
    assert rho_distance_sq(constant_one(), 0.0, 10**4) == 0
    ps = primes_up_to(1000)
    f = from_prime_values("2p^i", ps, 2 * np.exp(1j * np.log(ps.astype(float))))
    assert rho_distance_sq(f, 1.0, 1000) == pytest.approx(0, abs=1e-12)
    direct = math.fsum(2 * (1 - math.cos(math.log(p))) / p for p in _primes(1000))
    assert rho_distance_sq(f, 0.0, 1000) == pytest.approx(direct, rel=1e-12)


def test_fz_real_rho_zero(omega):
    F = f_z(omega, 10**5, 0.1, 1.01)
    assert rho_distance_sq(F, 0.0, 10**5) == pytest.approx(0, abs=1e-12)


def test_t0_small_for_fz(omega):
    X = 10**5
    F = f_z(omega, X, 0.1, 1 + 0.01j)
    r = t0_minimize(F, X)
    assert abs(r.lambda_star) * math.log(X) < 1


def test_euler_products():
    X = 10**4
    assert euler_products(constant_one(), X) == (1.0, 1.0)
    ps = primes_up_to(X)
    two = from_prime_values("2", ps, np.full(ps.shape[0], 2.0))
    H, _ = euler_products(two, X)
    assert math.log(H) == pytest.approx(math.fsum(math.log1p(1 / p) for p in _primes(X)), rel=1e-12)
    zero_f = from_prime_values("0", ps, np.zeros(ps.shape[0]))
    _, P = euler_products(zero_f, X)
    assert math.log(P) == pytest.approx(math.fsum(math.log1p(-1 / p) for p in _primes(X)), rel=1e-12)


def test_euler_product_monotone_in_X(omega):
    F = f_z(omega, 10**6, 0.1, 1.01)
    H1, _ = euler_products(F, 10**4)
    H2, _ = euler_products(F, 10**6)
    assert 1 <= H1 <= H2


def test_fz_euler_product_bounded(omega):
    H, _ = euler_products(f_z(omega, 10**6, 0.1, 1 + 0.01j), 10**6)
    assert 1 <= H <= 3


def test_divisor_power():
    assert divisor_power(2, 1) == 2
    assert divisor_power(3, 2) == 6
    assert divisor_power(2.5, 0) == 1


def test_divisor_bound(omega):
    X = 10**4
    assert divisor_bound_check(f_z(omega, X, 0.1, 1.01), X, 3)["passed"]
    ps = primes_up_to(X)
    big = from_prime_values("4", ps, np.full(ps.shape[0], 4.0))
    r = divisor_bound_check(big, X, 3)
    assert not r["passed"] and r["first_violation"]["n"] == 2


def test_condition_ii(omega):
    assert condition_ii_check(constant_one(), 10**4, 1.0)["passed"]
    assert condition_ii_check(f_z(omega, 10**6, 0.1, 1.01), 10**6, 0.99)["min_margin"] >= 0
    ps = primes_up_to(10**4)
    nil = from_prime_values("0", ps, np.zeros(ps.shape[0]))
    assert not condition_ii_check(nil, 10**4, 1.0)["passed"]


def test_dichotomy(omega):
    r = dichotomy_report(omega, 10**5, 0.05, 0.1)
    assert r["branch"] in ("large-distance", "bounded-twist")
    if r["branch"] == "bounded-twist":
        assert abs(r["lambda_star"]) <= r["T"]
