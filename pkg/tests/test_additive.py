import math

import numpy as np
import pytest

from additive_lab import builtin
from additive_lab.additive import (
    Mode,
    evaluate,
    linear_combination,
    load_function_file,
    shift_by_log,
    split_by_prime_size,
    strongly_additive_projection,
    tabulate,
    zero,
)
from additive_lab.errors import DegenerateFunctionError, DomainError, EvaluationError
from additive_lab.scan import evaluate_range
from additive_lab.sieve import build_spf_table, factorize as _factorize
from additive_lab.stats import approx_variance_sq

import oracles

_TABLE = build_spf_table(10**6)


def factorize(n):
    return _factorize(n, _TABLE)


def test_small_values(big_omega, omega):
    assert evaluate(big_omega, factorize(12)) == 3
    assert evaluate(omega, factorize(12)) == 2
    assert evaluate(big_omega, factorize(8)) == 3
    assert evaluate(big_omega, factorize(1)) == 0
    g = builtin("erdos", 5)
    assert evaluate(g, factorize(10)) == pytest.approx(math.log(2) + 5, abs=1e-12)
    assert evaluate(builtin("c_log", 2.0), factorize(36)) == pytest.approx(2 * math.log(36), rel=1e-14)


def test_erdos_counterexample_is_log_off_p0():
    g = builtin("erdos", 5)
    v = evaluate_range(g, 1, 10_001)
    n = np.arange(1, 10_001)
    off = n % 5 != 0
    assert np.allclose(v[off], np.log(n[off]), rtol=0, atol=1e-9)
    assert np.all(np.abs(v[~off] - np.log(n[~off])) > 1)


def test_erdos_rejects_composite():
    with pytest.raises(DomainError):
        builtin("erdos", 6)


def test_modes():
    assert builtin("omega").mode is Mode.STRONG
    assert builtin("big_omega").mode is Mode.COMPLETE
    assert builtin("c_log", 1.5).value(3, 4) == pytest.approx(4 * 1.5 * math.log(3))


def test_additivity_on_coprime_pairs():
    rng = np.random.default_rng(7)
    g = builtin("c_log", 1.0)
    h = builtin("omega")
    done = 0
    while done < 500:
        n, m = (int(x) for x in rng.integers(1, 1000, size=2))
        if math.gcd(n, m) != 1:
            continue
        assert evaluate(h, factorize(n * m)) == evaluate(h, factorize(n)) + evaluate(h, factorize(m))
        a = evaluate(g, factorize(n * m))
        assert a == pytest.approx(evaluate(g, factorize(n)) + evaluate(g, factorize(m)), rel=1e-12, abs=1e-12)
        done += 1


def test_complete_additivity_arbitrary_pairs(big_omega):
    rng = np.random.default_rng(3)
    for n, m in rng.integers(1, 1000, size=(300, 2)).tolist():
        assert evaluate(big_omega, factorize(n * m)) == evaluate(big_omega, factorize(n)) + evaluate(
            big_omega, factorize(m)
        )


def test_sieved_values_match_trial_division(big_omega):
    g = builtin("erdos", 7)
    for fn in (big_omega, g):
        v = evaluate_range(fn, 1, 2001)
        ref = oracles.values(fn, 2000)[1:]
        assert np.allclose(v, ref, rtol=1e-13, atol=1e-13)


def test_projection(big_omega, omega):
    star = strongly_additive_projection(big_omega)
    assert np.array_equal(evaluate_range(star, 1, 10_001), evaluate_range(omega, 1, 10_001))
    assert strongly_additive_projection(omega) is omega
    diff = linear_combination(1.0, big_omega, -1.0, star)
    # (k - 1)^2 / p^k summed over prime powers, by hand
    X = 10**5
    direct = math.fsum((k - 1) ** 2 / q for q in oracles.prime_powers(X) for k in [_exponent(q)])
    assert approx_variance_sq(diff, X) == pytest.approx(direct, rel=1e-12)
    # the ratio only shrinks like (loglog X)^(-1/2)
    ratios = [math.sqrt(approx_variance_sq(diff, x) / approx_variance_sq(big_omega, x)) for x in (10**3, 10**6)]
    assert ratios[1] < ratios[0] < 1


def _exponent(q):
    return oracles.trial_factor(q)[0][1]


def test_split_omega_has_no_large_part(omega):
    _, rest = split_by_prime_size(omega, 10**4, 0.5)
    primes = tabulate(omega, 10**4).p
    assert not np.any(rest.prime_values(primes))


def test_split_isolates_p0():
    g = builtin("erdos", 5)
    X = 10  # B_g(X) < 5 only at small X
    B = math.sqrt(approx_variance_sq(g, X))
    delta = 1.1 * B / 5
    assert delta < 1
    small, rest = split_by_prime_size(g, X, delta)
    primes = tabulate(g, X).p[tabulate(g, X).k == 1]
    support = primes[rest.prime_values(primes) != 0]
    assert support.tolist() == [5]
    star = strongly_additive_projection(g)
    for n in (6, 10, 30, 35, 210):
        f = factorize(n)
        assert evaluate(small, f) + evaluate(rest, f) == pytest.approx(evaluate(star, f), abs=1e-12)


def test_split_degenerate():
    with pytest.raises(DegenerateFunctionError):
        split_by_prime_size(zero(), 100, 0.5)


def test_shift_by_log():
    g = shift_by_log(builtin("c_log", 3.0), 3.0)
    t = tabulate(g, 10**4)
    assert np.allclose(t.g, 0, atol=1e-12)
    e = builtin("erdos", 5)
    assert shift_by_log(e, 0) is e
    X = 10**5
    shifted = approx_variance_sq(shift_by_log(e, 1.0), X)
    direct = math.fsum((5 * k - k * math.log(5)) ** 2 / 5**k for k in range(1, 8) if 5**k <= X)
    assert shifted == pytest.approx(direct, rel=1e-12)


def test_shift_of_strong_function_becomes_general(omega):
    s = shift_by_log(omega, 0.5)
    assert s.mode is Mode.GENERAL
    assert s.value(2, 3) == pytest.approx(1 - 1.5 * math.log(2))


def test_load_function_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("mode=complete\n# comment\n2 1.5\n3 -1\n7 2\n")
    g = load_function_file(path)
    assert evaluate(g, factorize(2**3 * 5 * 7)) == pytest.approx(4.5 + 0 + 2)
    with pytest.raises(EvaluationError):
        evaluate(g, factorize(11))

    gen = tmp_path / "gen.txt"
    gen.write_text("mode=general\n2 1 1\n2 2 5\n3 1 2\n")
    h = load_function_file(gen)
    assert evaluate(h, factorize(12)) == 7
    with pytest.raises(EvaluationError):
        h.value(2, 3)


@pytest.mark.parametrize(
    "body",
    ["2 1\n", "mode=odd\n2 1\n", "mode=strong\n4 1\n", "mode=strong\n2\n", "mode=strong\n"],
)
def test_load_function_file_rejects(tmp_path, body):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(DomainError):
        load_function_file(path)
