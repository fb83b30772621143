"""Additive functions defined by their values on prime powers.

An :class:`AdditiveFunction` carries a rule ``(p, k) -> value`` and an
extension mode.  In strongly additive mode only ``rule(p, 1)`` is consulted
and ``g(p**k) = g(p)``; in completely additive mode ``g(p**k) = k * g(p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DegenerateFunctionError, DomainError, EvaluationError
from .sieve import Factorization, prime_power_arrays, primes_up_to


class Mode(str, Enum):
    GENERAL = "general"
    STRONG = "strongly_additive"
    COMPLETE = "completely_additive"


Rule = Callable[[int, int], complex]
PrimeRule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class AdditiveFunction:
    name: str
    rule: Rule
    mode: Mode = Mode.GENERAL
    value_kind: str = "real"
    prime_rule: PrimeRule | None = field(default=None, repr=False)
    # rule coverage: largest p (strong/complete) or p**k (general) that is defined
    limit: int | None = None

    @property
    def is_complex(self) -> bool:
        return self.value_kind == "complex"

    def _raw(self, p: int, k: int):
        if self.limit is not None:
            reach = p if self.mode is not Mode.GENERAL else p**k
            if reach > self.limit:
                raise EvaluationError(f"{self.name}: undefined at {p}^{k}")
        try:
            v = self.rule(p, k)
        except (KeyError, IndexError, ValueError, ZeroDivisionError) as exc:
            raise EvaluationError(f"{self.name}: undefined at {p}^{k}") from exc
        if not np.isfinite(v):
            raise EvaluationError(f"{self.name}: non-finite value at {p}^{k}")
        return v

    def value(self, p: int, k: int = 1):
        """g(p**k) according to the extension mode."""
        if self.mode is Mode.GENERAL:
            return self._raw(p, k)
        v = self._raw(p, 1)
        return k * v if self.mode is Mode.COMPLETE else v

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        """Vectorised g(p) over an array of primes."""
        dtype = np.complex128 if self.is_complex else np.float64
        if self.prime_rule is not None:
            if self.limit is not None and primes.size and int(primes[-1]) > self.limit:
                raise EvaluationError(f"{self.name}: undefined at {int(primes[-1])}^1")
            out = np.asarray(self.prime_rule(primes), dtype=dtype)
            if not np.all(np.isfinite(out)):
                bad = int(primes[~np.isfinite(out)][0])
                raise EvaluationError(f"{self.name}: non-finite value at {bad}^1")
            return out
        return np.array([self._raw(p, 1) for p in primes.tolist()], dtype=dtype)

    def power_values(self, p: np.ndarray, k: np.ndarray) -> np.ndarray:
        """Vectorised g(p**k) over parallel arrays of primes and exponents."""
        dtype = np.complex128 if self.is_complex else np.float64
        out = np.empty(p.shape[0], dtype=dtype)
        ones = k == 1
        out[ones] = self.prime_values(p[ones])
        rest = np.flatnonzero(~ones)
        if rest.size:
            if self.mode is Mode.GENERAL:
                out[rest] = [self._raw(a, b) for a, b in zip(p[rest].tolist(), k[rest].tolist())]
            else:
                base = self.prime_values(p[rest])
                out[rest] = base * k[rest] if self.mode is Mode.COMPLETE else base
        return out


@dataclass(frozen=True)
class PrimePowerTable:
    """All prime powers up to X with g evaluated on them."""

    X: int
    p: np.ndarray
    k: np.ndarray
    pk: np.ndarray
    g: np.ndarray


@lru_cache(maxsize=64)
def tabulate(g: AdditiveFunction, X: int) -> PrimePowerTable:
    p, k, v = prime_power_arrays(int(X))
    vals = g.power_values(p, k)
    vals.flags.writeable = False
    return PrimePowerTable(int(X), p, k, v, vals)


def evaluate(g: AdditiveFunction, f: Factorization):
    """g(n) from the factorization of n; g(1) = 0."""
    total = 0.0
    for p, k in f.parts:
        total += g.value(p, k)
    return total


# ---------------------------------------------------------------- builtins


def zero() -> AdditiveFunction:
    return AdditiveFunction("zero", lambda p, k: 0.0, Mode.COMPLETE, prime_rule=lambda ps: np.zeros(ps.shape[0]))


def omega() -> AdditiveFunction:
    return AdditiveFunction("omega", lambda p, k: 1.0, Mode.STRONG, prime_rule=lambda ps: np.ones(ps.shape[0]))


def big_omega() -> AdditiveFunction:
    return AdditiveFunction("big_omega", lambda p, k: 1.0, Mode.COMPLETE, prime_rule=lambda ps: np.ones(ps.shape[0]))


def c_log(c: complex) -> AdditiveFunction:
    kind = "complex" if isinstance(c, complex) else "real"
    c = complex(c) if kind == "complex" else float(c)
    if not np.isfinite(c):
        raise DomainError("c must be finite")
    return AdditiveFunction(
        f"c_log({c:g})",
        lambda p, k: c * math.log(p),
        Mode.COMPLETE,
        value_kind=kind,
        prime_rule=lambda ps: c * np.log(ps.astype(np.float64)),
    )


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def erdos_counterexample(p0: int) -> AdditiveFunction:
    """Completely additive, log p at every prime except g(p0) = p0."""
    if not _is_prime(int(p0)):
        raise DomainError(f"p0={p0} is not prime")
    p0 = int(p0)

    def prime_rule(ps):
        out = np.log(ps.astype(np.float64))
        out[ps == p0] = float(p0)
        return out

    return AdditiveFunction(
        f"erdos({p0})",
        lambda p, k: float(p0) if p == p0 else math.log(p),
        Mode.COMPLETE,
        prime_rule=prime_rule,
    )


def builtin(name: str, param=None) -> AdditiveFunction:
    key = name.lower().replace("-", "_")
    if key in ("omega",):
        return omega()
    if key in ("big_omega", "bigomega"):
        return big_omega()
    if key in ("c_log", "clog"):
        return c_log(1.0 if param is None else param)
    if key in ("erdos", "erdos_counterexample"):
        if param is None:
            raise DomainError("erdos_counterexample needs a prime p0")
        return erdos_counterexample(int(param))
    if key == "zero":
        return zero()
    raise DomainError(f"unknown builtin function {name!r}")


# ------------------------------------------------------------ constructions


def strongly_additive_projection(g: AdditiveFunction) -> AdditiveFunction:
    if g.mode is Mode.STRONG:
        return g
    return AdditiveFunction(
        f"{g.name}*",
        lambda p, k: g.value(p, 1),
        Mode.STRONG,
        g.value_kind,
        prime_rule=g.prime_values,
        limit=g.limit if g.mode is not Mode.GENERAL else None,
    )


def split_by_prime_size(g: AdditiveFunction, X: int, delta: float):
    """Split g on primes into the part with |g(p)| <= B_g(X)/delta and the rest.

    Both parts are strongly additive and sum to g on primes.
    """
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    tab = tabulate(g, X)
    B = math.sqrt(float(np.sum(np.abs(tab.g) ** 2 / tab.pk)))
    if B == 0:
        raise DegenerateFunctionError(f"B_g({X}) = 0")
    thr = B / delta

    def in_c(p):
        return p <= X and abs(g.value(p, 1)) <= thr

    def small_rule(ps):
        v = g.prime_values(ps)
        return np.where((ps <= X) & (np.abs(v) <= thr), v, 0)

    def large_rule(ps):
        v = g.prime_values(ps)
        return np.where((ps <= X) & (np.abs(v) <= thr), 0, v)

    g_c = AdditiveFunction(
        f"{g.name}|C", lambda p, k: g.value(p, 1) if in_c(p) else 0.0, Mode.STRONG, g.value_kind, small_rule
    )
    g_rest = AdditiveFunction(
        f"{g.name}|P\\C", lambda p, k: 0.0 if in_c(p) else g.value(p, 1), Mode.STRONG, g.value_kind, large_rule
    )
    return g_c, g_rest


def shift_by_log(g: AdditiveFunction, lam: float) -> AdditiveFunction:
    """g - lam * log, i.e. g(p**k) - lam * k * log p on every prime power."""
    if not np.isfinite(lam):
        raise DomainError("lambda must be finite")
    if lam == 0:
        return g
    kind = "complex" if g.is_complex or isinstance(lam, complex) else "real"
    if g.mode is Mode.COMPLETE:
        return AdditiveFunction(
            f"{g.name}-{lam:g}log",
            lambda p, k: g.value(p, 1) - lam * math.log(p),
            Mode.COMPLETE,
            kind,
            prime_rule=lambda ps: g.prime_values(ps) - lam * np.log(ps.astype(np.float64)),
            limit=g.limit,
        )
    return AdditiveFunction(
        f"{g.name}-{lam:g}log",
        lambda p, k: g.value(p, k) - lam * k * math.log(p),
        Mode.GENERAL,
        kind,
        prime_rule=lambda ps: g.prime_values(ps) - lam * np.log(ps.astype(np.float64)),
    )


def linear_combination(a, g: AdditiveFunction, b=0.0, h: AdditiveFunction | None = None) -> AdditiveFunction:
    """a*g + b*h as a new additive function (h optional)."""
    h = h or zero()
    mode = g.mode if g.mode is h.mode else Mode.GENERAL
    kind = "complex" if (g.is_complex or h.is_complex or isinstance(a, complex) or isinstance(b, complex)) else "real"
    if mode is Mode.GENERAL:
        rule = lambda p, k: a * g.value(p, k) + b * h.value(p, k)  # noqa: E731
    else:
        rule = lambda p, k: a * g.value(p, 1) + b * h.value(p, 1)  # noqa: E731
    return AdditiveFunction(
        f"{a:g}*{g.name}+{b:g}*{h.name}",
        rule,
        mode,
        kind,
        prime_rule=lambda ps: a * g.prime_values(ps) + b * h.prime_values(ps),
    )


def real_part(g: AdditiveFunction) -> AdditiveFunction:
    if not g.is_complex:
        return g
    return AdditiveFunction(
        f"Re({g.name})", lambda p, k: g.value(p, k).real if g.mode is Mode.GENERAL else g.value(p, 1).real,
        g.mode, "real", prime_rule=lambda ps: g.prime_values(ps).real, limit=g.limit,
    )


def imag_part(g: AdditiveFunction) -> AdditiveFunction:
    if not g.is_complex:
        return zero()
    return AdditiveFunction(
        f"Im({g.name})", lambda p, k: g.value(p, k).imag if g.mode is Mode.GENERAL else g.value(p, 1).imag,
        g.mode, "real", prime_rule=lambda ps: g.prime_values(ps).imag, limit=g.limit,
    )


# ----------------------------------------------------------------- file IO

_MODE_WORDS = {"general": Mode.GENERAL, "strong": Mode.STRONG, "complete": Mode.COMPLETE}


def load_function_file(path: str | Path) -> AdditiveFunction:
    """Read a custom function file.

    Line 1 is ``mode=<general|strong|complete>``; then ``p k value`` lines in
    general mode or ``p value`` lines otherwise. ``#`` starts a comment.
    Prime powers of unlisted primes inside the listed range are 0; anything
    beyond the largest listed entry is undefined and raises on evaluation.
    """
    path = Path(path)
    lines = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or not lines[0].replace(" ", "").startswith("mode="):
        raise DomainError(f"{path}: first line must be mode=<general|strong|complete>")
    word = lines[0].replace(" ", "").split("=", 1)[1]
    if word not in _MODE_WORDS:
        raise DomainError(f"{path}: unknown mode {word!r}")
    mode = _MODE_WORDS[word]
    table: dict = {}
    width = 3 if mode is Mode.GENERAL else 2
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != width:
            raise DomainError(f"{path}:{lineno}: expected {width} fields")
        try:
            p = int(fields[0])
            k = int(fields[1]) if width == 3 else 1
            v = float(fields[-1])
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from None
        if k < 1:
            raise DomainError(f"{path}:{lineno}: exponent must be >= 1")
        table[(p, k) if width == 3 else p] = v
    if not table:
        raise DomainError(f"{path}: no values")
    ps = {key[0] if width == 3 else key for key in table}
    known = set(primes_up_to(max(ps)).tolist())
    bad = sorted(ps - known)
    if bad:
        raise DomainError(f"{path}: {bad[0]} is not prime")
    if mode is Mode.GENERAL:
        limit = max(p**k for p, k in table)
        rule = lambda p, k: table.get((p, k), 0.0)  # noqa: E731
    else:
        limit = max(ps)
        rule = lambda p, k: table.get(p, 0.0)  # noqa: E731
    return AdditiveFunction(f"file:{path.name}", rule, mode, limit=limit)
