"""Windowed evaluation of additive functions over integer ranges.

Windows are produced by the segmented kernel, optionally on a thread pool,
and always delivered in ascending order so every reduction downstream is
deterministic for a fixed segment size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from . import kernels
from .additive import AdditiveFunction, real_part, imag_part
from .errors import ConfigurationError, DomainError, EvaluationError
from .sieve import DEFAULT_SEGMENT, primes_up_to, segment_bounds


@dataclass(frozen=True)
class ScanConfig:
    segment_size: int = DEFAULT_SEGMENT
    threads: int = 1

    def __post_init__(self):
        if self.segment_size < 1:
            raise ConfigurationError("segment_size must be >= 1")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")


DEFAULT_CONFIG = ScanConfig()


@dataclass(frozen=True)
class _Prepared:
    base: np.ndarray
    table: np.ndarray
    primes: np.ndarray
    prime_vals: np.ndarray


@lru_cache(maxsize=8)
def _prepare(g: AdditiveFunction, top: int) -> _Prepared:
    # top is the largest n to be evaluated
    primes = primes_up_to(top)
    base = np.ascontiguousarray(primes[primes <= math.isqrt(top)])
    kmax = max(1, int(math.log2(top)) + 1) if top >= 2 else 1
    table = np.zeros((base.shape[0], kmax + 1), dtype=np.float64)
    for j, p in enumerate(base.tolist()):
        k, pk = 1, p
        while pk <= top:
            table[j, k] = g.value(p, k)
            k += 1
            pk *= p
    vals = np.ascontiguousarray(g.prime_values(primes), dtype=np.float64)
    return _Prepared(base, table, np.ascontiguousarray(primes), vals)


def _real_window(g: AdditiveFunction, prep: _Prepared, a: int, b: int) -> np.ndarray:
    vals, missing = kernels.additive_segment(a, b, prep.base, prep.table, prep.primes, prep.prime_vals)
    if missing:
        raise EvaluationError(f"{g.name}: cofactor {missing} not covered by the prime list")
    return vals


def iter_values(
    g: AdditiveFunction, lo: int, hi: int, config: ScanConfig | None = None
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, g(start..end-1))`` windows covering ``[lo, hi)`` in order."""
    config = config or DEFAULT_CONFIG
    lo, hi = int(lo), int(hi)
    if lo < 1 or hi < lo:
        raise DomainError(f"invalid range [{lo}, {hi})")
    if hi == lo:
        return
    parts = [real_part(g), imag_part(g)] if g.is_complex else [g]
    preps = [_prepare(part, hi - 1) for part in parts]

    def window(bounds):
        a, b = bounds
        out = [_real_window(part, prep, a, b) for part, prep in zip(parts, preps)]
        return a, (out[0] + 1j * out[1] if len(out) == 2 else out[0])

    bounds = segment_bounds(lo, hi, config.segment_size)
    if config.threads == 1:
        for bd in bounds:
            yield window(bd)
        return
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        step = 2 * config.threads
        for i in range(0, len(bounds), step):
            yield from pool.map(window, bounds[i : i + step])


def evaluate_range(g: AdditiveFunction, lo: int, hi: int, config: ScanConfig | None = None) -> np.ndarray:
    """g(n) for n in [lo, hi) as one array."""
    chunks = [v for _, v in iter_values(g, lo, hi, config)]
    if not chunks:
        return np.zeros(0, dtype=np.complex128 if g.is_complex else np.float64)
    return np.concatenate(chunks)


def csum(a: np.ndarray):
    """Compensated sum; complex arrays are summed part by part."""
    if np.iscomplexobj(a):
        return complex(csum(a.real), csum(a.imag))
    return float(kernels.compensated_sum(np.ascontiguousarray(a, dtype=np.float64)))


def fmerge(partials) -> float | complex:
    """Exactly rounded merge of per-window partial sums."""
    partials = list(partials)
    if any(isinstance(x, complex) for x in partials):
        return complex(math.fsum(complex(x).real for x in partials), math.fsum(complex(x).imag for x in partials))
    return math.fsum(partials)


def reduce_windows(
    g: AdditiveFunction,
    lo: int,
    hi: int,
    fns: dict[str, Callable[[int, np.ndarray], float]],
    config: ScanConfig | None = None,
) -> dict[str, float]:
    """Apply several per-window partial-sum functions in one pass and merge."""
    acc: dict[str, list] = {k: [] for k in fns}
    for a, v in iter_values(g, lo, hi, config):
        for k, fn in fns.items():
            acc[k].append(fn(a, v))
    return {k: fmerge(v) for k, v in acc.items()}
