"""Backend selection for the hot sieve kernels.

The compiled ``_core`` extension is used when it imports; otherwise (or when
``ADDITIVE_LAB_BACKEND=python`` is set) the numpy twins in ``_fallback`` are
used. Both expose the same four functions.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("ADDITIVE_LAB_BACKEND", "").lower() != "python":
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

spf_table = _impl.spf_table
factor_segment = _impl.factor_segment
additive_segment = _impl.additive_segment
compensated_sum = _impl.compensated_sum


def get_backend(name: str):
    """Return the kernel module for ``"cython"`` or ``"python"`` explicitly."""
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
