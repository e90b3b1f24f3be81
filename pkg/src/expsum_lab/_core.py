"""Backend selection for the enumeration kernel.

The compiled module is used when it imports; ``EXPSUM_LAB_PURE=1`` forces
the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py.trace_histogram}

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    _kernels = None
else:
    BACKENDS["compiled"] = _kernels.trace_histogram

if _kernels is not None and os.environ.get("EXPSUM_LAB_PURE", "") not in ("1", "true", "yes"):
    DEFAULT_BACKEND = "compiled"
else:
    DEFAULT_BACKEND = "python"


def get_kernel(name: str | None = None):
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
