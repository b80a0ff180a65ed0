"""Import-time selection between the compiled and pure kernel backends.

``PAIRMOMENTS_BACKEND=pure|compiled|auto`` overrides the default (``auto``:
use the extension when built, otherwise fall back silently).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_pure as _pure

_KIND_IDS = {"minimal": 0, "raw": 1, "even": 2, "product": 3}

_choice = os.environ.get("PAIRMOMENTS_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "pure", "compiled"):
    raise ImportError(f"PAIRMOMENTS_BACKEND must be auto, pure or compiled, got {_choice!r}")

_compiled = None
if _choice in ("auto", "compiled"):
    try:
        from . import _ckernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
    if _choice == "compiled" and _compiled is None:
        raise ImportError("PAIRMOMENTS_BACKEND=compiled but the extension is not built")

USING_COMPILED = _compiled is not None


def backend_name() -> str:
    return "compiled" if USING_COMPILED else "pure"


def kernel_scalar(kind: str, k: int, x) -> float:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if USING_COMPILED:
        return _compiled.kernel_value(_KIND_IDS[kind], k, x)
    return _pure.kernel_value(kind, k, x)


def kernel_batch(kind: str, k: int, X) -> np.ndarray:
    """Kernel values for every row of the 2-D batch ``X``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("kernel_batch expects a 2-D row batch")
    if USING_COMPILED:
        return _compiled.kernel_values(_KIND_IDS[kind], k, X)
    return _pure.kernel_values(kind, k, X)
