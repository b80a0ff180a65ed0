"""Pure numpy evaluation of the pairwise-difference moment kernels.

Reference backend. The compiled twin in ``_ckernels`` implements the same
recursions; ``backend`` picks one at import time. All evaluators accept a
1-D tuple (scalar result) or a 2-D row batch (one result per row), because
the recursion is written against ``x[..., column]`` views.

Kernel families (``kind``):

* ``minimal``  -- order-k kernel whose tuple average is unbiased for the
  k-th central moment; third-order base symmetrized in its first two slots.
* ``raw``      -- same recursion with the plain (asymmetric) third-order
  base ``(x1 - x3)(x1 - x2)^2``.
* ``even``     -- even-order variant built from the k-th power of a single
  difference plus lower-order ``raw`` blocks.
* ``product``  -- product of deviations from a reference replication,
  ``prod(x0 - x_i)``; arity is ``k + 1``.
"""

from __future__ import annotations

from math import comb

import numpy as np

KINDS = ("minimal", "raw", "even", "product")


def arity(kind: str, k: int) -> int:
    return k + 1 if kind == "product" else k


def _rec(x, off, a, memo, sym3):
    """Order-a difference kernel on the block starting at column ``off``.

    Memoized on (offset, length); sub-blocks within one recursion are
    disjoint, so the memo is valid for the whole top-level call.
    """
    key = (off, a)
    if key in memo:
        return memo[key]
    if a == 1:
        v = 0.0 * x[..., off]
    elif a == 2:
        d12 = x[..., off] - x[..., off + 1]
        v = 0.5 * d12 * d12
    elif a == 3:
        d12 = x[..., off] - x[..., off + 1]
        if sym3:
            v = 0.5 * d12 * d12 * (
                (x[..., off] - x[..., off + 2]) + (x[..., off + 1] - x[..., off + 2])
            )
        else:
            v = (x[..., off] - x[..., off + 2]) * d12 * d12
    elif a == 4:
        d12 = x[..., off] - x[..., off + 1]
        d34 = x[..., off + 2] - x[..., off + 3]
        v = 0.5 * d12 ** 4 - 0.75 * (d12 * d12) * (d34 * d34)
    else:
        d12 = x[..., off] - x[..., off + 1]
        d13 = x[..., off] - x[..., off + 2]
        v = d13 * d12 ** (a - 1)
        for j in range(2, a - 1):
            sign = -1.0 if j & 1 else 1.0
            v = v - sign * comb(a - 1, j) * _rec(x, off, j, memo, sym3) * _rec(
                x, off + j, a - j, memo, sym3
            )
    memo[key] = v
    return v


def _even(x, a):
    d12 = x[..., 0] - x[..., 1]
    acc = d12 ** a
    memo = {}
    for j in range(2, a - 1):
        sign = -1.0 if j & 1 else 1.0
        acc = acc - sign * comb(a, j) * _rec(x, 0, j, memo, False) * _rec(
            x, j, a - j, memo, False
        )
    return 0.5 * acc


def _product(x, a):
    v = x[..., 0] - x[..., 1]
    for i in range(2, a):
        v = v * (x[..., 0] - x[..., i])
    return v


def _eval(kind, k, x):
    if kind == "minimal":
        return _rec(x, 0, k, {}, True)
    if kind == "raw":
        if k == 1:
            return 0.0 * x[..., 0]
        return _rec(x, 0, k, {}, False)
    if kind == "even":
        return _even(x, k)
    if kind == "product":
        return _product(x, k + 1)
    raise ValueError(f"unknown kernel kind {kind!r}")


def kernel_value(kind: str, k: int, x) -> float:
    """Evaluate one kernel on a single tuple (length must match the arity)."""
    x = np.asarray(x, dtype=np.float64)
    return float(_eval(kind, k, x))


def kernel_values(kind: str, k: int, X) -> np.ndarray:
    """Evaluate one kernel on every row of a 2-D batch."""
    X = np.asarray(X, dtype=np.float64)
    out = _eval(kind, k, X)
    return np.asarray(out, dtype=np.float64)
