"""Unbiased difference-kernel building blocks for central moments.

Every kernel here depends on its arguments only through pairwise
differences, so each one is invariant under a common shift of all
coordinates and scales like ``lambda**k`` under ``x -> lambda * x``.
Averaged over i.i.d. replications, the order-k kernels all have the k-th
central moment as their expectation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from . import backend

#: Largest supported kernel order. Keeps binomial weights and double
#: precision comfortably exact through the recursions.
K_MAX = 16


def binomial(n: int, j: int) -> int:
    """Exact binomial coefficient, valid for 0 <= j <= n <= 2 * K_MAX."""
    if n < 0 or j < 0:
        raise ValueError("binomial requires nonnegative arguments")
    if j > n:
        raise ValueError(f"binomial requires j <= n, got ({n}, {j})")
    if n > 2 * K_MAX:
        raise ValueError(f"binomial is specified for n <= {2 * K_MAX}")
    return comb(n, j)


def _check_order(k: int, low: int = 2) -> None:
    if not low <= k <= K_MAX:
        raise ValueError(f"kernel order must be in [{low}, {K_MAX}], got {k}")


def _check_arity(x, a: int) -> None:
    if len(x) != a:
        raise ValueError(f"expected a tuple of length {a}, got {len(x)}")


def kernel_minimal(k: int, x) -> float:
    """Minimal unbiased kernel for the k-th central moment (k inputs).

    Bases: half a squared difference at order 2; the symmetrized
    third-order form ``(x1-x2)^2 [(x1-x3) + (x2-x3)] / 2``; and the
    fourth-order two-block form. Higher orders follow the recursion with
    disjoint argument blocks.
    """
    _check_order(k)
    _check_arity(x, k)
    return backend.kernel_scalar("minimal", k, x)


def kernel_minimal_raw(k: int, x) -> float:
    """Variant of :func:`kernel_minimal` with the plain third-order base.

    Identical at orders 1, 2 and 4; at order 3 it is
    ``(x1-x3)(x1-x2)^2``, which differs pointwise from the symmetrized
    base although both average to the third central moment. ``k=1``
    accepts an empty or length-1 tuple and returns 0.
    """
    if k == 1:
        if len(x) > 1:
            raise ValueError("order-1 kernel takes an empty or length-1 tuple")
        return 0.0
    _check_order(k)
    _check_arity(x, k)
    return backend.kernel_scalar("raw", k, x)


def kernel_minimal_even(k: int, x) -> float:
    """Even-order kernel built from the k-th power of one difference.

    ``(x1-x2)^k / 2`` corrected by lower-order raw kernels on disjoint
    blocks; rejects odd orders.
    """
    _check_order(k)
    if k & 1:
        raise ValueError(f"even-order kernel requires an even order, got {k}")
    _check_arity(x, k)
    return backend.kernel_scalar("even", k, x)


def kernel_deviation_product(x0: float, x) -> float:
    """Product of deviations from a reference replication: prod(x0 - x_i).

    Unbiased for the k-th central moment when evaluated on k + 1 i.i.d.
    replications (the reference plus k others).
    """
    k = len(x)
    if k == 0:
        raise ValueError("deviation product requires at least one comparison value")
    _check_order(k, low=1)
    return backend.kernel_scalar("product", k, (float(x0), *map(float, x)))


def difference_sums_3(x) -> tuple[float, float, float]:
    """Per-observation sums of differences for a triple.

    ``D_i = sum_{j != i} (x_i - x_j) = 3 (x_i - mean)``; the three values
    add to zero up to rounding.
    """
    _check_arity(x, 3)
    s = x[0] + x[1] + x[2]
    return (3.0 * x[0] - s, 3.0 * x[1] - s, 3.0 * x[2] - s)


@dataclass(frozen=True)
class MomentKernel:
    """A named kernel (kind + order), usable as the integrand of the exact
    expectation engine, which recognizes it and switches to vectorized
    enumeration."""

    kind: str
    order: int

    def __post_init__(self):
        if self.kind not in ("minimal", "raw", "even", "product"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        low = 1 if self.kind in ("raw", "product") else 2
        _check_order(self.order, low=low)
        if self.kind == "even" and self.order & 1:
            raise ValueError("even kernels require an even order")

    @property
    def arity(self) -> int:
        """Number of replications the kernel consumes."""
        return self.order + 1 if self.kind == "product" else self.order

    def __call__(self, xs) -> float:
        if self.kind == "product":
            return backend.kernel_scalar("product", self.order, xs)
        if self.kind == "raw" and self.order == 1:
            return 0.0
        return backend.kernel_scalar(self.kind, self.order, xs)
