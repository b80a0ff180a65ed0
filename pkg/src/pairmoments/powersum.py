"""Exact power-sum form of the difference kernels.

The tuple-average estimator is the mean of an order-k kernel over every
ordered tuple of k distinct indices. Expanding the kernel into monomials
and grouping them by the multiset of nonzero exponents turns that average
into

    sum over exponent multisets L of  c(L) * T(L) / perm(n, len(L))

where ``T(L)`` is the sum over distinct index tuples of the corresponding
power products. ``T`` satisfies a collision recursion in the plain power
sums, so the whole average costs O(n) per sample instead of a factorial
enumeration. Coefficients are carried as exact fractions.

The same monomial table gives an enumeration-free expectation oracle: for
i.i.d. coordinates the expectation of a monomial factorizes into raw
moments, one per exponent.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

#: Expansions grow multiplicatively with the order; past this the literal
#: tuple enumeration is the better route.
EXPANSION_MAX = 12


def _add(poly, e, c):
    cur = poly.get(e)
    if cur is None:
        poly[e] = c
    else:
        cur += c
        if cur:
            poly[e] = cur
        else:
            del poly[e]


def _mul_same(p, q):
    """Product of two polynomials over the same variable slots."""
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            _add(out, tuple(a + b for a, b in zip(e1, e2)), c1 * c2)
    return out


def _diff(i, j, a):
    """z_i - z_j as a polynomial over ``a`` slots."""
    ei = [0] * a
    ei[i] = 1
    ej = [0] * a
    ej[j] = 1
    return {tuple(ei): Fraction(1), tuple(ej): Fraction(-1)}


def _poly_pow(p, m):
    out = p
    for _ in range(m - 1):
        out = _mul_same(out, p)
    return out


def _lead(a):
    """(z1 - z3)(z1 - z2)^(a-1) over ``a`` slots."""
    return _mul_same(_diff(0, 2, a), _poly_pow(_diff(0, 1, a), a - 1))


def _pad(poly, offset, a):
    """Re-embed a block polynomial into ``a`` slots starting at ``offset``."""
    out = {}
    for e, c in poly.items():
        full = [0] * a
        full[offset : offset + len(e)] = e
        out[tuple(full)] = c
    return out


def _compose(out, left, right, j, a, weight):
    """Accumulate ``weight * left(z1..zj) * right(z_{j+1}..z_a)`` into out."""
    for el, cl in left.items():
        pl = el + (0,) * (a - j)
        for er, cr in right.items():
            _add(out, pl[:j] + er, weight * cl * cr)


@lru_cache(maxsize=None)
def monomials(kind: str, k: int):
    """Monomial expansion of a kernel: dict exponent-tuple -> Fraction."""
    if k > EXPANSION_MAX and kind != "product":
        raise ValueError(f"expansion supported up to order {EXPANSION_MAX}, got {k}")
    if kind == "product":
        poly = _diff(0, 1, k + 1)
        for i in range(2, k + 1):
            poly = _mul_same(poly, _diff(0, i, k + 1))
        return dict(poly)
    if kind in ("minimal", "raw"):
        if k == 1:
            return {}
        if k == 2:
            p = _poly_pow(_diff(0, 1, 2), 2)
            return {e: c / 2 for e, c in p.items()}
        if k == 3:
            d12sq = _poly_pow(_diff(0, 1, 3), 2)
            if kind == "raw":
                return _mul_same(_diff(0, 2, 3), d12sq)
            tail = {}
            for e, c in _diff(0, 2, 3).items():
                _add(tail, e, c)
            for e, c in _diff(1, 2, 3).items():
                _add(tail, e, c)
            p = _mul_same(d12sq, tail)
            return {e: c / 2 for e, c in p.items()}
        if k == 4:
            out = {}
            for e, c in _poly_pow(_diff(0, 1, 4), 4).items():
                _add(out, e, c / 2)
            cross = _mul_same(
                _poly_pow(_diff(0, 1, 4), 2), _poly_pow(_diff(2, 3, 4), 2)
            )
            for e, c in cross.items():
                _add(out, e, -Fraction(3, 4) * c)
            return out
        out = dict(_lead(k))
        for j in range(2, k - 1):
            sign = Fraction(-1 if j & 1 else 1)
            weight = -sign * math.comb(k - 1, j)
            _compose(out, monomials(kind, j), monomials(kind, k - j), j, k, weight)
        return out
    if kind == "even":
        if k & 1:
            raise ValueError("even kernels require an even order")
        out = {}
        for e, c in _poly_pow(_diff(0, 1, k), k).items():
            _add(out, e, c / 2)
        for j in range(2, k - 1):
            sign = Fraction(-1 if j & 1 else 1)
            weight = -sign * Fraction(math.comb(k, j), 2)
            _compose(out, monomials("raw", j), monomials("raw", k - j), j, k, weight)
        return out
    raise ValueError(f"unknown kernel kind {kind!r}")


@lru_cache(maxsize=None)
def partition_table(kind: str, k: int):
    """Collapse the expansion by the multiset of nonzero exponents.

    Returns a tuple of (multiset, Fraction) pairs; the multiset is sorted
    descending. Only the multiset matters both for distinct-index sums and
    for i.i.d. expectations.
    """
    table = {}
    for e, c in monomials(kind, k).items():
        lam = tuple(sorted((a for a in e if a), reverse=True))
        if lam in table:
            table[lam] += c
        else:
            table[lam] = c
    return tuple((lam, c) for lam, c in table.items() if c)


def _distinct_sum(lam, p, memo):
    """Sum over ordered distinct index tuples of prod x_{i_j}^{lam_j}.

    Collision recursion on the plain power sums ``p[a]``; works unchanged
    when the power sums are arrays (one sample per row).
    """
    if lam in memo:
        return memo[lam]
    if len(lam) == 1:
        v = p[lam[0]]
    else:
        head, a = lam[:-1], lam[-1]
        v = _distinct_sum(head, p, memo) * p[a]
        for i in range(len(head)):
            merged = tuple(
                sorted(head[:i] + (head[i] + a,) + head[i + 1 :], reverse=True)
            )
            v = v - _distinct_sum(merged, p, memo)
    memo[lam] = v
    return v


def _power_sums(xc, orders):
    p = {}
    run = np.ones_like(xc)
    for a in range(1, max(orders) + 1):
        run = run * xc
        if a in orders:
            p[a] = run.sum(axis=-1)
    return p


def _needed_orders(table):
    out = set()
    for lam, _ in table:
        out.update(lam)
        # merged parts appear during the collision recursion
        total = sum(lam)
        out.update(range(1, total + 1))
    return out


def tuple_average(x, kind: str, k: int) -> float:
    """Average of the order-k kernel over all ordered distinct k-tuples.

    O(n) in the sample size. The sample is centered first; the kernels are
    shift-invariant, so this changes nothing mathematically and keeps the
    power sums well conditioned.
    """
    x = np.asarray(x, dtype=np.float64)
    return float(tuple_average_rows(x[None, :], kind, k)[0])


def tuple_average_rows(X, kind: str, k: int) -> np.ndarray:
    """Row-wise :func:`tuple_average` for a batch of samples."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[-1]
    arity = k + 1 if kind == "product" else k
    if n < arity:
        raise ValueError(f"need at least {arity} observations, got {n}")
    table = partition_table(kind, k)
    xc = X - X.mean(axis=-1, keepdims=True)
    p = _power_sums(xc, _needed_orders(table))
    memo = {(): 1.0}
    total = np.zeros(X.shape[0])
    for lam, c in table:
        total = total + float(c) * _distinct_sum(lam, p, memo) / math.perm(n, len(lam))
    return total


def expectation_from_raw_moments(raw, kind: str, k: int) -> float:
    """E[kernel] for i.i.d. coordinates with raw moments ``raw[a] = E[X^a]``.

    Independent of the enumeration engine; used as a cross-check oracle.
    """
    acc = 0.0
    for lam, c in partition_table(kind, k):
        term = float(c)
        for a in lam:
            term *= raw[a]
        acc += term
    return acc
