"""Deterministic summation identities on real vectors.

Each check computes both sides through independent routes (no shared
subexpressions) and reports the discrepancy: the centered-vs-pairwise
variance and covariance equivalences, the Lagrange identity with its
Cauchy-Schwarz corollary, and the four-vector Binet-Cauchy identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    tol: float
    passed: bool
    abs_discrepancy: float
    scale: float
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tol": self.tol,
            "passed": self.passed,
            "abs_discrepancy": self.abs_discrepancy,
            "scale": self.scale,
            "notes": list(self.notes),
        }


def _finish(name, lhs, rhs, tol, notes=()):
    disc = abs(lhs - rhs)
    scale = max(1.0, abs(lhs), abs(rhs))
    return IdentityReport(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        tol=tol,
        passed=bool(disc <= tol * scale),
        abs_discrepancy=float(disc),
        scale=float(scale),
        notes=tuple(notes),
    )


def _vec(x, min_size=1):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < min_size:
        raise ValueError(f"need a 1-D vector of length >= {min_size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def _pair(x, y, min_size=1):
    x = _vec(x, min_size)
    y = _vec(y, min_size)
    if x.size != y.size:
        raise ValueError("vectors must have the same length")
    return x, y


def check_gini_variance(x, tol: float = 1e-10, triangular: bool = True) -> IdentityReport:
    """Centered sample variance vs. the average squared pairwise gap."""
    x = _vec(x, 2)
    n = x.size
    lhs = float(((x - x.mean()) ** 2).sum() / (n - 1))
    xl = x.tolist()
    if triangular:
        rhs = math.fsum(
            (xl[i] - xl[j]) ** 2 for i in range(n) for j in range(i + 1, n)
        ) / (n * (n - 1))
    else:
        rhs = 0.5 * math.fsum(
            (xl[i] - xl[j]) ** 2 for i in range(n) for j in range(n)
        ) / (n * (n - 1))
    return _finish("gini-variance", lhs, rhs, tol)


def check_gini_covariance(x, y, tol: float = 1e-10, triangular: bool = True) -> IdentityReport:
    """Centered sample covariance vs. the average pairwise co-movement."""
    x, y = _pair(x, y, 2)
    n = x.size
    lhs = float(((x - x.mean()) * (y - y.mean())).sum() / (n - 1))
    xl, yl = x.tolist(), y.tolist()
    if triangular:
        rhs = math.fsum(
            (xl[i] - xl[j]) * (yl[i] - yl[j])
            for i in range(n)
            for j in range(i + 1, n)
        ) / (n * (n - 1))
    else:
        rhs = 0.5 * math.fsum(
            (xl[i] - xl[j]) * (yl[i] - yl[j]) for i in range(n) for j in range(n)
        ) / (n * (n - 1))
    return _finish("gini-covariance", lhs, rhs, tol)


def check_lagrange(x, y, tol: float = 1e-10, triangular: bool = True) -> IdentityReport:
    """(sum x^2)(sum y^2) - (sum xy)^2 vs. the pairwise determinant sum.

    The right side is a sum of squares, so the left side is nonnegative
    (the discrete Cauchy-Schwarz inequality), vanishing exactly when the
    vectors are proportional.
    """
    x, y = _pair(x, y, 1)
    n = x.size
    lhs = float(x @ x) * float(y @ y) - float(x @ y) ** 2
    xl, yl = x.tolist(), y.tolist()
    if triangular:
        rhs = math.fsum(
            (xl[i] * yl[j] - xl[j] * yl[i]) ** 2
            for i in range(n)
            for j in range(i + 1, n)
        )
    else:
        rhs = 0.5 * math.fsum(
            (xl[i] * yl[j] - xl[j] * yl[i]) ** 2 for i in range(n) for j in range(n)
        )
    notes = []
    if lhs < -1e-12 * max(1.0, abs(lhs)):
        notes.append("left side fell below the Cauchy-Schwarz floor")
    return _finish("lagrange", lhs, rhs, tol, notes=notes)


def check_binet_cauchy(a, b, c, d, tol: float = 1e-10, triangular: bool = True) -> IdentityReport:
    """Four-vector inner-product identity; a=c, b=d reduces to Lagrange."""
    a, b = _pair(a, b, 1)
    c, d = _pair(c, d, 1)
    if a.size != c.size:
        raise ValueError("all four vectors must have the same length")
    n = a.size
    lhs = float(a @ c) * float(b @ d) - float(a @ d) * float(b @ c)
    al, bl, cl, dl = a.tolist(), b.tolist(), c.tolist(), d.tolist()
    if triangular:
        rhs = math.fsum(
            (al[i] * bl[j] - al[j] * bl[i]) * (cl[i] * dl[j] - cl[j] * dl[i])
            for i in range(n)
            for j in range(i + 1, n)
        )
    else:
        rhs = 0.5 * math.fsum(
            (al[i] * bl[j] - al[j] * bl[i]) * (cl[i] * dl[j] - cl[j] * dl[i])
            for i in range(n)
            for j in range(n)
        )
    return _finish("binet-cauchy", lhs, rhs, tol)


NUMERIC_CHECKS = {
    "gini-variance": 1,
    "gini-covariance": 2,
    "lagrange": 2,
    "binet-cauchy": 4,
}


def run_numeric_check(name: str, vectors, tol: float = 1e-10) -> IdentityReport:
    """Dispatch a numeric identity check by name on a list of vectors."""
    if name not in NUMERIC_CHECKS:
        raise ValueError(f"unknown numeric identity {name!r}")
    need = NUMERIC_CHECKS[name]
    if len(vectors) != need:
        raise ValueError(f"{name} takes {need} vectors, got {len(vectors)}")
    if name == "gini-variance":
        return check_gini_variance(vectors[0], tol=tol)
    if name == "gini-covariance":
        return check_gini_covariance(vectors[0], vectors[1], tol=tol)
    if name == "lagrange":
        return check_lagrange(vectors[0], vectors[1], tol=tol)
    return check_binet_cauchy(*vectors, tol=tol)
