"""Exact expectations over finite-support distributions.

Everything here is enumeration: expectations of functions of i.i.d.
replications are computed by walking the full product space with
error-compensated accumulation. This is the noise-free oracle used to
verify the population identities behind the difference-kernel estimators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .kernels import MomentKernel, binomial

#: Refuse enumerations beyond this many product states.
ENUMERATION_CAP = 10_000_000

_CHUNK = 1 << 16


class EnumerationCapError(ValueError):
    """The requested product space is too large to enumerate."""


class FiniteDistribution:
    """Finite support points with probability weights.

    Weights are validated (nonnegative, summing to one within 1e-12),
    duplicated support points are merged, and the result is normalized
    exactly. ``weights=None`` means uniform.
    """

    def __init__(self, support, weights=None):
        support = np.asarray(support, dtype=np.float64)
        if support.ndim != 1 or support.size == 0:
            raise ValueError("support must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(support)):
            raise ValueError("support values must be finite")
        if weights is None:
            weights = np.full(support.size, 1.0 / support.size)
        else:
            weights = np.asarray(weights, dtype=np.float64)
            if weights.shape != support.shape:
                raise ValueError("support and weights must have the same length")
            if np.any(weights < 0):
                raise ValueError("weights must be nonnegative")
            total = math.fsum(weights.tolist())
            if abs(total - 1.0) > 1e-12 * max(1.0, abs(total)):
                raise ValueError(f"weights must sum to 1, got {total!r}")
        # merge duplicates, drop zero-weight atoms, normalize exactly
        merged: dict[float, float] = {}
        for v, w in zip(support.tolist(), weights.tolist()):
            merged[v] = merged.get(v, 0.0) + w
        pairs = sorted((v, w) for v, w in merged.items() if w > 0.0)
        if not pairs:
            raise ValueError("distribution has no positive-weight atoms")
        self._support = np.array([v for v, _ in pairs])
        w = np.array([w for _, w in pairs])
        self._weights = w / math.fsum(w.tolist())

    @classmethod
    def point_mass(cls, value: float) -> "FiniteDistribution":
        return cls([value], [1.0])

    @classmethod
    def from_data(cls, values) -> "FiniteDistribution":
        """Empirical distribution of a data vector (uniform atom weights)."""
        values = np.asarray(values, dtype=np.float64)
        return cls(values, np.full(values.size, 1.0 / values.size))

    @property
    def support(self) -> np.ndarray:
        return self._support

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def __len__(self) -> int:
        return self._support.size

    def __repr__(self) -> str:
        pts = ", ".join(f"{v:g}:{w:g}" for v, w in zip(self._support, self._weights))
        return f"FiniteDistribution({pts})"

    def mean(self) -> float:
        return math.fsum((self._weights * self._support).tolist())

    def raw_moment(self, j: int) -> float:
        return math.fsum((self._weights * self._support**j).tolist())

    def central_moment(self, k: int) -> float:
        if k == 1:
            return 0.0
        mu = self.mean()
        return math.fsum((self._weights * (self._support - mu) ** k).tolist())

    def variance(self) -> float:
        return self.central_moment(2)


class FiniteMultivariate:
    """Finite distribution over points in R^dim (dim 2 or 4 in practice)."""

    def __init__(self, support, weights=None):
        support = np.asarray(support, dtype=np.float64)
        if support.ndim != 2 or support.size == 0:
            raise ValueError("support must be a nonempty (size, dim) array")
        if not np.all(np.isfinite(support)):
            raise ValueError("support values must be finite")
        size = support.shape[0]
        if weights is None:
            weights = np.full(size, 1.0 / size)
        else:
            weights = np.asarray(weights, dtype=np.float64)
            if weights.shape != (size,):
                raise ValueError("weights must match the number of support points")
            if np.any(weights < 0):
                raise ValueError("weights must be nonnegative")
            total = math.fsum(weights.tolist())
            if abs(total - 1.0) > 1e-12 * max(1.0, abs(total)):
                raise ValueError(f"weights must sum to 1, got {total!r}")
        merged: dict[tuple, float] = {}
        for row, w in zip(map(tuple, support.tolist()), weights.tolist()):
            merged[row] = merged.get(row, 0.0) + w
        pairs = sorted((v, w) for v, w in merged.items() if w > 0.0)
        self._support = np.array([v for v, _ in pairs])
        w = np.array([w for _, w in pairs])
        self._weights = w / math.fsum(w.tolist())

    @property
    def support(self) -> np.ndarray:
        return self._support

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def dim(self) -> int:
        return self._support.shape[1]

    def __len__(self) -> int:
        return self._support.shape[0]

    def component(self, i: int) -> np.ndarray:
        return self._support[:, i]

    def marginal(self, i: int) -> FiniteDistribution:
        return FiniteDistribution(self._support[:, i], self._weights)

    def mean(self, i: int) -> float:
        return math.fsum((self._weights * self._support[:, i]).tolist())

    def expect(self, g) -> float:
        """E[g(Z)] for one replication; g takes a point tuple."""
        return math.fsum(
            w * g(tuple(z)) for z, w in zip(self._support.tolist(), self._weights.tolist())
        )

    def cross_moment(self, i: int, j: int) -> float:
        return math.fsum(
            (self._weights * self._support[:, i] * self._support[:, j]).tolist()
        )

    def covariance(self, i: int, j: int) -> float:
        return self.cross_moment(i, j) - self.mean(i) * self.mean(j)


def _kernel_kind(g):
    if isinstance(g, MomentKernel):
        return g.kind, g.order
    return None


def expect_iid(dist: FiniteDistribution, m: int, g, cap: int = ENUMERATION_CAP) -> float:
    """E[g(X_1, ..., X_m)] for m i.i.d. replications from ``dist``.

    ``g`` takes one m-tuple of floats. Enumerates all ``len(dist)**m``
    product states with compensated accumulation; refuses to start when the
    state count exceeds ``cap``. Passing a :class:`MomentKernel` as ``g``
    switches to the vectorized kernel backend (same result, much faster).
    """
    if m < 1:
        raise ValueError("need at least one replication")
    size = len(dist)
    states = size**m
    if states > cap:
        raise EnumerationCapError(
            f"{size}^{m} = {states} product states exceed the cap of {cap}"
        )
    named = _kernel_kind(g)
    if named is not None and g.arity == m:
        return _expect_kernel(dist, m, *named)
    support = dist.support.tolist()
    weights = dist.weights.tolist()
    return math.fsum(
        math.prod(weights[i] for i in combo) * g(tuple(support[i] for i in combo))
        for combo in itertools.product(range(size), repeat=m)
    )


def _expect_kernel(dist, m, kind, order):
    """Chunked vectorized enumeration for a named kernel."""
    size = len(dist)
    states = size**m
    support = dist.support
    weights = dist.weights
    chunk_sums = []
    for lo in range(0, states, _CHUNK):
        hi = min(lo + _CHUNK, states)
        idx = np.arange(lo, hi, dtype=np.int64)
        cols = np.empty((hi - lo, m))
        wprod = np.ones(hi - lo)
        rem = idx
        for pos in range(m - 1, -1, -1):
            digit = rem % size
            rem = rem // size
            cols[:, pos] = support[digit]
            wprod *= weights[digit]
        vals = backend.kernel_batch(kind, order, cols)
        chunk_sums.append(math.fsum((wprod * vals).tolist()))
    return math.fsum(chunk_sums)


def expect_pair(d1, d2, g) -> float:
    """E[g(Z_1, Z_2)] for independent Z_1 ~ d1 and Z_2 ~ d2.

    Accepts univariate or multivariate distributions; ``g`` receives a
    float (univariate) or point tuple per argument.
    """

    def atoms(d):
        if isinstance(d, FiniteDistribution):
            return list(zip(d.support.tolist(), d.weights.tolist()))
        return list(zip(map(tuple, d.support.tolist()), d.weights.tolist()))

    return math.fsum(
        w1 * w2 * g(z1, z2) for z1, w1 in atoms(d1) for z2, w2 in atoms(d2)
    )


def central_moment_exact(dist: FiniteDistribution, k: int) -> float:
    """k-th central moment of a finite distribution, by direct summation."""
    if k < 1:
        raise ValueError("moment order must be >= 1")
    return dist.central_moment(k)


# ---------------------------------------------------------------------------
# identity catalog


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one exact identity check.

    ``expressions`` holds every evaluated form as (label, value); the check
    passes when the spread across forms stays within
    ``tol * max(1, largest magnitude)``.
    """

    name: str
    expressions: tuple[tuple[str, float], ...]
    tol: float
    passed: bool
    max_abs_discrepancy: float
    scale: float
    notes: tuple[str, ...] = ()

    @property
    def lhs(self) -> float:
        return self.expressions[0][1]

    @property
    def rhs(self) -> float:
        return self.expressions[-1][1]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expressions": [{"label": l, "value": v} for l, v in self.expressions],
            "tol": self.tol,
            "passed": self.passed,
            "max_abs_discrepancy": self.max_abs_discrepancy,
            "scale": self.scale,
            "notes": list(self.notes),
        }


def _report(name, labeled, tol, notes=()):
    values = [v for _, v in labeled]
    scale = max(1.0, max(abs(v) for v in values))
    ref = values[0]
    disc = max(abs(v - ref) for v in values)
    return CheckReport(
        name=name,
        expressions=tuple(labeled),
        tol=tol,
        passed=bool(disc <= tol * scale),
        max_abs_discrepancy=disc,
        scale=scale,
        notes=tuple(notes),
    )


def _require_bivariate(dist):
    if not isinstance(dist, FiniteMultivariate) or dist.dim != 2:
        raise ValueError("this identity needs a bivariate finite distribution")


def _require_quad(dist):
    if not isinstance(dist, FiniteMultivariate) or dist.dim != 4:
        raise ValueError("this identity needs a 4-component finite distribution")


def _check_cov_pairwise(dist, dist2, order, tol):
    _require_bivariate(dist)
    cov = dist.covariance(0, 1)
    E = lambda g: expect_pair(dist, dist, g)
    labeled = [
        ("covariance from moments", cov),
        ("half mean product of differences", 0.5 * E(lambda z1, z2: (z1[0] - z2[0]) * (z1[1] - z2[1]))),
        ("first replication x one y-difference", E(lambda z1, z2: z1[0] * (z1[1] - z2[1]))),
        ("minus second replication x y-difference", -E(lambda z1, z2: z2[0] * (z1[1] - z2[1]))),
        ("x-difference x first replication", E(lambda z1, z2: (z1[0] - z2[0]) * z1[1])),
        ("minus x-difference x second replication", -E(lambda z1, z2: (z1[0] - z2[0]) * z2[1])),
    ]
    return _report("cov-pairwise", labeled, tol)


def _check_var_pairwise(dist, dist2, order, tol):
    var = central_moment_exact(dist, 2)
    labeled = [
        ("variance from moments", var),
        ("half mean squared difference", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 2)),
        ("first replication x difference", expect_iid(dist, 2, lambda t: t[0] * (t[0] - t[1]))),
        ("minus second replication x difference", -expect_iid(dist, 2, lambda t: t[1] * (t[0] - t[1]))),
        ("two-difference three-replication form", expect_iid(dist, 3, lambda t: (t[0] - t[2]) * (t[0] - t[1]))),
    ]
    return _report("var-pairwise", labeled, tol)


def _check_beta_regression(dist, dist2, order, tol):
    _require_bivariate(dist)
    var = dist.covariance(0, 0)
    if var <= 0:
        raise ValueError("regression slope needs a nondegenerate x-marginal")
    E = lambda g: expect_pair(dist, dist, g)
    labeled = [
        ("covariance ratio", dist.covariance(0, 1) / var),
        (
            "difference-product ratio",
            E(lambda z1, z2: (z1[0] - z2[0]) * (z1[1] - z2[1]))
            / E(lambda z1, z2: (z1[0] - z2[0]) ** 2),
        ),
        (
            "single-difference ratio",
            E(lambda z1, z2: (z1[0] - z2[0]) * z1[1])
            / E(lambda z1, z2: (z1[0] - z2[0]) * z1[0]),
        ),
        (
            "first-replication ratio",
            E(lambda z1, z2: z1[0] * (z1[1] - z2[1]))
            / E(lambda z1, z2: z1[0] * (z1[0] - z2[0])),
        ),
    ]
    return _report("beta-regression", labeled, tol)


def _check_mu3_cov(dist, dist2, order, tol):
    mu = dist.mean()
    var = central_moment_exact(dist, 2)
    cov_dev2 = (
        dist.raw_moment(3) - 2 * mu * dist.raw_moment(2) + mu**3
    ) - mu * var
    labeled = [
        ("third central moment", central_moment_exact(dist, 3)),
        ("cov with squared deviation", cov_dev2),
        ("cov with square minus location term", (dist.raw_moment(3) - mu * dist.raw_moment(2)) - 2 * mu * var),
        ("difference x squared deviation", expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] - mu) ** 2)),
        ("difference x square minus location term", expect_iid(dist, 2, lambda t: (t[0] - t[1]) * t[0] ** 2) - 2 * mu * var),
        ("half difference of squared deviations", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) * ((t[0] - mu) ** 2 - (t[1] - mu) ** 2))),
        ("half difference of squares minus location term", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] ** 2 - t[1] ** 2)) - mu * expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 2)),
    ]
    return _report("mu3-cov", labeled, tol)


def _check_mu4_cov(dist, dist2, order, tol):
    mu = dist.mean()
    var = central_moment_exact(dist, 2)
    mu3 = central_moment_exact(dist, 3)
    r = dist.raw_moment
    cov_x_x2 = r(3) - mu * r(2)
    cov_x_x3 = r(4) - mu * r(3)
    cov_dev3 = (r(4) - 3 * mu * r(3) + 3 * mu * mu * r(2) - mu**4) - mu * mu3
    labeled = [
        ("fourth central moment", central_moment_exact(dist, 4)),
        ("cov with cubed deviation", cov_dev3),
        ("raw covariance combination", cov_x_x3 - 3 * mu * cov_x_x2 + 3 * mu * mu * var),
        ("difference x cubed deviation", expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] - mu) ** 3)),
        # the uncentered single-replication form; the cubic weight is
        # x^3 - 3 mu x^2 + 3 mu^2 x
        ("difference x uncentered cubic", expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] ** 3 - 3 * mu * t[0] ** 2 + 3 * mu * mu * t[0]))),
        ("half difference of cubed deviations", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) * ((t[0] - mu) ** 3 - (t[1] - mu) ** 3))),
        ("half difference of cubes minus lower terms", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] ** 3 - t[1] ** 3)) - 3 * mu * mu3 - 3 * mu * mu * var),
    ]
    return _report("mu4-cov", labeled, tol)


def _check_mu3_cov_3rep(dist, dist2, order, tol):
    labeled = [
        ("third central moment", central_moment_exact(dist, 3)),
        (
            "squares form with factored third replication",
            0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] ** 2 - t[1] ** 2))
            - dist.mean() * expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 2),
        ),
        (
            "three-replication single expectation",
            0.5
            * expect_iid(
                dist,
                3,
                lambda t: (t[0] - t[1])
                * ((t[0] ** 2 - t[1] ** 2) - 2 * t[2] * (t[0] - t[1])),
            ),
        ),
    ]
    return _report("mu3-cov-3rep", labeled, tol)


def _check_mu4_cov_4rep(dist, dist2, order, tol):
    mu = dist.mean()
    E2 = lambda g: expect_iid(dist, 2, g)
    labeled = [
        ("fourth central moment", central_moment_exact(dist, 4)),
        (
            "cubes form with factored replications",
            0.5 * E2(lambda t: (t[0] - t[1]) * (t[0] ** 3 - t[1] ** 3))
            - 1.5 * mu * E2(lambda t: (t[0] - t[1]) * (t[0] ** 2 - t[1] ** 2))
            + 1.5 * mu * mu * E2(lambda t: (t[0] - t[1]) ** 2),
        ),
        (
            "four-replication single expectation",
            0.5
            * expect_iid(
                dist,
                4,
                lambda t: (t[0] - t[1]) * (t[0] ** 3 - t[1] ** 3)
                - 3 * t[2] * (t[0] - t[1]) * (t[0] ** 2 - t[1] ** 2)
                + 3 * t[2] * t[3] * (t[0] - t[1]) ** 2,
            ),
        ),
    ]
    return _report("mu4-cov-4rep", labeled, tol)


def _check_mu3_drep(dist, dist2, order, tol):
    def d3prod(t):
        s = t[0] + t[1] + t[2]
        return (3 * t[0] - s) * (3 * t[1] - s) * (3 * t[2] - s)

    def centered_prod(t):
        m = (t[0] + t[1] + t[2]) / 3.0
        return (t[0] - m) * (t[1] - m) * (t[2] - m)

    labeled = [
        ("third central moment", central_moment_exact(dist, 3)),
        ("plain two-difference form", expect_iid(dist, 3, lambda t: (t[0] - t[2]) * (t[0] - t[1]) ** 2)),
        ("half difference of squared gaps", 0.5 * expect_iid(dist, 3, lambda t: (t[0] - t[1]) * ((t[0] - t[2]) ** 2 - (t[1] - t[2]) ** 2))),
        ("symmetrized two-difference form", 0.5 * expect_iid(dist, 3, lambda t: (t[0] - t[1]) ** 2 * ((t[0] - t[2]) + (t[1] - t[2])))),
        ("difference-sum product over six", expect_iid(dist, 3, d3prod) / 6.0),
        ("centered triple product times 9/2", 4.5 * expect_iid(dist, 3, centered_prod)),
    ]
    return _report("mu3-drep", labeled, tol)


def _check_mu4_drep(dist, dist2, order, tol):
    var = central_moment_exact(dist, 2)
    Ed2 = expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 2)
    labeled = [
        ("fourth central moment", central_moment_exact(dist, 4)),
        ("half fourth power minus 3 var^2", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 4) - 3 * var * var),
        ("half fourth power minus squared mean square", 0.5 * expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 4) - 0.75 * Ed2 * Ed2),
        ("two-block four-replication kernel", expect_iid(dist, 4, MomentKernel("minimal", 4))),
    ]
    return _report("mu4-drep", labeled, tol)


def _check_skewness_drep(dist, dist2, order, tol):
    mu = dist.mean()
    var = central_moment_exact(dist, 2)
    if var <= 0:
        raise ValueError("skewness needs a nondegenerate distribution")
    sd = math.sqrt(var)
    Ed2 = expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 2)
    lead = expect_iid(dist, 3, lambda t: (t[0] - t[2]) * (t[0] - t[1]) ** 2)

    def d3prod(t):
        s = t[0] + t[1] + t[2]
        return (3 * t[0] - s) * (3 * t[1] - s) * (3 * t[2] - s)

    labeled = [
        ("third moment over sd cubed", central_moment_exact(dist, 3) / sd**3),
        (
            "squares form with location ratio",
            expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] ** 2 - t[1] ** 2)) / (2 * sd**3)
            - 2 * mu / sd,
        ),
        ("two-difference form over sd cubed", lead / sd**3),
        ("normalized two-difference form", math.sqrt(8.0) * lead / Ed2**1.5),
        ("normalized difference-sum product", (math.sqrt(2.0) / 3.0) * expect_iid(dist, 3, d3prod) / Ed2**1.5),
    ]
    return _report(
        "skewness-drep",
        labeled,
        tol,
        notes=("location-dependent first form uses the exact distribution mean and sd",),
    )


def _check_kurtosis_drep(dist, dist2, order, tol):
    var = central_moment_exact(dist, 2)
    if var <= 0:
        raise ValueError("kurtosis needs a nondegenerate distribution")
    Ed2 = expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 2)
    Ed4 = expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** 4)
    labeled = [
        ("fourth moment over var squared", central_moment_exact(dist, 4) / var**2),
        ("pairwise fourth-power ratio", 2.0 * Ed4 / Ed2**2 - 3.0),
    ]
    return _report("kurtosis-drep", labeled, tol)


def _check_moment_recursion(dist, dist2, order, tol):
    n = order if order is not None else 4
    if n < 1:
        raise ValueError("recursion index must be >= 1")
    mu = dist.mean()
    mus = {j: central_moment_exact(dist, j) for j in range(1, n + 2)}
    correction = math.fsum(
        (-1) ** j * binomial(n, j) * mus[j] * mus[n + 1 - j] for j in range(2, n)
    )
    labeled = [
        ("next central moment", mus[n + 1]),
        (
            "covariance with deviation power",
            expect_iid(dist, 1, lambda t: t[0] * (t[0] - mu) ** n) - mu * mus[n],
        ),
        (
            "difference x deviation power",
            expect_iid(dist, 2, lambda t: (t[0] - t[1]) * (t[0] - mu) ** n),
        ),
        (
            "two-difference recursion form",
            expect_iid(dist, 3, lambda t: (t[0] - t[2]) * (t[0] - t[1]) ** n) - correction,
        ),
    ]
    if (n + 1) % 2 == 0:
        even_correction = math.fsum(
            (-1) ** j * binomial(n + 1, j) * mus[j] * mus[n + 1 - j]
            for j in range(2, n)
        )
        labeled.append(
            (
                "even-order power recursion form",
                0.5
                * (
                    expect_iid(dist, 2, lambda t: (t[0] - t[1]) ** (n + 1))
                    - even_correction
                ),
            )
        )
    return _report("moment-recursion", labeled, tol)


def _check_kernel_unbiased(kind, name):
    def check(dist, dist2, order, tol):
        k = order if order is not None else 4
        if kind == "even" and k % 2:
            raise ValueError("even kernels require an even order")
        kern = MomentKernel(kind, k)
        labeled = [
            ("exact central moment", central_moment_exact(dist, k)),
            ("expected kernel value", expect_iid(dist, kern.arity, kern)),
        ]
        return _report(name, labeled, tol)

    return check


def _check_product_unbiased(dist, dist2, order, tol):
    k = order if order is not None else 3
    kern = MomentKernel("product", k)
    labeled = [
        ("exact central moment", central_moment_exact(dist, k)),
        ("expected deviation product", expect_iid(dist, k + 1, kern)),
    ]
    return _report("deviation-product-unbiased", labeled, tol)


def _check_lagrange_general(dist, dist2, order, tol):
    _require_bivariate(dist)
    d2 = dist2 if dist2 is not None else dist
    _require_bivariate(d2)
    lhs = 0.5 * (
        dist.cross_moment(0, 0) * d2.cross_moment(1, 1)
        + d2.cross_moment(0, 0) * dist.cross_moment(1, 1)
    ) - dist.cross_moment(0, 1) * d2.cross_moment(0, 1)
    rhs = 0.5 * expect_pair(
        dist, d2, lambda z1, z2: (z1[0] * z2[1] - z2[0] * z1[1]) ** 2
    )
    return _report(
        "lagrange-general",
        [("moment combination", lhs), ("half mean squared cross product", rhs)],
        tol,
        notes=("right side is nonnegative by construction",),
    )


def _check_lagrange_cov(dist, dist2, order, tol):
    _require_bivariate(dist)
    d2 = dist2 if dist2 is not None else dist
    _require_bivariate(d2)
    m1 = (dist.mean(0), dist.mean(1))
    m2 = (d2.mean(0), d2.mean(1))
    centered_sq = expect_pair(
        dist,
        d2,
        lambda z1, z2: ((z1[0] - m1[0]) * (z2[1] - m2[1]) - (z2[0] - m2[0]) * (z1[1] - m1[1]))
        ** 2,
    )
    vx1, vy1 = dist.covariance(0, 0), dist.covariance(1, 1)
    vx2, vy2 = d2.covariance(0, 0), d2.covariance(1, 1)
    c1, c2 = dist.covariance(0, 1), d2.covariance(0, 1)
    labeled = [
        ("general variance combination", 0.5 * (vx1 * vy2 + vx2 * vy1) - c1 * c2),
        ("half mean squared centered cross product", 0.5 * centered_sq),
    ]
    notes = []
    if abs(vx1 - vx2) <= 1e-12 * max(1.0, vx1) and abs(vy1 - vy2) <= 1e-12 * max(1.0, vy1):
        labeled.append(("equal-variance form", vx1 * vy1 - c1 * c2))
        if abs(c1 - c2) <= 1e-12 * max(1.0, abs(c1)):
            labeled.append(("matched-covariance form", vx1 * vy1 - c1 * c1))
            notes.append("covariance matrices match; the squared-correlation form applies")
    return _report("lagrange-cov", labeled, tol, notes=notes)


def _check_lagrange_proportional(dist, dist2, order, tol):
    if not isinstance(dist, FiniteDistribution):
        raise ValueError("the proportional case takes univariate x-distributions")
    dx2 = dist2 if dist2 is not None else dist
    b1, b2 = 0.5, 2.0
    lhs = expect_pair(
        dist, dx2, lambda x1, x2: (x1 * (b2 * x2) - x2 * (b1 * x1)) ** 2
    )
    rhs = (b2 - b1) ** 2 * expect_pair(dist, dx2, lambda x1, x2: (x1 * x2) ** 2)
    return _report(
        "lagrange-proportional",
        [("mean squared cross product", lhs), ("slope-gap times mean squared product", rhs)],
        tol,
    )


def _check_correlation_distance(dist, dist2, order, tol):
    _require_bivariate(dist)
    vx, vy = dist.covariance(0, 0), dist.covariance(1, 1)
    if vx <= 0 or vy <= 0:
        raise ValueError("correlation needs nondegenerate marginals")
    mx, my = dist.mean(0), dist.mean(1)
    rho2 = dist.covariance(0, 1) ** 2 / (vx * vy)
    dist_sq = expect_pair(
        dist,
        dist,
        lambda z1, z2: ((z1[0] - mx) * (z2[1] - my) - (z2[0] - mx) * (z1[1] - my)) ** 2,
    )
    return _report(
        "correlation-distance",
        [
            ("squared correlation", rho2),
            ("one minus normalized replication distance", 1.0 - dist_sq / (2.0 * vx * vy)),
        ],
        tol,
    )


def _check_binet_cauchy_general(dist, dist2, order, tol):
    _require_quad(dist)
    d2 = dist2 if dist2 is not None else dist
    _require_quad(d2)
    lhs = expect_pair(
        dist,
        d2,
        lambda z1, z2: (z1[0] * z2[1] - z2[0] * z1[1]) * (z1[2] * z2[3] - z2[2] * z1[3]),
    )
    rhs = (
        dist.cross_moment(0, 2) * d2.cross_moment(1, 3)
        + d2.cross_moment(0, 2) * dist.cross_moment(1, 3)
        - dist.cross_moment(0, 3) * d2.cross_moment(1, 2)
        - d2.cross_moment(0, 3) * dist.cross_moment(1, 2)
    )
    return _report(
        "binet-cauchy-general",
        [("mean product of cross products", lhs), ("cross-moment combination", rhs)],
        tol,
    )


def _check_binet_cauchy_cov(dist, dist2, order, tol):
    _require_quad(dist)
    means = [dist.mean(i) for i in range(4)]
    lhs = dist.covariance(0, 2) * dist.covariance(1, 3) - dist.covariance(0, 3) * dist.covariance(1, 2)
    rhs = 0.5 * expect_pair(
        dist,
        dist,
        lambda z1, z2: ((z1[0] - means[0]) * (z2[1] - means[1]) - (z2[0] - means[0]) * (z1[1] - means[1]))
        * ((z1[2] - means[2]) * (z2[3] - means[3]) - (z2[2] - means[2]) * (z1[3] - means[3])),
    )
    return _report(
        "binet-cauchy-cov",
        [("covariance determinant", lhs), ("half mean product of centered cross products", rhs)],
        tol,
    )


#: name -> (input signature, checker). Signatures: "uni" (one univariate),
#: "uni2" (univariate pair), "bi" (one bivariate), "bi2" (bivariate pair),
#: "quad"/"quad2" (4-component). Entries taking an order use it.
CATALOG = {
    "cov-pairwise": ("bi", _check_cov_pairwise),
    "var-pairwise": ("uni", _check_var_pairwise),
    "beta-regression": ("bi", _check_beta_regression),
    "mu3-cov": ("uni", _check_mu3_cov),
    "mu4-cov": ("uni", _check_mu4_cov),
    "mu3-cov-3rep": ("uni", _check_mu3_cov_3rep),
    "mu4-cov-4rep": ("uni", _check_mu4_cov_4rep),
    "mu3-drep": ("uni", _check_mu3_drep),
    "mu4-drep": ("uni", _check_mu4_drep),
    "skewness-drep": ("uni", _check_skewness_drep),
    "kurtosis-drep": ("uni", _check_kurtosis_drep),
    "moment-recursion": ("uni", _check_moment_recursion),
    "kernel-minimal-unbiased": ("uni", _check_kernel_unbiased("minimal", "kernel-minimal-unbiased")),
    "kernel-raw-unbiased": ("uni", _check_kernel_unbiased("raw", "kernel-raw-unbiased")),
    "kernel-even-unbiased": ("uni", _check_kernel_unbiased("even", "kernel-even-unbiased")),
    "deviation-product-unbiased": ("uni", _check_product_unbiased),
    "lagrange-general": ("bi2", _check_lagrange_general),
    "lagrange-cov": ("bi2", _check_lagrange_cov),
    "lagrange-proportional": ("uni2", _check_lagrange_proportional),
    "correlation-distance": ("bi", _check_correlation_distance),
    "binet-cauchy-general": ("quad2", _check_binet_cauchy_general),
    "binet-cauchy-cov": ("quad", _check_binet_cauchy_cov),
}


def catalog_names() -> tuple[str, ...]:
    return tuple(CATALOG)


def identity_signature(name: str) -> str:
    return CATALOG[name][0]


def verify_identity(name: str, dist, dist2=None, order=None, tol: float = 1e-10) -> CheckReport:
    """Evaluate every form of a cataloged population identity exactly.

    ``dist`` (and ``dist2`` for two-sample identities) must be finite
    distributions of the dimension the entry expects; ``order`` selects the
    moment order for the parameterized entries.
    """
    try:
        _, fn = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown identity {name!r}; see catalog_names()") from None
    return fn(dist, dist2, order, tol)


def odd_difference_moment_check(
    dist: FiniteDistribution, max_odd_order: int, tol: float = 1e-10
) -> CheckReport:
    """E[(X1 - X2)^j] vanishes for every odd j up to the bound.

    The difference of two i.i.d. replications is symmetric around zero, so
    all odd moments are zero regardless of the skewness of ``dist``.
    """
    if max_odd_order > 31:
        raise ValueError("odd-moment check capped at order 31")
    labeled = [("zero", 0.0)]
    for j in range(1, max_odd_order + 1, 2):
        labeled.append(
            (f"odd difference moment {j}", expect_iid(dist, 2, lambda t, j=j: (t[0] - t[1]) ** j))
        )
    # odd difference moments can be large in raw scale; compare against the
    # even neighbor as the magnitude reference
    scale_ref = max(
        1.0,
        max(
            expect_iid(dist, 2, lambda t, j=j: abs(t[0] - t[1]) ** j)
            for j in range(1, max_odd_order + 1, 2)
        ),
    )
    disc = max(abs(v) for _, v in labeled)
    return CheckReport(
        name="odd-difference-moments",
        expressions=tuple(labeled),
        tol=tol,
        passed=bool(disc <= tol * scale_ref),
        max_abs_discrepancy=disc,
        scale=scale_ref,
    )


def random_finite(rng, max_support: int = 6, span: float = 2.0) -> FiniteDistribution:
    """Random finite distribution for property tests.

    Support drawn uniformly from [-span, span] (small span keeps high
    powers tame), weights from a flat simplex draw.
    """
    size = int(rng.integers(2, max_support + 1))
    support = rng.uniform(-span, span, size)
    weights = rng.dirichlet(np.ones(size))
    return FiniteDistribution(support, weights)


def random_multivariate(rng, dim: int, max_support: int = 6, span: float = 2.0) -> FiniteMultivariate:
    size = int(rng.integers(2, max_support + 1))
    support = rng.uniform(-span, span, (size, dim))
    weights = rng.dirichlet(np.ones(size))
    return FiniteMultivariate(support, weights)
