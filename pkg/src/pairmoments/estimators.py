"""Sample-level moment estimators.

Two families: the natural estimator (powers of deviations from the sample
mean, divisor n - 1) and difference-tuple estimators (averages of the
order-k minimal kernel over tuples of distinct observations), which are
exactly unbiased for central moments at every order. Pairwise variance /
covariance and ratio statistics built from them round things out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import backend, powersum
from .kernels import K_MAX, kernel_minimal

#: Refuse literal tuple enumeration beyond this many ordered tuples.
TUPLE_CAP = 10**8


class DegenerateSampleError(ValueError):
    """A ratio statistic was asked of a constant sample."""


@dataclass(frozen=True)
class MomentEstimate:
    """One estimate: which estimator, which order, and its value.

    ``tuples_used`` counts the distinct-index tuples behind the value
    (``perm(n, k)`` for the exhaustive estimator, the draw count for the
    Monte Carlo one). ``mc_std_error`` is present exactly for Monte Carlo
    estimates.
    """

    method: str
    order: int
    value: float
    sample_size: int
    tuples_used: int | None = None
    mc_std_error: float | None = None


def _as_sample(x, min_size=2) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("samples must be 1-D")
    if x.size < min_size:
        raise ValueError(f"need at least {min_size} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    return x


def _check_order(k):
    if not 2 <= k <= K_MAX:
        raise ValueError(f"moment order must be in [2, {K_MAX}], got {k}")


def natural_moment(x, k: int, divisor: str = "n-1") -> MomentEstimate:
    """Average k-th power of deviations from the sample mean.

    The default divisor is n - 1 (unbiased at order 2, biased at higher
    orders); ``divisor="n"`` selects the plain average for comparison.
    """
    x = _as_sample(x)
    _check_order(k)
    if divisor not in ("n-1", "n"):
        raise ValueError("divisor must be 'n-1' or 'n'")
    n = x.size
    denom = n - 1 if divisor == "n-1" else n
    value = float(((x - x.mean()) ** k).sum() / denom)
    return MomentEstimate("natural", k, value, n)


def natural_moment_rows(X, k: int) -> np.ndarray:
    """Row-wise natural estimator (divisor n - 1) for a batch of samples."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[-1]
    return ((X - X.mean(axis=-1, keepdims=True)) ** k).sum(axis=-1) / (n - 1)


def diff_moment_exhaustive(
    x, k: int, method: str = "auto", tuple_cap: int = TUPLE_CAP
) -> MomentEstimate:
    """Mean of the order-k minimal kernel over all ordered distinct k-tuples.

    The kernel is not symmetric in its arguments, so the average runs over
    ordered tuples; that symmetrization makes the estimator well defined
    and exactly unbiased for the k-th central moment.

    ``method="powersum"`` (the ``auto`` choice for supported orders)
    evaluates the same average through the exact power-sum form in O(n);
    ``method="enumerate"`` walks the tuples literally and refuses when
    ``perm(n, k)`` exceeds ``tuple_cap``. Both routes agree to rounding.
    """
    x = _as_sample(x)
    _check_order(k)
    n = x.size
    if n < k:
        raise ValueError(f"need at least k={k} observations, got {n}")
    count = math.perm(n, k)
    if method == "auto":
        method = "powersum" if k <= powersum.EXPANSION_MAX else "enumerate"
    if method == "powersum":
        value = powersum.tuple_average(x, "minimal", k)
    elif method == "enumerate":
        if count > tuple_cap:
            raise ValueError(
                f"perm({n}, {k}) = {count} ordered tuples exceed the cap of {tuple_cap}"
            )
        value = math.fsum(
            backend.kernel_scalar("minimal", k, t) for t in permutations(x.tolist(), k)
        ) / count
    else:
        raise ValueError("method must be 'auto', 'powersum' or 'enumerate'")
    return MomentEstimate("diff-exhaustive", k, float(value), n, tuples_used=count)


def diff_moment_exhaustive_rows(X, k: int) -> np.ndarray:
    """Row-wise exhaustive difference estimator via the power-sum route."""
    return powersum.tuple_average_rows(np.asarray(X, dtype=np.float64), "minimal", k)


def draw_distinct_tuples(gen: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    """``count`` index tuples drawn uniformly from ordered distinct k-tuples.

    Vectorized rejection: rows with a repeated index are redrawn until
    clean. Deterministic given the generator state.
    """
    if k > n:
        raise ValueError("cannot draw distinct tuples with k > n")
    idx = gen.integers(0, n, size=(count, k))
    if k > 1:
        while True:
            srt = np.sort(idx, axis=1)
            bad = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
            if not bad.any():
                break
            idx[bad] = gen.integers(0, n, size=(int(bad.sum()), k))
    return idx


def diff_moment_mc(x, k: int, n_tuples: int, gen: np.random.Generator) -> MomentEstimate:
    """Monte Carlo difference estimator: kernel mean over random tuples.

    Index tuples are i.i.d. uniform over ordered distinct k-tuples, so the
    estimate stays unbiased; the attached standard error is the sample
    standard deviation of the kernel values over sqrt(n_tuples).
    """
    x = _as_sample(x)
    _check_order(k)
    if n_tuples < 1:
        raise ValueError("need at least one tuple")
    n = x.size
    if n < k:
        raise ValueError(f"need at least k={k} observations, got {n}")
    idx = draw_distinct_tuples(gen, n, k, n_tuples)
    vals = backend.kernel_batch("minimal", k, x[idx])
    value = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n_tuples)) if n_tuples > 1 else 0.0
    return MomentEstimate(
        "diff-mc", k, value, n, tuples_used=n_tuples, mc_std_error=se
    )


def _pairwise_mean(x, y, power=1):
    """Mean over ordered distinct pairs of (x_i - x_j)(y_i - y_j), fsum'd."""
    n = len(x)
    terms = (
        ((x[i] - x[j]) * (y[i] - y[j])) ** power
        for i in range(n)
        for j in range(n)
        if i != j
    )
    return math.fsum(terms) / (n * (n - 1))


def gini_variance(x, verify_pairwise: bool = False) -> float:
    """Sample variance in its pairwise form: half the mean squared gap
    between distinct observations (equal to the usual n-1 variance).

    Computed by the O(n) centered route; ``verify_pairwise`` also runs the
    O(n^2) double sum and insists the two agree to 1e-10 relative.
    """
    x = _as_sample(x)
    value = float(((x - x.mean()) ** 2).sum() / (x.size - 1))
    if verify_pairwise:
        xl = x.tolist()
        pw = 0.5 * _pairwise_mean(xl, xl)
        if abs(pw - value) > 1e-10 * max(1.0, abs(value), abs(pw)):
            raise AssertionError(
                f"pairwise route disagrees with the centered route: {pw!r} vs {value!r}"
            )
    return value


def gini_covariance(x, y, verify_pairwise: bool = False) -> float:
    """Sample covariance in its pairwise form (see :func:`gini_variance`)."""
    x = _as_sample(x)
    y = _as_sample(y)
    if x.size != y.size:
        raise ValueError("x and y must have the same length")
    value = float(((x - x.mean()) * (y - y.mean())).sum() / (x.size - 1))
    if verify_pairwise:
        pw = 0.5 * _pairwise_mean(x.tolist(), y.tolist())
        if abs(pw - value) > 1e-10 * max(1.0, abs(value), abs(pw)):
            raise AssertionError(
                f"pairwise route disagrees with the centered route: {pw!r} vs {value!r}"
            )
    return value


def regression_slope(x, y) -> float:
    """Least-squares slope of y on x via the pairwise forms."""
    var = gini_variance(x)
    if var <= 0:
        raise DegenerateSampleError("regression slope needs a nonconstant x sample")
    return gini_covariance(x, y) / var


def pairwise_skewness_kurtosis(x) -> tuple[float, float, float]:
    """(skewness, kurtosis, excess kurtosis) from difference averages.

    Plug-in ratios of distinct-tuple averages: sqrt(8) times the
    third-order tuple average over the mean squared gap to the 3/2, and
    twice the mean fourth-power gap over the squared mean squared gap,
    minus 3. Ratio plug-ins, not unbiased.
    """
    x = _as_sample(x, min_size=3)
    n = x.size
    xc = x - x.mean()
    q1 = float(xc.sum())
    q2 = float((xc**2).sum())
    q3 = float((xc**3).sum())
    q4 = float((xc**4).sum())
    # means over ordered distinct pairs of (xi - xj)^2 and (xi - xj)^4,
    # expanded into centered power sums
    d2 = (2.0 * n * q2 - 2.0 * q1 * q1) / (n * (n - 1))
    d4 = (2.0 * n * q4 - 8.0 * q3 * q1 + 6.0 * q2 * q2) / (n * (n - 1))
    if d2 <= 0:
        raise DegenerateSampleError("shape statistics need a nonconstant sample")
    m3 = powersum.tuple_average(x, "minimal", 3)
    skew = math.sqrt(8.0) * m3 / d2**1.5
    kurt = 2.0 * d4 / d2**2 - 3.0
    return skew, kurt, kurt - 3.0
