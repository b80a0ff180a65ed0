import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from pairmoments import backend, powersum
from pairmoments.exact import FiniteDistribution, expect_iid
from pairmoments.kernels import MomentKernel


def _brute_tuple_average(x, kind, k):
    arity = k + 1 if kind == "product" else k
    count = math.perm(len(x), arity)
    total = math.fsum(
        backend.kernel_scalar(kind, k, t) for t in permutations(x.tolist(), arity)
    )
    return total / count


@pytest.mark.parametrize("kind", ["minimal", "raw", "even", "product"])
@pytest.mark.parametrize("k", [2, 3, 4, 5, 6, 7])
def test_tuple_average_matches_enumeration(kind, k, rng):
    if kind == "even" and k % 2:
        pytest.skip("even kernels take even orders")
    arity = k + 1 if kind == "product" else k
    for n in (arity, arity + 2):
        x = rng.uniform(-2, 2, n)
        fast = powersum.tuple_average(x, kind, k)
        brute = _brute_tuple_average(x, kind, k)
        assert fast == pytest.approx(brute, rel=1e-11, abs=1e-11)


def test_tuple_average_rows_matches_scalar(rng):
    X = rng.uniform(-1, 1, (10, 6))
    rows = powersum.tuple_average_rows(X, "minimal", 4)
    singles = [powersum.tuple_average(row, "minimal", 4) for row in X]
    np.testing.assert_allclose(rows, singles, rtol=1e-12)


def test_order_two_partition_table_is_the_variance_form():
    # 0.5 (z1 - z2)^2 collapses to T(2) - T(1,1) over ordered pairs
    table = dict(powersum.partition_table("minimal", 2))
    assert table == {(2,): Fraction(1), (1, 1): Fraction(-1)}


def test_expansion_cap():
    with pytest.raises(ValueError):
        powersum.monomials("minimal", powersum.EXPANSION_MAX + 1)


def test_expectation_from_raw_moments_matches_engine(rng):
    d = FiniteDistribution([-1.5, -0.2, 0.4, 1.1], [0.1, 0.35, 0.3, 0.25])
    raw = {a: d.raw_moment(a) for a in range(1, 9)}
    for kind in ("minimal", "raw", "even", "product"):
        for k in (2, 3, 4, 5):
            if kind == "even" and k % 2:
                continue
            kern = MomentKernel(kind, k)
            engine = expect_iid(d, kern.arity, kern)
            poly = powersum.expectation_from_raw_moments(raw, kind, k)
            assert engine == pytest.approx(poly, rel=1e-11, abs=1e-12)


def test_unbiasedness_via_raw_moments(rng):
    # every kernel family has the central moment as its expectation
    for _ in range(20):
        support = rng.uniform(-2, 2, 4)
        weights = rng.dirichlet(np.ones(4))
        d = FiniteDistribution(support, weights)
        raw = {a: d.raw_moment(a) for a in range(1, 9)}
        for kind in ("minimal", "raw", "even", "product"):
            for k in (2, 3, 4, 6):
                if kind == "even" and k % 2:
                    continue
                expected = powersum.expectation_from_raw_moments(raw, kind, k)
                assert expected == pytest.approx(
                    d.central_moment(k), rel=1e-9, abs=1e-11
                ), (kind, k)
