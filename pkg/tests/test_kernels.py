import math

import numpy as np
import pytest

from pairmoments import backend, powersum
from pairmoments.kernels import (
    K_MAX,
    MomentKernel,
    binomial,
    difference_sums_3,
    kernel_deviation_product,
    kernel_minimal,
    kernel_minimal_even,
    kernel_minimal_raw,
)


class TestBinomial:
    def test_small_values(self):
        assert binomial(4, 2) == 6
        assert binomial(10, 5) == 252
        for n in range(12):
            assert binomial(n, 0) == 1

    def test_pascal_recurrence_oracle(self):
        # independent Pascal-triangle construction
        row = [1]
        for n in range(1, 2 * K_MAX + 1):
            row = [1] + [row[j - 1] + row[j] for j in range(1, n)] + [1]
            for j, expected in enumerate(row):
                assert binomial(n, j) == expected

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            binomial(3, 4)
        with pytest.raises(ValueError):
            binomial(-1, 0)
        with pytest.raises(ValueError):
            binomial(2 * K_MAX + 1, 1)


class TestMinimalKernel:
    def test_order_two(self):
        assert kernel_minimal(2, (3.0, 1.0)) == 2.0

    def test_constant_tuple_vanishes(self):
        for c in (-4.2, 0.0, 17.5):
            assert kernel_minimal(3, (c, c, c)) == 0.0

    def test_order_four_hand_value(self):
        # 0.5 * 1 - 0.75 * 1 * 4
        assert kernel_minimal(4, (1.0, 0.0, 2.0, 0.0)) == -2.5

    def test_matches_exact_polynomial_expansion(self, rng):
        # independent route: evaluate the exact monomial expansion
        for k in range(2, 9):
            x = rng.uniform(-2, 2, k)
            direct = kernel_minimal(k, x)
            poly = sum(
                float(c) * math.prod(x[i] ** e for i, e in enumerate(exp) if e)
                for exp, c in powersum.monomials("minimal", k).items()
            )
            assert direct == pytest.approx(poly, rel=1e-11, abs=1e-11)

    def test_wrong_arity_and_order(self):
        with pytest.raises(ValueError):
            kernel_minimal(3, (1.0, 2.0))
        with pytest.raises(ValueError):
            kernel_minimal(1, (1.0,))
        with pytest.raises(ValueError):
            kernel_minimal(K_MAX + 1, tuple(range(K_MAX + 1)))


class TestRawKernel:
    def test_order_one_is_zero(self):
        assert kernel_minimal_raw(1, ()) == 0.0
        assert kernel_minimal_raw(1, (5.0,)) == 0.0

    def test_order_two(self):
        assert kernel_minimal_raw(2, (5.0, 3.0)) == 2.0

    def test_order_three_hand_value(self):
        assert kernel_minimal_raw(3, (2.0, 0.0, 1.0)) == 4.0

    def test_differs_from_symmetrized_at_order_three(self):
        x = (1.0, 0.0, 2.0)
        assert kernel_minimal_raw(3, x) != kernel_minimal(3, x)

    def test_agrees_with_symmetrized_at_orders_two_and_four(self, rng):
        x2 = rng.uniform(-1, 1, 2)
        x4 = rng.uniform(-1, 1, 4)
        assert kernel_minimal_raw(2, x2) == kernel_minimal(2, x2)
        assert kernel_minimal_raw(4, x4) == kernel_minimal(4, x4)


class TestEvenKernel:
    def test_order_two_empty_correction(self):
        assert kernel_minimal_even(2, (4.0, 1.0)) == 4.5

    def test_order_four_hand_value(self):
        # 0.5 * (1 - 6 * 0.5 * 2); equality with the minimal kernel on this
        # input is a coincidence of the input, not an identity
        assert kernel_minimal_even(4, (1.0, 0.0, 2.0, 0.0)) == -2.5

    def test_rejects_odd_order(self):
        with pytest.raises(ValueError):
            kernel_minimal_even(3, (1.0, 2.0, 3.0))


class TestDeviationProduct:
    def test_hand_values(self):
        assert kernel_deviation_product(3.0, (1.0, 2.0)) == 2.0
        assert kernel_deviation_product(1.5, (1.5, 1.5, 1.5)) == 0.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            kernel_deviation_product(1.0, ())


class TestDifferenceSums:
    def test_hand_value(self):
        assert difference_sums_3((1.0, 2.0, 3.0)) == (-3.0, 0.0, 3.0)

    def test_constant(self):
        assert difference_sums_3((2.5, 2.5, 2.5)) == (0.0, 0.0, 0.0)

    def test_sum_to_zero_and_symmetric_product(self, rng):
        for _ in range(50):
            x = rng.uniform(-5, 5, 3)
            d = difference_sums_3(x)
            assert abs(sum(d)) < 1e-12 * max(1.0, max(abs(v) for v in d))
        # symmetric triple (a, m, 2m - a) forces the middle sum to zero
        d = difference_sums_3((1.0, 2.0, 3.0))
        assert d[0] * d[1] * d[2] / 6.0 == 0.0


def _all_kernels(k):
    kernels = [("minimal", kernel_minimal), ("raw", kernel_minimal_raw)]
    if k % 2 == 0:
        kernels.append(("even", kernel_minimal_even))
    return kernels


class TestKernelInvariants:
    def test_translation_invariance(self, rng):
        for k in range(2, 11):
            for name, fn in _all_kernels(k):
                for _ in range(60):
                    x = rng.uniform(-2, 2, k)
                    c = rng.uniform(-2, 2)
                    base = fn(k, x)
                    shifted = fn(k, x + c)
                    assert abs(shifted - base) <= 1e-12 * max(1.0, abs(base)), (
                        name,
                        k,
                    )

    def test_degree_k_homogeneity(self, rng):
        for k in range(2, 11):
            for name, fn in _all_kernels(k):
                for _ in range(60):
                    x = rng.uniform(-2, 2, k)
                    lam = rng.uniform(0.5, 2.0)
                    scaled = fn(k, lam * x)
                    expected = lam**k * fn(k, x)
                    assert abs(scaled - expected) <= 1e-12 * max(1.0, abs(expected)), (
                        name,
                        k,
                    )

    def test_product_kernel_invariances(self, rng):
        for k in range(1, 9):
            x0 = rng.uniform(-2, 2)
            x = rng.uniform(-2, 2, k)
            base = kernel_deviation_product(x0, x)
            c = 0.75
            shifted = kernel_deviation_product(x0 + c, x + c)
            assert shifted == pytest.approx(base, rel=1e-12, abs=1e-12)
            lam = 1.5
            assert kernel_deviation_product(lam * x0, lam * x) == pytest.approx(
                lam**k * base, rel=1e-12
            )


class TestMomentKernelObject:
    def test_arity(self):
        assert MomentKernel("minimal", 5).arity == 5
        assert MomentKernel("product", 5).arity == 6

    def test_call_matches_functions(self, rng):
        x = rng.uniform(-1, 1, 4)
        assert MomentKernel("minimal", 4)(x) == kernel_minimal(4, x)
        assert MomentKernel("even", 4)(x) == kernel_minimal_even(4, x)

    def test_validation(self):
        with pytest.raises(ValueError):
            MomentKernel("even", 5)
        with pytest.raises(ValueError):
            MomentKernel("nope", 3)


class TestBackends:
    def test_batch_matches_scalar(self, rng):
        X = rng.uniform(-3, 3, (40, 6))
        batch = backend.kernel_batch("minimal", 6, X)
        scalar = [backend.kernel_scalar("minimal", 6, row) for row in X]
        np.testing.assert_allclose(batch, scalar, rtol=1e-13)

    @pytest.mark.skipif(
        not backend.USING_COMPILED, reason="compiled backend not built"
    )
    def test_compiled_matches_pure(self, rng):
        from pairmoments import _kernels_pure

        for kind in ("minimal", "raw", "even", "product"):
            for k in range(2, 11):
                if kind == "even" and k % 2:
                    continue
                arity = k + 1 if kind == "product" else k
                X = np.ascontiguousarray(rng.uniform(-2, 2, (25, arity)))
                compiled = backend.kernel_batch(kind, k, X)
                pure = _kernels_pure.kernel_values(kind, k, X)
                np.testing.assert_allclose(compiled, pure, rtol=1e-12, atol=1e-12)
