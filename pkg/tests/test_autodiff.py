import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import assert_grad_matches, autodiff_grad, numeric_grad, rel_err
from ipo_rl import autodiff as ad
from ipo_rl.errors import ConfigError, ContractError, DomainError, ShapeError


class TestTensor:
    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            ad.Tensor([1.0, np.inf])
        with pytest.raises(DomainError):
            ad.Tensor([np.nan])

    def test_float64_everywhere(self):
        t = ad.Tensor([1, 2, 3])
        assert t.array.dtype == np.float64

    def test_item_requires_scalar(self):
        with pytest.raises(ContractError):
            ad.Tensor([1.0, 2.0]).item()


class TestMatmul:
    def test_identity(self):
        out = ad.matmul(ad.Tensor([[1.0, 0.0], [0.0, 1.0]]),
                        ad.Tensor([[5.0, 6.0], [7.0, 8.0]]))
        assert np.array_equal(out.array, [[5.0, 6.0], [7.0, 8.0]])

    def test_hand_product(self):
        out = ad.matmul(ad.Tensor([[1.0, 2.0]]), ad.Tensor([[3.0], [4.0]]))
        assert out.array[0, 0] == 11.0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            ad.matmul(ad.Tensor(np.ones((2, 3))), ad.Tensor(np.ones((2, 3))))

    def test_gradient_vs_finite_differences(self, rng):
        a = ad.Tensor(rng.normal(size=(3, 4)))
        b = ad.Tensor(rng.normal(size=(4, 2)))
        assert_grad_matches(lambda: ad.reduce_sum(ad.matmul(a, b)), a, tol=1e-5)
        assert_grad_matches(lambda: ad.reduce_sum(ad.matmul(a, b)), b, tol=1e-5)


class TestElementwise:
    def test_log_identity(self):
        assert ad.log(ad.Tensor([1.0])).array[0] == 0.0

    def test_tanh_origin(self):
        assert ad.tanh(ad.Tensor([0.0])).array[0] == 0.0

    def test_log_gradient_analytic(self):
        x = ad.Tensor([0.5])
        g = autodiff_grad(lambda: ad.reduce_sum(ad.log(x)), [x])[x]
        assert g[0] == pytest.approx(2.0, rel=1e-12)

    def test_log_domain_error(self):
        with pytest.raises(DomainError):
            ad.log(ad.Tensor([0.0]))
        with pytest.raises(DomainError):
            ad.log(ad.Tensor([-1.0]))

    def test_exp_overflow_raises(self):
        with pytest.raises(DomainError):
            ad.exp(ad.Tensor([1000.0]))

    @pytest.mark.parametrize("op,dom", [
        (ad.exp, (-2, 2)), (ad.tanh, (-3, 3)), (ad.square, (-3, 3)),
        (ad.log, (0.1, 4.0)), (ad.neg, (-3, 3)),
    ])
    def test_gradients_vs_finite_differences(self, op, dom, rng):
        for _ in range(20):
            x = ad.Tensor(rng.uniform(*dom, size=5))
            assert_grad_matches(lambda: ad.reduce_sum(op(x)), x)

    def test_row_broadcast_add_gradient(self, rng):
        x = ad.Tensor(rng.normal(size=(4, 3)))
        b = ad.Tensor(rng.normal(size=3))
        assert_grad_matches(lambda: ad.reduce_sum(ad.add(x, b)), b)
        assert_grad_matches(lambda: ad.reduce_sum(ad.mul(x, b)), b)

    def test_bad_broadcast_rejected(self):
        with pytest.raises(ShapeError):
            ad.add(ad.Tensor(np.ones((2, 3))), ad.Tensor(np.ones((3, 2))))


class TestReduce:
    def test_mean_hand_average(self):
        assert ad.reduce_mean(ad.Tensor([2.0, 4.0, 6.0])).array == 4.0

    def test_mean_empty_rejected(self):
        with pytest.raises(DomainError):
            ad.reduce_mean(ad.Tensor(np.zeros(0)))

    def test_min_pair_definition(self):
        out = ad.min_pair(ad.Tensor([1.0, 5.0]), ad.Tensor([3.0, 2.0]))
        assert np.array_equal(out.array, [1.0, 2.0])

    def test_min_pair_tie_routes_to_first(self):
        a, b = ad.Tensor([3.0]), ad.Tensor([3.0])
        grads = autodiff_grad(lambda: ad.reduce_sum(ad.min_pair(a, b)), [a, b])
        assert grads[a][0] == 1.0
        assert grads[b][0] == 0.0

    def test_sum_axis_gradient(self, rng):
        x = ad.Tensor(rng.normal(size=(3, 5)))
        assert_grad_matches(
            lambda: ad.reduce_sum(ad.square(ad.reduce_sum(x, axis=1))), x)


class TestClip:
    def test_values(self):
        out = ad.clip(ad.Tensor([1.5, 1.0, 0.5]), 0.8, 1.2)
        assert np.array_equal(out.array, [1.2, 1.0, 0.8])

    def test_gradient_mask(self):
        x = ad.Tensor([1.5, 1.0, 0.5, 0.8, 1.2])
        g = autodiff_grad(lambda: ad.reduce_sum(ad.clip(x, 0.8, 1.2)), [x])[x]
        # pass-through strictly inside and at the exact boundary, zero outside
        assert np.array_equal(g, [0.0, 1.0, 0.0, 1.0, 1.0])

    def test_bad_bounds(self):
        with pytest.raises(ConfigError):
            ad.clip(ad.Tensor([1.0]), 1.0, 1.0)

    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=16))
    @settings(max_examples=50, deadline=None)
    def test_gradient_is_clamp_indicator(self, values):
        x = ad.Tensor(values)
        g = autodiff_grad(lambda: ad.reduce_sum(ad.clip(x, -1.0, 1.0)), [x])[x]
        clamped = np.clip(x.array, -1.0, 1.0)
        expected = np.where(np.abs(x.array - clamped) > 0, 0.0, 1.0)
        assert np.array_equal(g, expected)


class TestBackward:
    def test_sum_gives_ones(self, rng):
        p = ad.Tensor(rng.normal(size=(2, 3)))
        g = autodiff_grad(lambda: ad.reduce_sum(p), [p])[p]
        assert np.array_equal(g, np.ones((2, 3)))

    def test_sum_of_squares(self):
        p = ad.Tensor([1.0, 2.0])
        g = autodiff_grad(lambda: ad.reduce_sum(ad.square(p)), [p])[p]
        assert np.array_equal(g, [2.0, 4.0])

    def test_non_scalar_loss_rejected(self):
        p = ad.Tensor([1.0, 2.0])
        with ad.Tape() as tape:
            y = ad.square(p)
        with pytest.raises(ContractError):
            tape.backward(y, [p])

    def test_unreachable_leaf_gets_zeros(self):
        p = ad.Tensor([1.0, 2.0])
        q = ad.Tensor([5.0])
        with ad.Tape() as tape:
            loss = ad.reduce_sum(ad.square(p))
        grads = tape.backward(loss, [p, q])
        assert np.array_equal(grads[q], [0.0])

    def test_linearity(self, rng):
        p = ad.Tensor(rng.normal(size=6))

        def f():
            return ad.reduce_sum(ad.square(p))

        def g():
            return ad.reduce_sum(ad.exp(ad.mul(p, 0.3)))

        a, b = 2.5, -1.25
        gf = autodiff_grad(f, [p])[p]
        gg = autodiff_grad(g, [p])[p]
        combined = autodiff_grad(
            lambda: ad.add(ad.mul(f(), a), ad.mul(g(), b)), [p])[p]
        assert rel_err(combined, a * gf + b * gg) <= 1e-12

    def test_forward_is_deterministic(self, rng):
        x = rng.normal(size=(4, 4))
        a = ad.tanh(ad.matmul(ad.Tensor(x), ad.Tensor(x))).array
        b = ad.tanh(ad.matmul(ad.Tensor(x), ad.Tensor(x))).array
        assert np.array_equal(a, b)

    def test_select_rows_gradient(self, rng):
        x = ad.Tensor(rng.normal(size=(4, 3)))
        idx = np.array([0, 2, 1, 1])
        assert_grad_matches(
            lambda: ad.reduce_sum(ad.square(ad.select_rows(x, idx))), x)

    def test_linear_gradient(self, rng):
        x = ad.Tensor(rng.normal(size=(5, 3)))
        w = ad.Tensor(rng.normal(size=(2, 3)))
        b = ad.Tensor(rng.normal(size=2))
        for p in (x, w, b):
            assert_grad_matches(
                lambda: ad.reduce_sum(ad.tanh(ad.linear(x, w, b))), p)

    def test_composite_mlp_loss_finite_differences(self, rng):
        w1 = ad.Tensor(rng.normal(size=(4, 3)) * 0.5)
        b1 = ad.Tensor(rng.normal(size=4) * 0.1)
        w2 = ad.Tensor(rng.normal(size=(1, 4)) * 0.5)
        b2 = ad.Tensor(rng.normal(size=1) * 0.1)
        x = rng.normal(size=(6, 3))

        def loss():
            h = ad.tanh(ad.linear(ad.constant(x), w1, b1))
            return ad.reduce_mean(ad.square(ad.linear(h, w2, b2)))

        for p in (w1, b1, w2, b2):
            assert_grad_matches(loss, p)
