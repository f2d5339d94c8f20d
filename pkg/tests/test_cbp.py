import math

import numpy as np
import pytest

from ftkit.activations import SplitTanh, ZReLU, make_activation
from ftkit.baselines import MPNeuronLayer
from ftkit.cbp import (
    Dataset,
    GradientAccumulator,
    SensitivityState,
    TrainConfig,
    _run_window_generic,
    accumulate_gradients,
    advance_sensitivities,
    backprop_delta,
    cbp_gradient,
    compute_loss,
    finite_difference_gradient,
    output_delta,
    run_window,
    sgd_update,
    train,
)
from ftkit.errors import NumericOverflowError
from ftkit.network import FTLayer, FTNetwork


def scalar_layer(w, v, a=1.0, b=1.0, r0=None, activation=None):
    return FTLayer([[w]], [[v]], a=a, b=b, r0=r0, activation=activation)


class TestLoss:
    def test_zero_on_equal(self):
        assert compute_loss([[1.0, 2.0]], [[1.0, 2.0]]) == 0.0

    def test_single_unit_error(self):
        assert compute_loss([[1.0]], [[0.0]]) == 0.5

    def test_hand_sum(self):
        # errors (1, -2) -> 0.5 * (1 + 4)
        assert compute_loss([[1.0], [0.0]], [[0.0], [2.0]]) == 2.5

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            compute_loss([[1.0, 2.0]], [[1.0]])


class TestOutputDelta:
    def test_zero_at_target(self):
        np.testing.assert_array_equal(output_delta(np.ones(3), np.ones(3)), np.zeros(3))

    def test_sign_convention(self):
        np.testing.assert_array_equal(output_delta(np.array([1.0]), np.array([0.0])), [1.0])

    def test_componentwise(self):
        got = output_delta(np.array([0.2, -0.4]), np.array([0.5, -0.4]))
        np.testing.assert_allclose(got, [-0.3, 0.0])

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            output_delta(np.zeros(2), np.zeros(3))


class TestBackpropDelta:
    def test_scaled_by_a(self):
        layer = scalar_layer(2.0, 0.0, a=0.0)
        step = layer.forward([1.0])
        got = backprop_delta(layer, np.array([0.5]), step.alpha, step.beta)
        np.testing.assert_array_equal(got, [0.0])

    def test_scalar_chain(self):
        # alpha = 0 so tanh' = 1; delta_below = a * W^T * delta = 1 * 2 * 0.5
        layer = scalar_layer(2.0, 0.0, a=1.0)
        got = backprop_delta(
            layer, np.array([0.5]), np.zeros(1), np.zeros(1)
        )
        np.testing.assert_allclose(got, [1.0])

    def test_zero_delta(self):
        layer = scalar_layer(2.0, 1.0)
        step = layer.forward([0.3])
        got = backprop_delta(layer, np.zeros(1), step.alpha, step.beta)
        np.testing.assert_array_equal(got, [0.0])


class TestAdvanceSensitivities:
    def test_first_step_from_zero_state(self):
        x = 0.8
        layer = scalar_layer(0.6, 0.4, a=1.0, b=1.0)
        sens = SensitivityState(FTNetwork([layer]), "full")[0]
        step = layer.forward([x])
        advance_sensitivities(layer, step.alpha, step.beta, step.s_prev, step.r_prev, sens)
        expected = (1.0 - math.tanh(step.beta[0]) ** 2) * 1.0 * x
        np.testing.assert_allclose(sens.dr_dw[0, 0, 0], expected)

    def test_no_accumulation_without_recurrence(self):
        # V = 0 kills the temporal term: dr/dW depends on the step alone
        layer = scalar_layer(0.5, 0.0, b=0.7)
        net = FTNetwork([layer])
        sens = SensitivityState(net, "full")[0]
        rng = np.random.default_rng(2)
        for _ in range(5):
            x = rng.uniform(-1, 1)
            step = layer.forward([x])
            advance_sensitivities(layer, step.alpha, step.beta, step.s_prev, step.r_prev, sens)
            expected = (1.0 - np.tanh(step.beta[0]) ** 2) * 0.7 * x
            np.testing.assert_allclose(sens.dr_dw[0, 0, 0], expected)

    def test_zero_b_keeps_w_sensitivities_zero(self):
        layer = scalar_layer(0.5, 0.9, b=0.0)
        net = FTNetwork([layer])
        sens = SensitivityState(net, "full")[0]
        for x in (0.2, -0.7, 1.1):
            step = layer.forward([x])
            advance_sensitivities(layer, step.alpha, step.beta, step.s_prev, step.r_prev, sens)
            assert np.all(sens.dr_dw == 0.0)


class TestAccumulateGradients:
    def test_static_perceptron_gradient(self):
        # V = 0, r0 = 0: the gradient collapses to delta * sigma'(alpha) * a * input
        layer = scalar_layer(0.4, 0.0, a=1.3, b=0.5)
        net = FTNetwork([layer])
        sens = SensitivityState(net, "full")[0]
        g_w = np.zeros((1, 1))
        g_v = np.zeros((1, 1))
        x = 0.6
        step = layer.forward([x])
        delta = np.array([0.25])
        accumulate_gradients(layer, delta, step.alpha, step.beta, step.s_prev,
                             step.r_prev, sens, g_w, g_v)
        expected = 0.25 * (1.0 - math.tanh(step.alpha[0]) ** 2) * 1.3 * x
        np.testing.assert_allclose(g_w[0, 0], expected)

    def test_zero_delta_accumulates_nothing(self):
        layer = scalar_layer(0.4, 0.2)
        net = FTNetwork([layer])
        sens = SensitivityState(net, "full")[0]
        g_w = np.zeros((1, 1))
        g_v = np.zeros((1, 1))
        for x in (0.5, -0.5):
            step = layer.forward([x])
            accumulate_gradients(layer, np.zeros(1), step.alpha, step.beta,
                                 step.s_prev, step.r_prev, sens, g_w, g_v)
            advance_sensitivities(layer, step.alpha, step.beta, step.s_prev,
                                  step.r_prev, sens)
        assert np.all(g_w == 0.0) and np.all(g_v == 0.0)

    def test_two_step_gradient_matches_finite_differences(self):
        net = FTNetwork([scalar_layer(0.3, 0.2, a=1.0, b=1.0)])
        inputs = np.array([[1.0], [-1.0]])
        targets = np.array([[0.0], [0.0]])
        mine = cbp_gradient(net, inputs, targets, mode="full")
        oracle = finite_difference_gradient(net, inputs, targets, h=1e-6)
        for got, want in zip(mine.g_w + mine.g_v, oracle.g_w + oracle.g_v):
            rel = np.abs(got - want) / np.maximum(np.abs(want), 1e-12)
            assert np.max(rel) < 1e-6


class TestFiniteDifferenceOracle:
    def test_zero_network_zero_targets_flat(self):
        net = FTNetwork([FTLayer(np.zeros((2, 3)), np.zeros((2, 2)))])
        rng = np.random.default_rng(0)
        inputs = rng.uniform(-1, 1, size=(6, 3))
        targets = np.zeros((6, 2))
        grad = finite_difference_gradient(net, inputs, targets)
        assert grad.global_norm() == 0.0

    def test_step_size_robustness(self):
        net = FTNetwork.create([2, 2], seed=1)
        rng = np.random.default_rng(5)
        inputs = rng.uniform(-1, 1, size=(8, 2))
        targets = rng.uniform(-0.5, 0.5, size=(8, 2))
        coarse = finite_difference_gradient(net, inputs, targets, h=1e-4)
        fine = finite_difference_gradient(net, inputs, targets, h=1e-5)
        for got, want in zip(coarse.g_w + coarse.g_v, fine.g_w + fine.g_v):
            rel = np.abs(got - want) / np.maximum(np.abs(want), 1e-8)
            assert np.max(rel) < 1e-6

    def test_rejects_bad_step(self):
        net = FTNetwork.create([1, 1])
        with pytest.raises(ValueError):
            finite_difference_gradient(net, [[1.0]], [[0.0]], h=0.0)

    def test_leaves_network_untouched(self):
        net = FTNetwork.create([2, 2], seed=3)
        before = net.layers[0].W.copy()
        finite_difference_gradient(net, [[1.0, 0.5]], [[0.0, 0.0]])
        np.testing.assert_array_equal(net.layers[0].W, before)


class TestSgdUpdate:
    def test_zero_gradient_noop(self):
        layer = scalar_layer(1.0, -0.5)
        sgd_update(layer, np.zeros((1, 1)), np.zeros((1, 1)), 0.01)
        assert layer.W[0, 0] == 1.0 and layer.V[0, 0] == -0.5
        sgd_update(layer, np.zeros((1, 1)), np.zeros((1, 1)), 0.01)
        assert layer.W[0, 0] == 1.0 and layer.V[0, 0] == -0.5

    def test_descent_arithmetic(self):
        layer = scalar_layer(1.0, 0.0)
        sgd_update(layer, np.array([[2.0]]), np.zeros((1, 1)), 0.01)
        assert layer.W[0, 0] == pytest.approx(0.98)

    def test_non_finite_gradient_aborts(self):
        layer = scalar_layer(1.0, 0.0)
        with pytest.raises(NumericOverflowError):
            sgd_update(layer, np.array([[np.nan]]), np.zeros((1, 1)), 0.01)


def tiny_dataset(seed=0, steps=12, width=1):
    rng = np.random.default_rng(seed)
    return Dataset(
        rng.uniform(-1, 1, size=(steps, width)),
        rng.uniform(-0.5, 0.5, size=(steps, width)),
    )


class TestTrain:
    def test_rejects_zero_epochs(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)

    def test_rejects_zero_learning_rate(self):
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0, epochs=1)

    def test_rejects_empty_dataset(self):
        with pytest.raises(ValueError):
            Dataset(np.empty((0, 1)), np.empty((0, 1)))

    def test_single_neuron_cosine_fit_descends(self):
        t = np.arange(300)
        c = np.cos(2 * np.pi * t / 3.0)
        ds = Dataset(c[:, None], c[:, None].copy())
        net = FTNetwork.create([1, 1], activation=SplitTanh(), seed=0)
        report = train(net, ds, TrainConfig(learning_rate=0.01, epochs=10, seed=0))
        losses = report.epoch_losses
        assert all(b < a for a, b in zip(losses, losses[1:]))
        assert np.isfinite(net.layers[0].W[0, 0]) and np.isfinite(net.layers[0].V[0, 0])

    def test_sensitivities_zero_after_train(self):
        net = FTNetwork.create([1, 3, 1], seed=2)
        report = train(net, tiny_dataset(), TrainConfig(epochs=3))
        assert report.sensitivity_state.max_abs() == 0.0

    def test_report_round_trip_keys(self):
        net = FTNetwork.create([1, 1], seed=2)
        ds = Dataset([[0.1]], [[0.2]], [[0.3]], [[0.1]])
        report = train(net, ds, TrainConfig(epochs=2, seed=11))
        doc = report.to_dict()
        assert doc["seed"] == 11
        assert len(doc["epoch_losses"]) == 2
        assert doc["final_train_loss"] == report.epoch_losses[-1]
        assert doc["test_mse"] == report.test_mse

    def test_overflow_reports_epoch(self):
        # a pass-through activation lets an overflowing pre-activation reach
        # the output, which must abort with the failing epoch attached
        net = FTNetwork([FTLayer([[1e308]], [[0.0]], a=1.0, b=0.001, activation=ZReLU())])
        ds = Dataset(np.full((4, 1), 2.0), np.full((4, 1), -3.0))
        with pytest.raises(NumericOverflowError) as err:
            train(net, ds, TrainConfig(learning_rate=0.01, epochs=3, seed=0))
        assert err.value.epoch == 0

    def test_clip_norm_bounds_step(self):
        net = FTNetwork.create([1, 2, 1], seed=4)
        ds = tiny_dataset(3)
        report = train(
            net, ds, TrainConfig(learning_rate=0.01, epochs=5, clip_norm=0.5, seed=4)
        )
        assert all(np.isfinite(l) for l in report.epoch_losses)

    def test_refresh_leaves_state_consistent_with_final_weights(self):
        ds = tiny_dataset(6, steps=20)
        net = FTNetwork.create([1, 2, 1], seed=6)
        train(net, ds, TrainConfig(epochs=4, seed=6))
        states = [layer.r_state.copy() for layer in net.layers]
        net.refresh_imaginary(ds.train_inputs)
        for layer, want in zip(net.layers, states):
            np.testing.assert_array_equal(layer.r_state, want)


class TestGradientExactness:
    def test_full_mode_matches_oracle_on_single_layer(self):
        rng = np.random.default_rng(42)
        net = FTNetwork.create([3, 2], activation=SplitTanh(), a=1.0, b=1.0, seed=7)
        inputs = rng.uniform(-1, 1, size=(10, 3))
        targets = rng.uniform(-0.8, 0.8, size=(10, 2))
        mine = cbp_gradient(net, inputs, targets, mode="full")
        oracle = finite_difference_gradient(net, inputs, targets, h=1e-5)
        for got, want in zip(mine.g_w + mine.g_v, oracle.g_w + oracle.g_v):
            mask = np.abs(want) > 1e-8
            rel = np.abs(got[mask] - want[mask]) / np.abs(want[mask])
            assert np.max(rel) < 1e-4

    def test_diagonal_equals_full_for_unit_layers(self):
        net = FTNetwork.create([1, 1, 1], seed=9)
        rng = np.random.default_rng(1)
        inputs = rng.uniform(-1, 1, size=(15, 1))
        targets = rng.uniform(-0.5, 0.5, size=(15, 1))
        full = cbp_gradient(net, inputs, targets, mode="full")
        diag = cbp_gradient(net, inputs, targets, mode="diagonal")
        assert full.max_abs_diff(diag) == 0.0

    def test_static_reduction_matches_mp_backprop_exactly(self):
        # b = 0 and r0 = 0 silence the recurrent channel entirely
        rng = np.random.default_rng(12)
        W = rng.normal(size=(2, 3)) * 0.5
        net = FTNetwork([FTLayer(W, np.zeros((2, 2)), a=1.0, b=0.0)])
        mp = MPNeuronLayer(W, np.zeros(2), activation="tanh")
        inputs = rng.uniform(-1, 1, size=(8, 3))
        targets = rng.uniform(-0.5, 0.5, size=(8, 2))
        mine = cbp_gradient(net, inputs, targets, mode="full")
        static = np.zeros_like(W)
        for x, target in zip(inputs, targets):
            pre = mp.W @ x - mp.theta
            err = np.tanh(pre) - target
            chain = err * (1.0 - np.tanh(pre) ** 2)
            static += 1.0 * np.outer(chain, x) - 0.0 * np.zeros_like(W)
        np.testing.assert_array_equal(mine.g_w[0], static)
        assert np.all(mine.g_v[0] == 0.0)

    def test_full_mode_oracle_various_shapes(self):
        rng = np.random.default_rng(33)
        for widths, a, b in [([1, 1], 1.0, 1.0), ([2, 3], 0.8, -0.6), ([4, 2], -1.1, 0.4)]:
            net = FTNetwork.create(widths, a=a, b=b, seed=rng.integers(100))
            inputs = rng.uniform(-1, 1, size=(7, widths[0]))
            targets = rng.uniform(-0.5, 0.5, size=(7, widths[-1]))
            mine = cbp_gradient(net, inputs, targets, mode="full")
            oracle = finite_difference_gradient(net, inputs, targets, h=1e-5)
            for got, want in zip(mine.g_w + mine.g_v, oracle.g_w + oracle.g_v):
                mask = np.abs(want) > 1e-8
                if mask.any():
                    rel = np.abs(got[mask] - want[mask]) / np.abs(want[mask])
                    assert np.max(rel) < 1e-4


class TestFastPathParity:
    @pytest.mark.parametrize("kind,params", [
        ("tanh", {}),
        ("sigmoid", {}),
        ("modrelu", {"bias": -0.3}),
        ("zrelu", {}),
        ("prelu", {}),
    ])
    @pytest.mark.parametrize("mode", ["full", "diagonal"])
    def test_fused_loop_equals_public_ops(self, kind, params, mode):
        rng = np.random.default_rng(77)
        act = make_activation(kind, **params)
        net = FTNetwork.create([2, 4, 1], activation=act, a=1.0, b=0.8, seed=3)
        inputs = rng.uniform(-1, 1, size=(25, 2))
        targets = rng.uniform(-0.8, 0.8, size=(25, 1))

        fast_net = net.copy()
        fast_net.reset_state()
        fast_state = SensitivityState(fast_net, mode)
        fast_acc = GradientAccumulator(fast_net)
        fast_loss = run_window(fast_net, inputs, targets, fast_state, fast_acc)

        ref_net = net.copy()
        ref_net.reset_state()
        ref_state = SensitivityState(ref_net, mode)
        ref_acc = GradientAccumulator(ref_net)
        ref_loss = _run_window_generic(ref_net, inputs, targets, ref_state, ref_acc)

        assert fast_loss == pytest.approx(ref_loss, rel=1e-12, abs=1e-12)
        assert fast_acc.max_abs_diff(ref_acc) < 1e-12
        for mine, theirs in zip(fast_net.layers, ref_net.layers):
            np.testing.assert_allclose(mine.r_state, theirs.r_state, atol=1e-13)
