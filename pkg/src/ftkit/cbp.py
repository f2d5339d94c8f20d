"""Complex back-propagation: loss, deltas, forward sensitivities, gradients.

The trainer combines two pipelines:

* a same-timestamp delta recursion carries output error down the layer
  stack through a * W^T and the real-channel activation derivative;
* per layer, forward-accumulated sensitivity tensors dr/dW and dr/dV track
  how the recurrent (imaginary) state depends on that layer's own weights,
  so the error reaching a layer can be charged to earlier timestamps
  without unrolling the graph backwards.

At each timestamp the loss gradient for a layer is assembled from the
current delta, the real-channel derivative at alpha, and the alpha partials

    d alpha_t(i) / d W(j,k) = [i=j] a s_prev(k) - b sum_h V(i,h) dr_(t-1)(h)/dW(j,k)
    d alpha_t(i) / d V(j,q) = -[i=j] b r_prev(q) - b sum_h V(i,h) dr_(t-1)(h)/dV(j,q)

after which the sensitivities advance through the beta channel:

    dr_t(i)/d. = sigma_imag'(beta_t(i)) * ( [i=j] direct term + a sum_h V(i,h) dr_(t-1)(h)/d. )

Full mode keeps the whole (n, n, fan_in) tensors and is exact for
single-layer networks (the delta recursion ignores cross-layer temporal
paths, so deeper stacks are an approximation).  Diagonal mode keeps only
the i == j slices, trading accuracy for an (n, fan_in) footprint; both
modes coincide whenever every layer has a single unit.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from ftkit import kernels
from ftkit.errors import NumericOverflowError


@dataclass
class TrainConfig:
    """Hyper-parameters of a gradient-descent run.

    One update per epoch from the summed gradient over the whole training
    window.  ``clip_norm`` optionally rescales the per-epoch gradient to
    that global L2 norm (off by default); non-finite values always abort.
    ``track_test_mse`` records the test-window MSE after every epoch.
    """

    learning_rate: float = 0.01
    epochs: int = 1
    gradient_mode: str = "full"
    seed: int = 0
    r0: object = None
    clip_norm: float = None
    track_test_mse: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError("epochs must be a positive integer")
        if self.gradient_mode not in ("full", "diagonal"):
            raise ValueError("gradient_mode must be 'full' or 'diagonal'")
        if self.clip_norm is not None and not self.clip_norm > 0:
            raise ValueError("clip_norm must be positive when set")

    def to_dict(self):
        return {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "gradient_mode": self.gradient_mode,
            "seed": self.seed,
            "clip_norm": self.clip_norm,
        }


@dataclass
class Dataset:
    """A training window plus an optional evaluation window of step pairs."""

    train_inputs: np.ndarray  # (T, m)
    train_targets: np.ndarray  # (T, n)
    test_inputs: np.ndarray = None
    test_targets: np.ndarray = None

    def __post_init__(self):
        self.train_inputs = np.atleast_2d(np.asarray(self.train_inputs, dtype=np.float64))
        self.train_targets = np.atleast_2d(np.asarray(self.train_targets, dtype=np.float64))
        if self.train_inputs.shape[0] == 0:
            raise ValueError("training window is empty")
        if self.train_inputs.shape[0] != self.train_targets.shape[0]:
            raise ValueError("training inputs and targets differ in length")
        if self.test_inputs is not None:
            self.test_inputs = np.atleast_2d(np.asarray(self.test_inputs, dtype=np.float64))
            self.test_targets = np.atleast_2d(np.asarray(self.test_targets, dtype=np.float64))
            if self.test_inputs.shape[0] != self.test_targets.shape[0]:
                raise ValueError("test inputs and targets differ in length")


class LayerSensitivity:
    """Forward-accumulated dr/dW and dr/dV tensors for one layer.

    Full mode stores (n, n, fan_in)-shaped tensors indexed [h, j, k] and
    double-buffers them so an advance can read the whole previous state.
    Diagonal mode stores only the matching-row slices, shaped like W and V.
    """

    def __init__(self, layer, mode="full"):
        n, m = layer.W.shape
        self.mode = mode
        if mode == "full":
            self.dr_dw = np.zeros((n, n, m))
            self.dr_dv = np.zeros((n, n, n))
            self._w_buf = np.zeros((n, n, m))
            self._v_buf = np.zeros((n, n, n))
        elif mode == "diagonal":
            self.dr_dw = np.zeros((n, m))
            self.dr_dv = np.zeros((n, n))
        else:
            raise ValueError("mode must be 'full' or 'diagonal'")

    def zero(self):
        self.dr_dw[:] = 0.0
        self.dr_dv[:] = 0.0

    def max_abs(self):
        return max(np.max(np.abs(self.dr_dw)), np.max(np.abs(self.dr_dv)))

    def swap_buffers(self):
        self.dr_dw, self._w_buf = self._w_buf, self.dr_dw
        self.dr_dv, self._v_buf = self._v_buf, self.dr_dv


class SensitivityState:
    """Per-layer LayerSensitivity objects for a whole network."""

    def __init__(self, net, mode="full"):
        self.mode = mode
        self.layers = [LayerSensitivity(layer, mode) for layer in net.layers]

    def zero(self):
        for sens in self.layers:
            sens.zero()

    def max_abs(self):
        return max(sens.max_abs() for sens in self.layers)

    def __getitem__(self, index):
        return self.layers[index]


class GradientAccumulator:
    """Per-layer gradient buffers shaped like each layer's W and V."""

    def __init__(self, net):
        self.g_w = [np.zeros_like(layer.W) for layer in net.layers]
        self.g_v = [np.zeros_like(layer.V) for layer in net.layers]

    def zero(self):
        for g in self.g_w:
            g[:] = 0.0
        for g in self.g_v:
            g[:] = 0.0

    def global_norm(self):
        total = 0.0
        for g in self.g_w + self.g_v:
            total += float(np.sum(g * g))
        return float(np.sqrt(total))

    def clip(self, max_norm):
        norm = self.global_norm()
        if norm > max_norm and norm > 0.0:
            scale = max_norm / norm
            for g in self.g_w + self.g_v:
                g *= scale

    def all_finite(self):
        return all(np.all(np.isfinite(g)) for g in self.g_w + self.g_v)

    def max_abs_diff(self, other):
        worst = 0.0
        for mine, theirs in zip(self.g_w + self.g_v, other.g_w + other.g_v):
            worst = max(worst, float(np.max(np.abs(mine - theirs))))
        return worst


@dataclass
class TrainReport:
    """Outcome of a training run, serializable as a JSON document."""

    epoch_losses: list
    test_mse: float = None
    wall_clock_seconds: float = 0.0
    seed: int = 0
    config: dict = field(default_factory=dict)
    test_mse_curve: list = None
    predictions: np.ndarray = None
    sensitivity_state: "SensitivityState" = None

    @property
    def final_train_loss(self):
        return self.epoch_losses[-1] if self.epoch_losses else None

    def to_dict(self):
        doc = {
            "seed": self.seed,
            "config": self.config,
            "epoch_losses": list(self.epoch_losses),
            "final_train_loss": self.final_train_loss,
            "test_mse": self.test_mse,
            "wall_clock_seconds": self.wall_clock_seconds,
        }
        if self.test_mse_curve is not None:
            doc["test_mse_curve"] = list(self.test_mse_curve)
        return doc


def compute_loss(preds, targets):
    """Half the summed squared error over a window of step pairs."""
    preds = np.atleast_2d(np.asarray(preds, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if preds.shape != targets.shape:
        raise ValueError(f"shape mismatch: {preds.shape} vs {targets.shape}")
    diff = preds - targets
    return 0.5 * float(np.sum(diff * diff))


def output_delta(y_t, target_t):
    """Output-layer error y - target (the sign that makes -eta*grad descend)."""
    y_t = np.asarray(y_t, dtype=np.float64)
    target_t = np.asarray(target_t, dtype=np.float64)
    if y_t.shape != target_t.shape:
        raise ValueError(f"shape mismatch: {y_t.shape} vs {target_t.shape}")
    return y_t - target_t


def backprop_delta(layer_above, delta_above, alpha_above, beta_above):
    """Carry a delta one layer down at the same timestamp.

    delta_below = a * W_above^T (delta_above ⊙ sigma_real'(alpha_above));
    the derivative is taken on the real channel, matching the gradient
    assembly, and reduces to the 0/1 gate for the gated activations.
    """
    ds_dalpha, _ = layer_above.activation.derivatives(alpha_above, beta_above)
    return layer_above.a * (layer_above.W.T @ (delta_above * ds_dalpha))


def advance_sensitivities(layer, alpha, beta, s_prev, r_prev, sens):
    """Advance one layer's sensitivity tensors from timestamp t-1 to t.

    ``s_prev``/``r_prev`` are the layer input and pre-step recurrent state
    at timestamp t, ``alpha``/``beta`` the pre-activation parts; ``sens``
    must hold the t-1 tensors and is mutated to hold the t ones.
    """
    _, dr_dbeta = layer.activation.derivatives(alpha, beta)
    if sens.mode == "full":
        kernels.active.advance_full(
            layer.V, layer.a, layer.b, dr_dbeta, s_prev, r_prev,
            sens.dr_dw, sens.dr_dv, sens._w_buf, sens._v_buf,
        )
        sens.swap_buffers()
    else:
        kernels.active.advance_diag(
            np.ascontiguousarray(np.diag(layer.V)), layer.a, layer.b,
            dr_dbeta, s_prev, r_prev, sens.dr_dw, sens.dr_dv,
        )
    return sens


def accumulate_gradients(layer, delta, alpha, beta, s_prev, r_prev, sens, g_w, g_v):
    """Add timestamp t's loss-gradient contribution for one layer into g_w, g_v.

    ``sens`` must still hold the t-1 tensors, i.e. call this before
    ``advance_sensitivities`` for the same timestamp.
    """
    ds_dalpha, _ = layer.activation.derivatives(alpha, beta)
    wvec = np.ascontiguousarray(delta * ds_dalpha)
    if sens.mode == "full":
        kernels.active.accumulate_full(
            layer.V, layer.a, layer.b, wvec, s_prev, r_prev,
            sens.dr_dw, sens.dr_dv, g_w, g_v,
        )
    else:
        kernels.active.accumulate_diag(
            np.ascontiguousarray(np.diag(layer.V)), layer.a, layer.b,
            wvec, s_prev, r_prev, sens.dr_dw, sens.dr_dv, g_w, g_v,
        )


def sgd_update(layer, g_w, g_v, eta):
    """In-place descent step on one layer's W and V."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    if not (np.all(np.isfinite(g_w)) and np.all(np.isfinite(g_v))):
        raise NumericOverflowError("non-finite gradient")
    layer.W -= eta * g_w
    layer.V -= eta * g_v


def _kernel_act_params(activation):
    """(code, p1, p2, p3) for the fused kernel, or None for custom activations."""
    from ftkit.activations import ModReLU, PolarReLU, SplitSigmoid, SplitTanh, ZReLU

    if type(activation) is SplitTanh:
        return 0, 0.0, 0.0, 0.0
    if type(activation) is SplitSigmoid:
        return 1, 0.0, 0.0, 0.0
    if type(activation) is ModReLU:
        return 2, activation.bias, 0.0, 0.0
    if type(activation) is ZReLU:
        return 3, 0.0, 0.0, 0.0
    if type(activation) is PolarReLU:
        return 4, activation.radius, activation.theta_min, activation.theta_max
    return None


def _run_window_generic(net, inputs, targets, state, acc):
    """Reference sweep assembled from the public per-layer operations."""
    total_loss = 0.0
    n_layers = len(net.layers)
    for x, target in zip(inputs, targets):
        steps = net.forward_steps(x)
        err = output_delta(steps[-1].s, target)
        total_loss += 0.5 * float(err @ err)
        delta = err
        for idx in range(n_layers - 1, -1, -1):
            layer = net.layers[idx]
            rec = steps[idx]
            accumulate_gradients(
                layer, delta, rec.alpha, rec.beta, rec.s_prev, rec.r_prev,
                state[idx], acc.g_w[idx], acc.g_v[idx],
            )
            advance_sensitivities(
                layer, rec.alpha, rec.beta, rec.s_prev, rec.r_prev, state[idx]
            )
            if idx > 0:
                delta = backprop_delta(layer, delta, rec.alpha, rec.beta)
    return total_loss


def run_window(net, inputs, targets, state, acc):
    """One pass over a training window: forward, deltas, gradients, sensitivities.

    Returns the accumulated loss.  ``state`` and ``acc`` are mutated; the
    caller is responsible for zeroing them and resetting the network first.
    The hot inner loop runs on the fused kernels whenever every layer uses
    a built-in activation; custom activation objects take the generic path.
    """
    layers = net.layers
    act_params = [_kernel_act_params(layer.activation) for layer in layers]
    if any(p is None for p in act_params):
        return _run_window_generic(net, inputs, targets, state, acc)

    kern = kernels.active
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    n_layers = len(layers)
    mode_full = state.mode == "full"
    widths = [layer.n_out for layer in layers]
    r_prev = [np.ascontiguousarray(layer.r_state, dtype=np.float64) for layer in layers]
    r_out = [np.empty(n) for n in widths]
    s_out = [np.empty(n) for n in widths]
    ds = [np.empty(n) for n in widths]
    dr = [np.empty(n) for n in widths]
    vdiag = None
    if not mode_full:
        vdiag = [np.ascontiguousarray(np.diag(layer.V)) for layer in layers]

    total_loss = 0.0
    for x, target in zip(inputs, targets):
        signal = x
        for idx, layer in enumerate(layers):
            code, p1, p2, p3 = act_params[idx]
            bad = kern.forward_step(
                layer.W, layer.V, layer.a, layer.b, code, p1, p2, p3,
                signal, r_prev[idx], s_out[idx], r_out[idx], ds[idx], dr[idx],
            )
            if bad:
                raise NumericOverflowError("layer forward produced a non-finite value")
            signal = s_out[idx]
        err = signal - target
        total_loss += 0.5 * float(err @ err)
        delta = err
        for idx in range(n_layers - 1, -1, -1):
            layer = layers[idx]
            s_in = x if idx == 0 else s_out[idx - 1]
            wvec = delta * ds[idx]
            sens = state.layers[idx]
            if mode_full:
                kern.accumulate_full(
                    layer.V, layer.a, layer.b, wvec, s_in, r_prev[idx],
                    sens.dr_dw, sens.dr_dv, acc.g_w[idx], acc.g_v[idx],
                )
                kern.advance_full(
                    layer.V, layer.a, layer.b, dr[idx], s_in, r_prev[idx],
                    sens.dr_dw, sens.dr_dv, sens._w_buf, sens._v_buf,
                )
                sens.swap_buffers()
            else:
                kern.accumulate_diag(
                    vdiag[idx], layer.a, layer.b, wvec, s_in, r_prev[idx],
                    sens.dr_dw, sens.dr_dv, acc.g_w[idx], acc.g_v[idx],
                )
                kern.advance_diag(
                    vdiag[idx], layer.a, layer.b, dr[idx], s_in, r_prev[idx],
                    sens.dr_dw, sens.dr_dv,
                )
            if idx > 0:
                delta = layer.a * (layer.W.T @ wvec)
        for idx in range(n_layers):
            r_prev[idx], r_out[idx] = r_out[idx], r_prev[idx]

    for layer, r in zip(layers, r_prev):
        layer.r_state = r.copy()
    return total_loss


def evaluate(net, inputs, targets):
    """Mean squared error of the network run sequentially over a window."""
    preds = np.stack([net.forward(x) for x in inputs])
    diff = preds - np.atleast_2d(targets)
    return float(np.mean(diff * diff)), preds


def train(net, dataset, config):
    """Gradient-descent training of a network on a step-pair dataset.

    Per epoch: reset the recurrent state, zero the sensitivities, sweep the
    training window accumulating the summed gradient, then take one descent
    step per layer.  After the last epoch the training window is replayed
    with the final weights (so the recurrent state matches them), the
    sensitivities are cleared, and the test window - if present - is scored.
    """
    if not isinstance(config, TrainConfig):
        raise TypeError("config must be a TrainConfig")
    if not isinstance(dataset, Dataset):
        dataset = Dataset(*dataset)
    if dataset.train_inputs.shape[1] != net.n_in:
        raise ValueError(
            f"dataset feeds {dataset.train_inputs.shape[1]} inputs, "
            f"network expects {net.n_in}"
        )

    state = SensitivityState(net, config.gradient_mode)
    acc = GradientAccumulator(net)
    losses = []
    mse_curve = [] if config.track_test_mse else None
    started = time.perf_counter()

    for epoch in range(config.epochs):
        net.reset_state(config.r0)
        state.zero()
        acc.zero()
        try:
            epoch_loss = run_window(
                net, dataset.train_inputs, dataset.train_targets, state, acc
            )
        except NumericOverflowError as exc:
            raise NumericOverflowError(str(exc), epoch=epoch) from None
        if config.clip_norm is not None:
            acc.clip(config.clip_norm)
        if not acc.all_finite():
            raise NumericOverflowError("non-finite gradient", epoch=epoch)
        for idx, layer in enumerate(net.layers):
            sgd_update(layer, acc.g_w[idx], acc.g_v[idx], config.learning_rate)
        losses.append(epoch_loss)
        if config.track_test_mse and dataset.test_inputs is not None:
            net.refresh_imaginary(dataset.train_inputs)
            mse, _ = evaluate(net, dataset.test_inputs, dataset.test_targets)
            mse_curve.append(mse)

    net.refresh_imaginary(dataset.train_inputs)
    state.zero()

    test_mse = None
    predictions = None
    if dataset.test_inputs is not None:
        test_mse, predictions = evaluate(net, dataset.test_inputs, dataset.test_targets)

    return TrainReport(
        epoch_losses=losses,
        test_mse=test_mse,
        wall_clock_seconds=time.perf_counter() - started,
        seed=config.seed,
        config=config.to_dict(),
        test_mse_curve=mse_curve,
        predictions=predictions,
        sensitivity_state=state,
    )


def finite_difference_gradient(net, inputs, targets, h=1e-5):
    """Central-difference loss gradient, the independent oracle for CBP.

    Every weight entry is perturbed by +/-h and the whole window is
    replayed from the reset state; the input network is left untouched.
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    probe = net.copy()
    acc = GradientAccumulator(probe)

    def window_loss():
        probe.reset_state()
        preds = [probe.forward(x) for x in inputs]
        return compute_loss(preds, targets)

    for idx, layer in enumerate(probe.layers):
        for matrix, grad in ((layer.W, acc.g_w[idx]), (layer.V, acc.g_v[idx])):
            it = np.nditer(matrix, flags=["multi_index"])
            while not it.finished:
                pos = it.multi_index
                saved = matrix[pos]
                matrix[pos] = saved + h
                loss_plus = window_loss()
                matrix[pos] = saved - h
                loss_minus = window_loss()
                matrix[pos] = saved
                grad[pos] = (loss_plus - loss_minus) / (2.0 * h)
                it.iternext()
    return acc


def cbp_gradient(net, inputs, targets, mode="full"):
    """Full-window CBP gradient of a network at its current weights.

    A verification helper: runs the same sweep as one training epoch on a
    copy of the network (no weight update) through the reference per-op
    path, so its arithmetic matches the public operations exactly.
    """
    probe = net.copy()
    probe.reset_state()
    state = SensitivityState(probe, mode)
    acc = GradientAccumulator(probe)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    _run_window_generic(probe, inputs, targets, state, acc)
    return acc
