"""Static-neuron and recurrent-unit baselines for the equivalence and comparison runs."""

import time

import numpy as np

from ftkit import kernels
from ftkit.cbp import TrainConfig, TrainReport
from ftkit.errors import NumericOverflowError

_REAL_FUNCS = {
    "tanh": (np.tanh, lambda x: 1.0 - np.tanh(x) ** 2),
    "sigmoid": (
        lambda x: 1.0 / (1.0 + np.exp(-x)),
        lambda x: (1.0 / (1.0 + np.exp(-x))) * (1.0 - 1.0 / (1.0 + np.exp(-x))),
    ),
}


def _real_activation(name):
    if name not in _REAL_FUNCS:
        raise ValueError(f"unknown real activation {name!r}")
    return _REAL_FUNCS[name]


class MPNeuronLayer:
    """Classic static neuron layer y = f(W x - theta)."""

    def __init__(self, weights, thresholds=None, activation="tanh"):
        self.W = np.array(weights, dtype=np.float64)
        if self.W.ndim != 2:
            raise ValueError(f"W must be 2-D, got shape {self.W.shape}")
        n = self.W.shape[0]
        self.theta = np.zeros(n) if thresholds is None else np.array(thresholds, dtype=np.float64)
        if self.theta.shape != (n,):
            raise ValueError(f"theta must have length {n}")
        self.activation = activation
        self._f, self._fprime = _real_activation(activation)

    @classmethod
    def create(cls, n_in, n_out, activation="tanh", seed=0):
        rng = np.random.default_rng(seed)
        bound = 0.5 / np.sqrt(n_in)
        return cls(rng.uniform(-bound, bound, size=(n_out, n_in)), activation=activation)

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.W.shape[1],):
            raise ValueError(f"input has shape {x.shape}, expected ({self.W.shape[1]},)")
        return self._f(self.W @ x - self.theta)


class ElmanUnit:
    """Plain recurrent unit s_t = f(W x_t + V s_(t-1)); output equals state."""

    def __init__(self, weights, weights_rec, activation="tanh", s0=None):
        self.W = np.array(weights, dtype=np.float64)
        self.V = np.array(weights_rec, dtype=np.float64)
        n = self.W.shape[0]
        if self.V.shape != (n, n):
            raise ValueError(f"V must be square {n}x{n}, got shape {self.V.shape}")
        self.s0 = np.zeros(n) if s0 is None else np.array(s0, dtype=np.float64)
        self.activation = activation
        self._f, self._fprime = _real_activation(activation)
        self.s_state = self.s0.copy()

    @classmethod
    def create(cls, n_in, n_out, activation="tanh", seed=0):
        rng = np.random.default_rng(seed)
        w_bound = 0.5 / np.sqrt(n_in)
        v_bound = 0.5 / np.sqrt(n_out)
        return cls(
            rng.uniform(-w_bound, w_bound, size=(n_out, n_in)),
            rng.uniform(-v_bound, v_bound, size=(n_out, n_out)),
            activation=activation,
        )

    def reset(self, s0=None):
        if s0 is not None:
            self.s0 = np.asarray(s0, dtype=np.float64).copy()
        self.s_state = self.s0.copy()

    def step(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.W.shape[1],):
            raise ValueError(f"input has shape {x.shape}, expected ({self.W.shape[1]},)")
        pre = self.W @ x + self.V @ self.s_state
        self.s_state = self._f(pre)
        return self.s_state


def _train_mp(model, dataset, config):
    """Batch gradient descent on a static layer (standard back-propagation)."""
    losses = []
    for epoch in range(config.epochs):
        g_w = np.zeros_like(model.W)
        g_theta = np.zeros_like(model.theta)
        loss = 0.0
        for x, target in zip(dataset.train_inputs, dataset.train_targets):
            pre = model.W @ x - model.theta
            y = model._f(pre)
            err = y - target
            loss += 0.5 * float(err @ err)
            chain = err * model._fprime(pre)
            g_w += np.outer(chain, x)
            g_theta -= chain
        if not (np.all(np.isfinite(g_w)) and np.all(np.isfinite(g_theta))):
            raise NumericOverflowError("non-finite gradient", epoch=epoch)
        model.W -= config.learning_rate * g_w
        model.theta -= config.learning_rate * g_theta
        losses.append(loss)
    preds = None
    test_mse = None
    if dataset.test_inputs is not None:
        preds = np.stack([model.forward(x) for x in dataset.test_inputs])
        diff = preds - dataset.test_targets
        test_mse = float(np.mean(diff * diff))
    return losses, test_mse, preds


def _train_elman(model, dataset, config):
    """Batch gradient descent with exact forward sensitivities (RTRL).

    The state recursion matches a flexible-transmitter layer's imaginary
    channel at a = b = 1, so the sensitivity advance reuses that kernel;
    since the unit's output is its state, the loss gradient contracts the
    output error directly against the advanced tensors.
    """
    n, m = model.W.shape
    losses = []
    for epoch in range(config.epochs):
        model.reset()
        ds_dw = np.zeros((n, n, m))
        ds_dv = np.zeros((n, n, n))
        w_buf = np.zeros((n, n, m))
        v_buf = np.zeros((n, n, n))
        g_w = np.zeros_like(model.W)
        g_v = np.zeros_like(model.V)
        loss = 0.0
        for x, target in zip(dataset.train_inputs, dataset.train_targets):
            s_prev = model.s_state
            pre = model.W @ x + model.V @ s_prev
            fprime = model._fprime(pre)
            kernels.active.advance_full(
                model.V, 1.0, 1.0, np.ascontiguousarray(fprime),
                np.ascontiguousarray(x), np.ascontiguousarray(s_prev),
                ds_dw, ds_dv, w_buf, v_buf,
            )
            ds_dw, w_buf = w_buf, ds_dw
            ds_dv, v_buf = v_buf, ds_dv
            model.s_state = model._f(pre)
            err = model.s_state - target
            loss += 0.5 * float(err @ err)
            g_w += np.tensordot(err, ds_dw, axes=(0, 0))
            g_v += np.tensordot(err, ds_dv, axes=(0, 0))
        if not (np.all(np.isfinite(g_w)) and np.all(np.isfinite(g_v))):
            raise NumericOverflowError("non-finite gradient", epoch=epoch)
        model.W -= config.learning_rate * g_w
        model.V -= config.learning_rate * g_v
        losses.append(loss)
    preds = None
    test_mse = None
    if dataset.test_inputs is not None:
        # replay the training window so the state matches the final weights
        model.reset()
        for x in dataset.train_inputs:
            model.step(x)
        preds = np.stack([model.step(x) for x in dataset.test_inputs])
        diff = preds - dataset.test_targets
        test_mse = float(np.mean(diff * diff))
    return losses, test_mse, preds


def train_baseline(model, dataset, config):
    """Train an MPNeuronLayer or ElmanUnit with the shared loss and budgets."""
    if not isinstance(config, TrainConfig):
        raise TypeError("config must be a TrainConfig")
    started = time.perf_counter()
    if isinstance(model, MPNeuronLayer):
        losses, test_mse, preds = _train_mp(model, dataset, config)
    elif isinstance(model, ElmanUnit):
        losses, test_mse, preds = _train_elman(model, dataset, config)
    else:
        raise TypeError(f"unsupported baseline model {type(model).__name__}")
    return TrainReport(
        epoch_losses=losses,
        test_mse=test_mse,
        wall_clock_seconds=time.perf_counter() - started,
        seed=config.seed,
        config=config.to_dict(),
        predictions=preds,
    )
