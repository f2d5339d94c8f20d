"""Flexible-transmitter layers and the feed-forward network built from them.

Each unit carries a pair of transmitter weights and a private recurrent
state: the input weights ``W`` (vesicle concentrations) act on the stimulus
arriving from the layer below, the square recurrent weights ``V`` (receptor
strengths) act on the layer's own neurotrophin densities from the previous
timestamp.  The two channels are fused as a complex number, passed through
the linear conversion z -> (a + b*i) * z and a complex activation:

    alpha_t = a * W s_prev - b * V r_(t-1)
    beta_t  = b * W s_prev + a * V r_(t-1)
    s_t + r_t * i = sigma(alpha_t + beta_t * i)

The real output s_t feeds the next layer; the imaginary output r_t becomes
the layer's state for the next timestamp.  With V = 0, r_0 = 0, a = 1 and
b = 0 a layer collapses to a plain static neuron layer; with a = b = 1 the
imaginary channel follows the classic recurrent-unit trajectory
r_t = sigma(W x_t + V r_(t-1)).
"""

import json
from typing import NamedTuple

import numpy as np

from ftkit.activations import SplitTanh, activation_from_config
from ftkit.errors import NumericOverflowError
from ftkit.ioutil import atomic_write_text

SERIAL_FORMAT = "ftnet-model"
SERIAL_VERSION = 1


class LayerStep(NamedTuple):
    """Per-layer record of one forward timestamp, consumed by the trainer."""

    s_prev: np.ndarray  # input stimulus at this timestamp
    r_prev: np.ndarray  # recurrent state before the step
    alpha: np.ndarray
    beta: np.ndarray
    s: np.ndarray
    r: np.ndarray


class FTLayer:
    """One layer of flexible-transmitter units.

    Forward calls mutate ``r_state``; a layer therefore belongs to a single
    writer at a time.  ``reset`` restores the configured initial state.
    """

    def __init__(self, weights_in, weights_rec, a=1.0, b=1.0, activation=None, r0=None):
        W = np.array(weights_in, dtype=np.float64)
        V = np.array(weights_rec, dtype=np.float64)
        if W.ndim != 2:
            raise ValueError(f"W must be 2-D, got shape {W.shape}")
        n = W.shape[0]
        if V.shape != (n, n):
            raise ValueError(f"V must be square {n}x{n}, got shape {V.shape}")
        self.W = W
        self.V = V
        self.a = float(a)
        self.b = float(b)
        self.activation = activation if activation is not None else SplitTanh()
        if r0 is None:
            r0 = np.zeros(n)
        self.r0 = np.array(r0, dtype=np.float64)
        if self.r0.shape != (n,):
            raise ValueError(f"r0 must have length {n}, got shape {self.r0.shape}")
        if not np.all(np.isfinite(self.r0)):
            raise ValueError("r0 must be finite")
        self.r_state = self.r0.copy()

    @property
    def n_out(self):
        return self.W.shape[0]

    @property
    def n_in(self):
        return self.W.shape[1]

    def reset(self, r0=None):
        """Set the recurrent state to ``r0`` (default: the configured initial state)."""
        if r0 is not None:
            r0 = np.asarray(r0, dtype=np.float64)
            if r0.shape != (self.n_out,):
                raise ValueError(f"r0 must have length {self.n_out}, got shape {r0.shape}")
            self.r0 = r0.copy()
        self.r_state = self.r0.copy()

    def forward(self, s_prev):
        """Advance the layer one timestamp; returns a LayerStep record.

        Side effect: ``r_state`` moves to the new neurotrophin densities.
        """
        s_prev = np.asarray(s_prev, dtype=np.float64)
        if s_prev.shape != (self.n_in,):
            raise ValueError(
                f"input has shape {s_prev.shape}, layer expects ({self.n_in},)"
            )
        r_prev = self.r_state
        with np.errstate(over="ignore", invalid="ignore"):
            ws = self.W @ s_prev
            vr = self.V @ r_prev
            alpha = self.a * ws - self.b * vr
            beta = self.b * ws + self.a * vr
            s, r = self.activation.apply(alpha, beta)
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(r))):
            raise NumericOverflowError("layer forward produced a non-finite value")
        self.r_state = r
        return LayerStep(s_prev, r_prev, alpha, beta, s, r)

    def copy(self):
        layer = FTLayer(self.W, self.V, self.a, self.b, self.activation, self.r0)
        layer.r_state = self.r_state.copy()
        return layer


class FTNetwork:
    """An ordered stack of FTLayer objects forming a feed-forward network."""

    def __init__(self, layers):
        if not layers:
            raise ValueError("network needs at least one layer")
        for lower, upper in zip(layers, layers[1:]):
            if upper.n_in != lower.n_out:
                raise ValueError(
                    f"layer widths do not chain: {lower.n_out} -> {upper.n_in}"
                )
        self.layers = list(layers)

    @classmethod
    def create(cls, widths, activation=None, a=1.0, b=1.0, seed=0):
        """Build a network with seeded uniform init on [-0.5, 0.5] / sqrt(fan_in).

        ``widths`` lists the stimulus dimensions [m, l1, ..., n]; a single
        hidden width of 0 is accepted as shorthand for no hidden layer.
        """
        widths = [int(w) for w in widths if int(w) != 0]
        if len(widths) < 2:
            raise ValueError("widths must contain input and output sizes")
        if any(w < 1 for w in widths):
            raise ValueError("layer widths must be positive")
        rng = np.random.default_rng(seed)
        layers = []
        for n_in, n_out in zip(widths, widths[1:]):
            w_bound = 0.5 / np.sqrt(n_in)
            v_bound = 0.5 / np.sqrt(n_out)
            W = rng.uniform(-w_bound, w_bound, size=(n_out, n_in))
            V = rng.uniform(-v_bound, v_bound, size=(n_out, n_out))
            layers.append(FTLayer(W, V, a=a, b=b, activation=activation))
        return cls(layers)

    @property
    def n_in(self):
        return self.layers[0].n_in

    @property
    def n_out(self):
        return self.layers[-1].n_out

    def signature(self):
        """Size signature (m, l1, ..., n); a lone layer reports (m, 0, n)."""
        widths = [self.layers[0].n_in] + [layer.n_out for layer in self.layers]
        if len(self.layers) == 1:
            return (widths[0], 0, widths[1])
        return tuple(widths)

    def forward_steps(self, x):
        """Run one timestamp through every layer, returning all LayerStep records."""
        steps = []
        signal = x
        for layer in self.layers:
            step = layer.forward(signal)
            steps.append(step)
            signal = step.s
        return steps

    def forward(self, x):
        """One timestamp; returns the final stimulus vector y_t."""
        return self.forward_steps(x)[-1].s

    def reset_state(self, r0=None):
        """Reset every layer's recurrent state (r0: optional per-layer vectors)."""
        if r0 is None:
            for layer in self.layers:
                layer.reset()
        else:
            if len(r0) != len(self.layers):
                raise ValueError(f"need {len(self.layers)} r0 vectors, got {len(r0)}")
            for layer, vec in zip(self.layers, r0):
                layer.reset(vec)

    def refresh_imaginary(self, inputs):
        """Replay ``inputs`` from the reset state so r_state reflects current weights.

        Called after training so that predictions continue from the
        recurrent trajectory the updated weights would have produced.
        """
        self.reset_state()
        for x in inputs:
            self.forward(x)

    def copy(self):
        return FTNetwork([layer.copy() for layer in self.layers])

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        return {
            "format": SERIAL_FORMAT,
            "version": SERIAL_VERSION,
            "signature": list(self.signature()),
            "layers": [
                {
                    "a": layer.a,
                    "b": layer.b,
                    "activation": layer.activation.config(),
                    "w": layer.W.tolist(),
                    "v": layer.V.tolist(),
                    "r0": layer.r0.tolist(),
                    "r_state": layer.r_state.tolist(),
                }
                for layer in self.layers
            ],
        }

    def save(self, path):
        """Write the model atomically; 64-bit values round-trip bit-exactly."""
        atomic_write_text(path, json.dumps(self.to_dict(), indent=1))

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != SERIAL_FORMAT:
            raise ValueError(f"not a {SERIAL_FORMAT} document")
        if doc.get("version") != SERIAL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        layers = []
        for spec in doc["layers"]:
            layer = FTLayer(
                spec["w"],
                spec["v"],
                a=spec["a"],
                b=spec["b"],
                activation=activation_from_config(spec["activation"]),
                r0=spec["r0"],
            )
            layer.r_state = np.array(spec["r_state"], dtype=np.float64)
            layers.append(layer)
        return cls(layers)

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
