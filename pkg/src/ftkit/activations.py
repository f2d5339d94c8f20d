"""Complex activation functions and the point-wise derivatives the trainer needs.

Two families are provided:

* split activations apply a real nonlinearity independently to the real and
  imaginary parts of the pre-activation;
* gated activations (modReLU, zReLU, polar ReLU) either pass the complex
  value through (possibly rescaled) or zero it, depending on its magnitude
  and/or phase.

For the gated family the per-channel derivative is an indicator of the
active region: 1 where the unit passed a value through, 0 in the dead
region.  This is exact almost everywhere for zReLU and polar ReLU (which
act as the identity when open) and an approximation for modReLU's radial
rescaling.  Region boundaries count as active so the gate is deterministic.
"""

import math

import numpy as np


class Activation:
    """Element-wise complex activation split into (real, imag) channels."""

    name = "base"
    gated = False

    def apply(self, alpha, beta):
        """Map pre-activation parts (alpha, beta) to output parts (s, r)."""
        raise NotImplementedError

    def derivatives(self, alpha, beta):
        """Point-wise factors (ds/dalpha, dr/dbeta) at the given pre-activation."""
        raise NotImplementedError

    def channel_derivative(self, pre_activation, channel="real", output_nonzero=True):
        """Scalar per-channel derivative; see subclass behaviour."""
        raise NotImplementedError

    def config(self):
        return {"kind": self.name}

    def __repr__(self):
        params = {k: v for k, v in self.config().items() if k != "kind"}
        inner = ", ".join(f"{k}={v:g}" for k, v in params.items())
        return f"{type(self).__name__}({inner})"


class _Split(Activation):
    """Shared machinery for the split family: sigma_real == sigma_imag."""

    def _f(self, x):
        raise NotImplementedError

    def _fprime(self, x):
        raise NotImplementedError

    def apply(self, alpha, beta):
        return self._f(alpha), self._f(beta)

    def derivatives(self, alpha, beta):
        return self._fprime(alpha), self._fprime(beta)

    def channel_derivative(self, pre_activation, channel="real", output_nonzero=True):
        # channel selects sigma_real' vs sigma_imag'; they coincide here.
        return float(self._fprime(np.float64(pre_activation)))


class SplitTanh(_Split):
    name = "tanh"

    def _f(self, x):
        return np.tanh(x)

    def _fprime(self, x):
        t = np.tanh(x)
        return 1.0 - t * t


class SplitSigmoid(_Split):
    name = "sigmoid"

    def _f(self, x):
        return 1.0 / (1.0 + np.exp(-x))

    def _fprime(self, x):
        s = self._f(x)
        return s * (1.0 - s)


class _Gated(Activation):
    """Shared machinery for the ReLU family: pass-or-zero with a 0/1 gate."""

    gated = True

    def _gate(self, alpha, beta):
        raise NotImplementedError

    def apply(self, alpha, beta):
        gate = self._gate(alpha, beta)
        return np.where(gate, alpha, 0.0), np.where(gate, beta, 0.0)

    def derivatives(self, alpha, beta):
        gate = self._gate(alpha, beta).astype(np.float64)
        return gate, gate

    def channel_derivative(self, pre_activation, channel="real", output_nonzero=True):
        return 1.0 if output_nonzero else 0.0


class ModReLU(_Gated):
    """Magnitude-gated activation: (|z| + bias) * z / |z| when |z| + bias >= 0, else 0.

    A negative bias carves a dead circle of radius |bias| around the origin.
    The output at z = 0 is defined as 0 (continuous extension).
    """

    name = "modrelu"

    def __init__(self, bias=0.0):
        self.bias = float(bias)

    def _gate(self, alpha, beta):
        return np.hypot(alpha, beta) + self.bias >= 0.0

    def apply(self, alpha, beta):
        mag = np.hypot(alpha, beta)
        gate = mag + self.bias >= 0.0
        safe = np.where(mag > 0.0, mag, 1.0)
        scale = np.where(gate & (mag > 0.0), (mag + self.bias) / safe, 0.0)
        return alpha * scale, beta * scale

    def config(self):
        return {"kind": self.name, "bias": self.bias}


class ZReLU(_Gated):
    """Phase-gated activation: identity for phase in [0, pi/2], else 0."""

    name = "zrelu"

    def _gate(self, alpha, beta):
        # phase in [0, pi/2] <=> both parts non-negative (closed region)
        return (np.asarray(alpha) >= 0.0) & (np.asarray(beta) >= 0.0)


class PolarReLU(_Gated):
    """Radius- and phase-gated activation.

    Passes z unchanged when |z| >= radius and the phase lies in
    [theta_min, theta_max]; otherwise outputs 0.  The radius forms a dead
    circle around the origin, the angles an allowed excitation sector.
    """

    name = "prelu"

    def __init__(self, radius=0.3, theta_min=0.0, theta_max=math.pi / 2):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        if not -math.pi <= theta_min < theta_max <= math.pi:
            raise ValueError("need -pi <= theta_min < theta_max <= pi")
        self.radius = float(radius)
        self.theta_min = float(theta_min)
        self.theta_max = float(theta_max)

    def _gate(self, alpha, beta):
        phase = np.arctan2(beta, alpha)
        radius_ok = np.hypot(alpha, beta) >= self.radius
        return radius_ok & (phase >= self.theta_min) & (phase <= self.theta_max)

    def config(self):
        return {
            "kind": self.name,
            "radius": self.radius,
            "theta_min": self.theta_min,
            "theta_max": self.theta_max,
        }


ACTIVATION_KINDS = ("tanh", "sigmoid", "modrelu", "zrelu", "prelu")


def make_activation(kind, **params):
    """Build an activation by name; ``params`` feed the gated constructors."""
    table = {
        "tanh": SplitTanh,
        "sigmoid": SplitSigmoid,
        "modrelu": ModReLU,
        "zrelu": ZReLU,
        "prelu": PolarReLU,
    }
    if kind not in table:
        raise ValueError(f"unknown activation kind {kind!r}; choose from {ACTIVATION_KINDS}")
    return table[kind](**params)


def activation_from_config(cfg):
    cfg = dict(cfg)
    kind = cfg.pop("kind")
    return make_activation(kind, **cfg)


def activate(activation, z):
    """Apply an activation to a single complex value."""
    s, r = activation.apply(np.float64(z.real), np.float64(z.imag))
    return complex(s, r)


def activate_derivative(activation, pre_activation, channel="real", output_nonzero=True):
    """Per-channel derivative at a scalar pre-activation.

    Split kinds differentiate the real nonlinearity at ``pre_activation``
    (``channel`` picks sigma_real' or sigma_imag'); gated kinds return the
    0/1 indicator given by ``output_nonzero``.
    """
    if channel not in ("real", "imag"):
        raise ValueError("channel must be 'real' or 'imag'")
    return activation.channel_derivative(pre_activation, channel, output_nonzero)
