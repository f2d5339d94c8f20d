"""Flexible-transmitter neuron networks and their complex-domain trainer."""

from ftkit.activations import (
    ModReLU,
    PolarReLU,
    SplitSigmoid,
    SplitTanh,
    ZReLU,
    activate,
    activate_derivative,
    make_activation,
)
from ftkit.baselines import ElmanUnit, MPNeuronLayer, train_baseline
from ftkit.cbp import (
    Dataset,
    GradientAccumulator,
    SensitivityState,
    TrainConfig,
    TrainReport,
    cbp_gradient,
    compute_loss,
    finite_difference_gradient,
    train,
)
from ftkit.complexops import cadd, check_cauchy_riemann, cmul
from ftkit.data import (
    MixtureConfig,
    TimeSeries,
    confusion_accuracy,
    generate_mixture,
    load_csv,
    mse,
    normalize,
    denormalize,
    sliding_window,
)
from ftkit.network import FTLayer, FTNetwork

__version__ = "0.1.0"
