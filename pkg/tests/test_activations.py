import math

import numpy as np
import pytest

from ftkit.activations import (
    ModReLU,
    PolarReLU,
    SplitSigmoid,
    SplitTanh,
    ZReLU,
    activate,
    activate_derivative,
    activation_from_config,
    make_activation,
)


def test_split_tanh_at_origin():
    assert activate(SplitTanh(), complex(0, 0)) == complex(0, 0)


def test_split_sigmoid_at_origin():
    assert activate(SplitSigmoid(), complex(0, 0)) == complex(0.5, 0.5)


def test_modrelu_shrinks_magnitude():
    # |z| = 1, so the output is (1 - 0.5) * z
    assert activate(ModReLU(bias=-0.5), complex(1, 0)) == complex(0.5, 0)


def test_zrelu_quadrant_gate():
    assert activate(ZReLU(), complex(1, 1)) == complex(1, 1)
    assert activate(ZReLU(), complex(-1, 1)) == complex(0, 0)


def test_prelu_dead_circle():
    act = PolarReLU(radius=0.3, theta_min=0.0, theta_max=math.pi / 2)
    # |z| ~ 0.1414 < 0.3 falls inside the dead circle
    assert activate(act, complex(0.1, 0.1)) == complex(0, 0)


def test_derivative_examples():
    assert activate_derivative(SplitTanh(), 0.0) == 1.0
    assert activate_derivative(SplitSigmoid(), 0.0) == 0.25
    assert activate_derivative(ZReLU(), 0.7, output_nonzero=False) == 0.0
    assert activate_derivative(ZReLU(), 0.7, output_nonzero=True) == 1.0


def test_derivative_rejects_unknown_channel():
    with pytest.raises(ValueError):
        activate_derivative(SplitTanh(), 0.0, channel="phase")


@pytest.mark.parametrize("act", [ZReLU(), PolarReLU(0.3, 0.0, math.pi / 2)])
def test_pass_or_zero_idempotent(act):
    rng = np.random.default_rng(11)
    for _ in range(200):
        z = complex(rng.normal(), rng.normal())
        once = activate(act, z)
        assert activate(act, once) == once


def test_modrelu_zero_bias_is_identity_off_origin():
    act = ModReLU(bias=0.0)
    rng = np.random.default_rng(5)
    for _ in range(200):
        z = complex(rng.normal(), rng.normal())
        out = activate(act, z)
        assert abs(out - z) < 1e-12 * max(1.0, abs(z))


def test_modrelu_origin_maps_to_zero():
    assert activate(ModReLU(bias=-0.5), complex(0, 0)) == complex(0, 0)
    assert activate(ModReLU(bias=0.5), complex(0, 0)) == complex(0, 0)


def test_prelu_exact_regions():
    act = PolarReLU(radius=0.3, theta_min=0.0, theta_max=math.pi / 2)
    rng = np.random.default_rng(23)
    for _ in range(1000):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        out = activate(act, z)
        inside_circle = abs(z) < 0.3
        in_sector = 0.0 <= math.atan2(z.imag, z.real) <= math.pi / 2
        if inside_circle or not in_sector:
            assert out == complex(0, 0)
        else:
            assert out == z  # identity, bit-exact, in the active region


def test_boundary_counts_as_active():
    act = PolarReLU(radius=0.5, theta_min=0.0, theta_max=math.pi / 2)
    assert activate(act, complex(0.5, 0.0)) == complex(0.5, 0.0)
    assert activate(ZReLU(), complex(0.4, 0.0)) == complex(0.4, 0.0)
    assert activate(ZReLU(), complex(0.0, 0.4)) == complex(0.0, 0.4)


def test_split_derivatives_match_finite_differences():
    rng = np.random.default_rng(41)
    h = 1e-6
    for act in (SplitTanh(), SplitSigmoid()):
        x = rng.uniform(-3, 3, size=1000)
        ds, dr = act.derivatives(x, x)
        for f_num, f_ana in ((ds, ds), (dr, dr)):
            plus, _ = act.apply(x + h, x + h)
            minus, _ = act.apply(x - h, x - h)
            numeric = (plus - minus) / (2 * h)
            rel = np.abs(numeric - f_ana) / np.maximum(np.abs(f_ana), 1e-12)
            assert np.max(rel) < 1e-7


def test_gated_derivatives_follow_gate():
    act = ModReLU(bias=-0.5)
    alpha = np.array([1.0, 0.1, 0.0])
    beta = np.array([0.0, 0.1, 0.0])
    ds, dr = act.derivatives(alpha, beta)
    # |z| = 1 active; |z| ~ 0.14 dead; origin with negative bias dead
    np.testing.assert_array_equal(ds, [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(dr, [1.0, 0.0, 0.0])


def test_prelu_validates_parameters():
    with pytest.raises(ValueError):
        PolarReLU(radius=-0.1)
    with pytest.raises(ValueError):
        PolarReLU(radius=0.3, theta_min=1.0, theta_max=0.5)
    with pytest.raises(ValueError):
        PolarReLU(radius=0.3, theta_min=-4.0, theta_max=0.5)


def test_make_activation_and_config_round_trip():
    for kind, params in [
        ("tanh", {}),
        ("sigmoid", {}),
        ("modrelu", {"bias": -0.3}),
        ("zrelu", {}),
        ("prelu", {"radius": 0.25, "theta_min": -0.5, "theta_max": 1.0}),
    ]:
        act = make_activation(kind, **params)
        clone = activation_from_config(act.config())
        assert clone.config() == act.config()
    with pytest.raises(ValueError):
        make_activation("relu6")
