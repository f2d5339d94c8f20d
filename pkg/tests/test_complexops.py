import numpy as np
import pytest
from hypothesis import given, strategies as st

from ftkit.complexops import cadd, check_cauchy_riemann, cmul

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_cadd_identity():
    assert cadd(complex(1, 2), complex(0, 0)) == complex(1, 2)


def test_cadd_inverse():
    assert cadd(complex(1, 2), complex(-1, -2)) == complex(0, 0)


def test_cadd_hand_sum():
    assert cadd(complex(0.5, 1.5), complex(0.25, 0.25)) == complex(0.75, 1.75)


def test_cmul_identity():
    assert cmul(complex(3.5, -2.25), complex(1, 0)) == complex(3.5, -2.25)


def test_cmul_i_squared():
    assert cmul(complex(0, 1), complex(0, 1)) == complex(-1, 0)


def test_cmul_hand_product():
    # (1+i)(1-i) = 1 - i + i - i^2 = 2
    assert cmul(complex(1, 1), complex(1, -1)) == complex(2, 0)


@given(finite, finite, finite, finite)
def test_cmul_commutative(x1, y1, x2, y2):
    z1, z2 = complex(x1, y1), complex(x2, y2)
    assert cmul(z1, z2) == cmul(z2, z1)


def _unit(angle):
    return complex(np.cos(angle), np.sin(angle))


@given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_cmul_associative_on_unit_circle(a1, a2, a3):
    z1, z2, z3 = _unit(a1), _unit(a2), _unit(a3)
    left = cmul(cmul(z1, z2), z3)
    right = cmul(z1, cmul(z2, z3))
    assert abs(left - right) < 1e-12


@given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_cmul_distributes_over_cadd(a1, a2, a3):
    z1, z2, z3 = _unit(a1), _unit(a2), _unit(a3)
    left = cmul(z1, cadd(z2, z3))
    right = cadd(cmul(z1, z2), cmul(z1, z3))
    assert abs(left - right) < 1e-12


def test_cr_linear_function_holomorphic():
    c = complex(2, 3)
    assert check_cauchy_riemann(lambda z: cmul(c, z), complex(0.4, -0.7), 1e-5, 1e-6)


def test_cr_square_function_holomorphic():
    assert check_cauchy_riemann(lambda z: cmul(z, z), complex(1, 1), 1e-5, 1e-6)


def test_cr_conjugate_fails():
    # u_z1 = 1 but v_z2 = -1 analytically
    assert not check_cauchy_riemann(lambda z: z.conjugate(), complex(0.3, 0.8), 1e-5, 1e-6)


def test_cr_rejects_bad_step_and_tolerance():
    f = lambda z: z
    with pytest.raises(ValueError):
        check_cauchy_riemann(f, 0j, h=0.0)
    with pytest.raises(ValueError):
        check_cauchy_riemann(f, 0j, h=-1e-5)
    with pytest.raises(ValueError):
        check_cauchy_riemann(f, 0j, tol=0.0)


def test_cr_affine_true_conjugate_false_at_random_points():
    rng = np.random.default_rng(7)
    c = complex(-1.25, 0.5)
    d = complex(0.75, -2.0)
    affine = lambda z: cadd(cmul(c, z), d)
    conj = lambda z: z.conjugate()
    for _ in range(100):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert check_cauchy_riemann(affine, z, 1e-5, 1e-6)
        assert not check_cauchy_riemann(conj, z, 1e-5, 1e-6)
