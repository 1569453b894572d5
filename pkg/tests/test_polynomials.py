import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from revhenon.errors import DomainError
from revhenon.maps import Nonlinearity, Perturbation, PerturbationForm

coef = st.floats(-0.1, 0.1, allow_nan=False)


def fd(f, u, h=1e-6):
    return (f(u + h) - f(u - h)) / (2 * h)


def test_quadratic_forms():
    assert Nonlinearity.quadratic_minus(4.0)(2.0) == 0.0
    assert Nonlinearity.quadratic_plus(1.0)(3.0) == 8.0
    assert Nonlinearity.quadratic_plus(1.0).derivative(3.0) == 6.0
    assert Nonlinearity.quadratic_minus(2.0).with_M(3.0).M == 3.0


def test_generic_polynomial_has_no_parameter():
    F = Nonlinearity.polynomial([0, 0, 0, 1])
    assert not F.has_parameter
    with pytest.raises(DomainError):
        F.with_M(1.0)
    with pytest.raises(DomainError):
        Nonlinearity.polynomial([])


def test_evenness_check():
    assert Nonlinearity.quadratic_plus(2.0).is_even()
    assert not Nonlinearity.polynomial([0, 0, 0, 1]).is_even()


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=5), st.floats(-10, 10))
def test_nonlinearity_derivative_matches_fd(c, y):
    F = Nonlinearity.polynomial(c)
    scale = max(1.0, abs(F.derivative(y)), abs(F(y)) / max(abs(y), 1.0))
    assert abs(F.derivative(y) - fd(F, y)) <= 1e-8 * scale * max(1.0, abs(y)) ** 4


def test_zero_perturbation():
    z = Perturbation.zero()
    u, v = np.linspace(-1, 1, 5), np.linspace(2, 3, 5)
    assert np.all(z(u, v) == 0) and np.all(z.dx(u, v) == 0) and np.all(z.dy(u, v) == 0)
    assert z.is_zero and z.form is PerturbationForm.ZERO


def test_bivariate_evaluation_and_broadcasting():
    e = Perturbation.bivariate({(1, 1): 2.0, (2, 0): 3.0, (0, 1): -1.0})
    assert e(2.0, 5.0) == pytest.approx(2 * 10 + 3 * 4 - 5)
    assert e.dx(2.0, 5.0) == pytest.approx(2 * 5 + 6 * 2)
    assert e.dy(2.0, 5.0) == pytest.approx(2 * 2 - 1)
    out = e(np.array([1.0, 2.0]), 3.0)
    assert out.shape == (2,)


def test_separable_parts():
    e = Perturbation.separable([0, 0, 0.05], [0, 0, 0, 0.02])
    assert e(2.0, 1.0) == pytest.approx(0.05 * 4 + 0.02)
    assert np.allclose(e.first_component_derivative(), [0, 0.1])
    assert e.is_separable()
    assert not Perturbation.bivariate({(2, 1): 0.05}).is_separable()
    assert Perturbation.bivariate({(2, 0): 1.0, (0, 3): 1.0}).is_separable()


def test_as_bivariate_round_trip():
    e = Perturbation.separable([1, 2], [0, 0, 3])
    b = Perturbation.bivariate(e.as_bivariate())
    u, v = np.random.default_rng(0).uniform(-2, 2, (2, 20))
    assert np.allclose(b(u, v), e(u, v))


@given(coef, coef, coef, coef, st.floats(-10, 10), st.floats(-10, 10))
def test_partials_match_central_differences(a, b, c, d, u, v):
    e = Perturbation.bivariate({(1, 1): a, (2, 0): b, (0, 2): c, (2, 1): d})
    scale = max(1.0, abs(u), abs(v)) ** 3
    assert abs(e.dx(u, v) - fd(lambda t: e(t, v), u)) <= 1e-8 * scale
    assert abs(e.dy(u, v) - fd(lambda t: e(u, t), v)) <= 1e-8 * scale


def test_negative_exponent_rejected():
    with pytest.raises(DomainError):
        Perturbation.bivariate({(-1, 0): 1.0})
