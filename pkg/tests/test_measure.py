import numpy as np
import pytest

from revhenon.errors import DomainError
from revhenon.maps import Family, MapInstance, Nonlinearity, Perturbation, sample_domain
from revhenon.measure import DensitySpec, density, transfer_residual, transfer_residual_array

F = Nonlinearity.quadratic_minus(1.0)


def qr1(p, q=(0.0,)):
    return MapInstance(Family.QR_EXAMPLE1, F, eps=Perturbation.separable(p, q))


@pytest.mark.parametrize("p,q", [([0, 0.05], [0.0]), ([0, 0, 0.05], [0, 0.02]), ([0.01, 0.03, 0, 0.01], [0, 0, -0.02])])
def test_separable_density_is_invariant(p, q):
    m = qr1(p, q)
    spec = DensitySpec.from_map(m)
    assert spec.is_positive()
    x, y, _ = sample_domain(m, 500, 1.5, rng=11)
    assert np.max(transfer_residual_array(m, spec, x, y)) <= 1e-12


def test_image_form_is_not_invariant():
    m = qr1([0, 0, 0.05])
    spec = DensitySpec.from_map(m, form="image")
    x, y, _ = sample_domain(m, 200, 1.5, rng=12)
    assert np.max(transfer_residual_array(m, spec, x, y)) > 1e-3


def test_non_separable_control_fails():
    # a symmetric xy term keeps the Jacobian at 1, x^2 y does not
    m = MapInstance(Family.QR_EXAMPLE1, F, eps=Perturbation.bivariate({(2, 1): 0.05}))
    spec = DensitySpec.from_map(m)
    x, y, _ = sample_domain(m, 200, 1.5, rng=13)
    assert np.median(transfer_residual_array(m, spec, x, y)) > 1e-3


def test_unperturbed_density_is_lebesgue():
    m = qr1([0.0])
    spec = DensitySpec.from_map(m)
    assert density(m, spec, (0.3, -0.4)) == 1.0
    assert transfer_residual(m, spec, (0.3, -0.4)) <= 1e-15


def test_density_value():
    spec = DensitySpec((0.1, 0.2))
    m = qr1([0, 0.1, 0.1])
    assert density(m, spec, (1.0, 2.0)) == pytest.approx(1.3 * 1.5)
    assert not DensitySpec((-2.0,)).is_positive()


def test_density_spec_validation():
    with pytest.raises(DomainError):
        DensitySpec((0.0,), form="other")
    with pytest.raises(DomainError):
        DensitySpec.from_map(MapInstance.henon(1.0))
