"""Catalog of reversible Henon-like maps and their Jacobians."""
from .core import (
    MapInstance,
    Point2,
    as_point,
    cross_form_factor,
    differential,
    differential_array,
    jacobian_analytic,
    jacobian_array,
    jacobian_fd,
    residual_array,
    sample_domain,
    step,
    step_array,
    step_inverse,
    step_many,
)
from .families import Family
from .polynomials import Nonlinearity, NonlinearityKind, Perturbation, PerturbationForm, ZERO
from .solver import DEFAULT_CONFIG, SolverConfig

__all__ = [
    "DEFAULT_CONFIG",
    "Family",
    "MapInstance",
    "Nonlinearity",
    "NonlinearityKind",
    "Perturbation",
    "PerturbationForm",
    "Point2",
    "SolverConfig",
    "ZERO",
    "as_point",
    "cross_form_factor",
    "differential",
    "differential_array",
    "jacobian_analytic",
    "jacobian_array",
    "jacobian_fd",
    "residual_array",
    "sample_domain",
    "step",
    "step_array",
    "step_inverse",
    "step_many",
]
