"""Continuation, event detection and closed-form bifurcation data."""
from .closed_forms import (
    Hm1muFixedPoints,
    T2muFixedPoints,
    curve_F,
    curve_PF,
    curve_name,
    hm1mu_fixed_points,
    hm1mu_two_orbit,
    symmetric_period6_closed_form,
    symmetric_period6_ys,
    t2mu_discriminant,
    t2mu_fixed_points,
    t2mu_symmetric_fixed_points,
    trace_level_parameters,
    trace_polynomial,
    trace_polynomial_factored,
    x_of_M,
)
from .continuation import Branch, continue_branch
from .events import (
    BifurcationEvent,
    EventKind,
    bisect_event,
    count_nearby_orbits,
    detect_events,
    emitted_orbits,
    g_minus,
    g_plus,
    locate_fold,
    resonance_targets,
)

__all__ = [
    "BifurcationEvent",
    "Branch",
    "EventKind",
    "Hm1muFixedPoints",
    "T2muFixedPoints",
    "bisect_event",
    "continue_branch",
    "count_nearby_orbits",
    "curve_F",
    "curve_PF",
    "curve_name",
    "detect_events",
    "emitted_orbits",
    "g_minus",
    "g_plus",
    "hm1mu_fixed_points",
    "hm1mu_two_orbit",
    "locate_fold",
    "resonance_targets",
    "symmetric_period6_closed_form",
    "symmetric_period6_ys",
    "t2mu_discriminant",
    "t2mu_fixed_points",
    "t2mu_symmetric_fixed_points",
    "trace_level_parameters",
    "trace_polynomial",
    "trace_polynomial_factored",
    "x_of_M",
]
