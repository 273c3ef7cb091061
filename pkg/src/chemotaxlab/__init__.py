"""Numerical laboratory for a parabolic-elliptic chemotaxis system with
time- and space-dependent local and nonlocal logistic sources."""

from .coefficients import CoefficientTerm, CoefficientTriple, Horizon
from .elliptic import Field, Grid, gradient, solve_A_inverse
from .envelopes import (BoundedTimeFunction, LVCoefficients, integrate_envelope,
                        integrate_logistic, integrate_lv, logistic_entire_solution, lv_box)
from .entire import (homogeneous_entire, periodic_fixed_point, pullback_entire,
                     stability_experiment, steady_state)
from .hypotheses import (HypothesisReport, Params, build_report, check_H2, check_H2_prime,
                         check_time_average_condition, compute_L1_L2, compute_M,
                         compute_r1_r2, stability_margin_heterogeneous,
                         stability_margin_homogeneous)
from .pde import SimState, StepController, Trajectory, detect_blowup, integrate, quadrature

__version__ = "0.1.0"

__all__ = [
    "BoundedTimeFunction", "CoefficientTerm", "CoefficientTriple", "Field", "Grid",
    "Horizon", "HypothesisReport", "LVCoefficients", "Params", "SimState",
    "StepController", "Trajectory", "build_report", "check_H2", "check_H2_prime",
    "check_time_average_condition", "compute_L1_L2", "compute_M", "compute_r1_r2",
    "detect_blowup", "gradient", "homogeneous_entire", "integrate", "integrate_envelope",
    "integrate_logistic", "integrate_lv", "logistic_entire_solution", "lv_box",
    "periodic_fixed_point", "pullback_entire", "quadrature", "solve_A_inverse",
    "stability_experiment", "stability_margin_heterogeneous",
    "stability_margin_homogeneous", "steady_state",
]
