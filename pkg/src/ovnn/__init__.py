"""Octonion-valued neural networks with asynchronous, possibly unbounded delays.

Octonion algebra, the decomposed real network model, stability and gain
criteria, a fixed-step delay integrator with controllers and monitors, and
an experiment command line.
"""

from .control import ControllerConfig, adaptive_update, fixed_controller
from .criteria import (
    CriterionReport,
    GainBounds,
    LambdaVec,
    check_mu_stability,
    check_unique_equilibrium,
    gain_lower_bounds,
    search_lambda,
    t_ell,
    tbar_ell,
)
from .equilibrium import companion_fixed_point
from .history import HistoryTrajectory, sample_history
from .monitors import detect_phases, lambda_inf_norm, monitor_p, monitor_phase2, window_sup_norm
from .network import (
    ActivationSpec,
    DelayProfile,
    NetworkSpec,
    RateFunction,
    effective_input,
    rhs_octonion,
    rhs_real,
    verify_derivative_bounds,
)
from .octonion import MUL_MATRICES, Octonion, mul_matrix, oct_add, oct_mul, oct_mul_matrix_form, oct_norm, oct_scale
from .simulate import DivergenceError, SimConfig, SimResult, integrate

__version__ = "0.1.0"

__all__ = [
    "ActivationSpec",
    "ControllerConfig",
    "CriterionReport",
    "DelayProfile",
    "DivergenceError",
    "GainBounds",
    "HistoryTrajectory",
    "LambdaVec",
    "MUL_MATRICES",
    "NetworkSpec",
    "Octonion",
    "RateFunction",
    "SimConfig",
    "SimResult",
    "adaptive_update",
    "check_mu_stability",
    "check_unique_equilibrium",
    "companion_fixed_point",
    "detect_phases",
    "effective_input",
    "fixed_controller",
    "gain_lower_bounds",
    "integrate",
    "lambda_inf_norm",
    "monitor_p",
    "monitor_phase2",
    "mul_matrix",
    "oct_add",
    "oct_mul",
    "oct_mul_matrix_form",
    "oct_norm",
    "oct_scale",
    "rhs_octonion",
    "rhs_real",
    "sample_history",
    "search_lambda",
    "t_ell",
    "tbar_ell",
    "verify_derivative_bounds",
    "window_sup_norm",
]
