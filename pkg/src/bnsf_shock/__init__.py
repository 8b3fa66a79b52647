"""Monotone viscous shock profiles for a bi-velocity compressible flow model.

Constructs small-amplitude traveling-wave (shock) profiles by shooting
along the unstable manifold of the left end state, reduces the profile
ODE to its slow-fast form, and verifies the quantitative estimates
(logistic tail law, derivative ratios, eps-uniform constants) numerically.
"""

from .gas import GasConstants, State, TransportModel, builtin_models
from .hugoniot import (
    ShockData,
    check_lax,
    make_shock,
    rh_residual,
    right_state,
    shock_speed,
    sigma_star,
)
from .profile_ode import (
    EndStateEigen,
    PhaseField,
    end_state_eigenstructure,
    make_field,
    rhs,
    rhs_jacobian,
)
from .reduction import (
    DerivativeReport,
    ReducedPoint,
    SlowFastPath,
    compute_A,
    critical_manifold,
    critical_point_scan,
    g_derivative_check,
    h_derivative_check,
    solve_theta,
    to_slow_fast,
)
from .shooting import Profile, ShootOptions, normalize_phase, reflect, shoot
from .verify import (
    EstimateReport,
    FieldTemplate,
    FitWindowError,
    SweepReport,
    sweep,
    verify_profile,
)

__version__ = "0.1.0"

__all__ = [
    "GasConstants",
    "State",
    "TransportModel",
    "builtin_models",
    "ShockData",
    "check_lax",
    "make_shock",
    "rh_residual",
    "right_state",
    "shock_speed",
    "sigma_star",
    "EndStateEigen",
    "PhaseField",
    "end_state_eigenstructure",
    "make_field",
    "rhs",
    "rhs_jacobian",
    "DerivativeReport",
    "ReducedPoint",
    "SlowFastPath",
    "compute_A",
    "critical_manifold",
    "critical_point_scan",
    "g_derivative_check",
    "h_derivative_check",
    "solve_theta",
    "to_slow_fast",
    "Profile",
    "ShootOptions",
    "normalize_phase",
    "reflect",
    "shoot",
    "EstimateReport",
    "FieldTemplate",
    "FitWindowError",
    "SweepReport",
    "sweep",
    "verify_profile",
]
