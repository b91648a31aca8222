"""Continuous-time ant path-selection dynamics: simulation and analysis.

The state x holds per-path pheromone concentrations evolving under

    dx_i/dt = gamma * g(-alpha + beta * phi(x) * d_i) * x_i

where d_i is the reciprocal path length, phi is a saturation read off the
whole state (reciprocal sum or reciprocal max) and g shapes the response
(identity, tanh, or signum).  The package integrates these dynamics,
evaluates the identity/sum case in closed form, classifies equilibria,
fits convergence rates, and reproduces the canonical experiments.
"""

from .analysis import (
    ConvergenceReport,
    DecayFit,
    FitError,
    RankEntry,
    RateReport,
    VariantRanking,
    VerificationStatus,
    compare_variants,
    default_fit_window,
    fit_decay_rate,
    rate_report,
    verify_convergence,
)
from .closedform import (
    AsymptoticState,
    ClosedFormState,
    FFunction,
    OracleRangeError,
    asymptotic_state,
    exact_state,
    f_eval,
    f_inverse,
    f_prime,
    sample_asymptotic,
    sample_exact,
    sigma_coefficients,
)
from .config import ConfigError, RunConfig, load_config, parse_config, render_config
from .models import (
    DomainError,
    GKind,
    ModelSpec,
    NondifferentiablePointError,
    PathSystem,
    PhiKind,
    StateVector,
    UnsupportedDerivativeError,
    g_eval,
    g_prime,
    phi_eval,
    phi_grad,
    vector_field,
)
from .presets import (
    ExperimentPreset,
    PhaseGrid,
    PhasePreset,
    PresetResult,
    get_preset,
    phase_grid,
    preset_names,
    run_preset,
    spurious_equilibria_scan,
)
from .simulate import (
    IntegrationError,
    PositivityError,
    PositivityPolicy,
    Scheme,
    SumBoundsReport,
    Trajectory,
    check_sum_bounds,
    integrate,
    sum_envelope,
    trajectory_to_csv,
    write_trajectory_csv,
)
from .stability import (
    Equilibrium,
    EquilibriumReport,
    SolverError,
    StabilityLabel,
    classify,
    equilibrium_report,
    find_equilibria,
    jacobian,
    solve_scale,
    spectrum_at_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticState",
    "ClosedFormState",
    "ConfigError",
    "ConvergenceReport",
    "DecayFit",
    "DomainError",
    "Equilibrium",
    "EquilibriumReport",
    "ExperimentPreset",
    "FFunction",
    "FitError",
    "GKind",
    "IntegrationError",
    "ModelSpec",
    "NondifferentiablePointError",
    "OracleRangeError",
    "PathSystem",
    "PhaseGrid",
    "PhasePreset",
    "PhiKind",
    "PositivityError",
    "PositivityPolicy",
    "PresetResult",
    "RankEntry",
    "RateReport",
    "RunConfig",
    "Scheme",
    "SolverError",
    "StabilityLabel",
    "StateVector",
    "SumBoundsReport",
    "Trajectory",
    "UnsupportedDerivativeError",
    "VariantRanking",
    "VerificationStatus",
    "asymptotic_state",
    "check_sum_bounds",
    "classify",
    "compare_variants",
    "default_fit_window",
    "equilibrium_report",
    "exact_state",
    "f_eval",
    "f_inverse",
    "f_prime",
    "find_equilibria",
    "fit_decay_rate",
    "g_eval",
    "g_prime",
    "get_preset",
    "integrate",
    "jacobian",
    "load_config",
    "parse_config",
    "phase_grid",
    "phi_eval",
    "phi_grad",
    "preset_names",
    "rate_report",
    "render_config",
    "run_preset",
    "sample_asymptotic",
    "sample_exact",
    "sigma_coefficients",
    "solve_scale",
    "spectrum_at_equilibrium",
    "spurious_equilibria_scan",
    "sum_envelope",
    "trajectory_to_csv",
    "vector_field",
    "verify_convergence",
    "write_trajectory_csv",
]
