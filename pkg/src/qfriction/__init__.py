"""Friction force on an atom moving parallel to an absorbing dielectric
surface: two-level-atom vs linear-oscillator model, with low-velocity
power-law extraction.  See README.md for units and the CLI."""

from .analysis import (
    ComparisonResult,
    ComparisonRow,
    FitResult,
    SweepPoint,
    SweepResult,
    SweepSpec,
    compare_models,
    fit_exponent,
    log_grid,
    run_sweep,
)
from .atom import AtomParams, alpha_imag, gamma_at_distance, line_profile, sigma_z
from .cli import ConfigError, RunConfig, format_config, main, parse_config, run
from .forces import (
    DEFAULT_QUADRATURE,
    FORCE_UNIT,
    SWEEP_QUADRATURE,
    ForceResult,
    ForceValue,
    Model,
    Scenario,
    default_scenario,
    osc_force_combined,
    osc_force_free,
    osc_force_source,
    tla_force_free,
    tla_force_ground,
    tla_force_source,
    tla_force_total,
)
from .material import (
    MaterialParams,
    PoleError,
    delta_imag,
    permittivity,
    surface_resonance,
    surface_response,
)
from .quadrature import (
    PeakedIntegrand,
    QuadratureError,
    QuadratureSpec,
    integrate_interval,
    integrate_semi_infinite,
    oracle_integrate,
)
from .reference import REFERENCE_KINDS, reference_force

__version__ = "0.1.0"

__all__ = [
    "AtomParams", "MaterialParams", "PoleError", "permittivity",
    "surface_response", "delta_imag", "surface_resonance", "alpha_imag",
    "line_profile", "sigma_z", "gamma_at_distance", "QuadratureSpec",
    "PeakedIntegrand", "QuadratureError", "integrate_interval",
    "integrate_semi_infinite", "oracle_integrate", "Model", "Scenario",
    "ForceValue", "ForceResult", "FORCE_UNIT", "DEFAULT_QUADRATURE",
    "SWEEP_QUADRATURE", "default_scenario", "tla_force_free",
    "tla_force_source", "tla_force_total", "tla_force_ground",
    "osc_force_free", "osc_force_source", "osc_force_combined",
    "reference_force", "REFERENCE_KINDS", "SweepSpec", "SweepPoint",
    "SweepResult", "FitResult", "ComparisonRow", "ComparisonResult",
    "log_grid", "run_sweep", "fit_exponent", "compare_models", "RunConfig",
    "ConfigError", "parse_config", "format_config", "run", "main",
    "__version__",
]
