"""Quasi-Minnaert resonance of a high-contrast elastic ball.

Mode-by-mode solver for shear waves ``j_n(k r) T_n^m`` hitting a soft, light
unit-ball inclusion, with tools to measure boundary localization, surface
resonance and stress concentration of the resulting fields.
"""

from .analysis import (
    ScaledValue,
    ShellSpec,
    closed_form_norm_oracles,
    localization_ratios,
    resonance_ratios,
    shell_norm_sq,
    stress_energies,
)
from .design import delta_bound, design_bounds, index_bounds, regime_check
from .errors import (
    ConfigurationError,
    DomainError,
    NearSingularError,
    NumericalError,
    QMRError,
    ResolutionError,
    SingularityError,
    UnsupportedModeError,
)
from .media import BackgroundMedium, ContrastProfile, derive_parameters
from .solver import (
    IncidentSpec,
    assemble_mode_system,
    eval_field,
    solve_mode_asymptotic,
    solve_mode_exact,
    transmission_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundMedium",
    "ConfigurationError",
    "ContrastProfile",
    "DomainError",
    "IncidentSpec",
    "NearSingularError",
    "NumericalError",
    "QMRError",
    "ResolutionError",
    "ScaledValue",
    "ShellSpec",
    "SingularityError",
    "UnsupportedModeError",
    "assemble_mode_system",
    "closed_form_norm_oracles",
    "delta_bound",
    "derive_parameters",
    "design_bounds",
    "eval_field",
    "index_bounds",
    "localization_ratios",
    "regime_check",
    "resonance_ratios",
    "shell_norm_sq",
    "solve_mode_asymptotic",
    "solve_mode_exact",
    "stress_energies",
    "transmission_residual",
]
