"""Lawson-type exponential integrator with Rusanov stabilization for periodic KdV."""

from .spectral_core import (
    DimensionError,
    Field,
    Grid,
    InvalidFieldError,
    ParameterError,
    SymmetryError,
    finite_difference,
    inner_discrete,
    norm,
    project,
    propagate_airy,
    sobolev_norm,
    sup_norm,
    to_grid,
    to_spectrum,
)
from .scheme import (
    BlowUpError,
    CFLWarning,
    DefectReport,
    EvolveResult,
    SchemeParams,
    defect_study,
    estimate_rusanov_floor,
    evolve,
    lawson_rusanov_step,
    reference_evolve,
    truncation_defect,
)
from .problems import (
    ErrorReport,
    ReferenceTruth,
    SolitonParams,
    error_report,
    pulse_initial,
    pulse_problem,
    soliton_exact,
    soliton_problem,
)
from .harness import (
    ConvergenceTable,
    StabilityMap,
    cfl_sweep,
    convergence_study,
    fit_slope,
    identity_suite,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "Field",
    "Grid",
    "InvalidFieldError",
    "ParameterError",
    "SymmetryError",
    "finite_difference",
    "inner_discrete",
    "norm",
    "project",
    "propagate_airy",
    "sobolev_norm",
    "sup_norm",
    "to_grid",
    "to_spectrum",
    "BlowUpError",
    "CFLWarning",
    "DefectReport",
    "EvolveResult",
    "SchemeParams",
    "defect_study",
    "estimate_rusanov_floor",
    "evolve",
    "lawson_rusanov_step",
    "reference_evolve",
    "truncation_defect",
    "ErrorReport",
    "ReferenceTruth",
    "SolitonParams",
    "error_report",
    "pulse_initial",
    "pulse_problem",
    "soliton_exact",
    "soliton_problem",
    "ConvergenceTable",
    "StabilityMap",
    "cfl_sweep",
    "convergence_study",
    "fit_slope",
    "identity_suite",
]
