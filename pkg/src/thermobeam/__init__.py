"""Finite element simulator for a thermoelastic beam with mass diffusion.

P1 elements in space, implicit Euler in time, with built-in machinery to
verify discrete energy decay, fit exponential decay rates, evaluate stability
functionals and run grid-refinement error studies.
"""

from .config import RunConfig, load_config, parse_config, preset, serialize_config
from .convergence import RefinementStudy, composite_error, run_study
from .energy import (
    DecayFit,
    EnergyRecord,
    EnergySeries,
    LyapunovConfig,
    beta0,
    check_monotone,
    continuous_energy,
    decay_plateau,
    discrete_energy,
    fit_decay_rate,
    lyapunov,
)
from .fem import (
    FemMatrices,
    Mesh1D,
    assemble_matrices,
    build_mesh,
    h1_seminorm_sq,
    interpolate,
    l2_norm_sq,
    pairing,
)
from .model import (
    InitialData,
    ModelParams,
    RawConstants,
    ValidationReport,
    Variant,
    derive_effective_params,
    require_valid,
    validate,
)
from .stepper import (
    BeamState,
    StepSystem,
    assemble_rhs,
    assemble_step_system,
    initial_state,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BeamState",
    "DecayFit",
    "EnergyRecord",
    "EnergySeries",
    "FemMatrices",
    "InitialData",
    "LyapunovConfig",
    "Mesh1D",
    "ModelParams",
    "RawConstants",
    "RefinementStudy",
    "RunConfig",
    "StepSystem",
    "ValidationReport",
    "Variant",
    "assemble_matrices",
    "assemble_rhs",
    "assemble_step_system",
    "beta0",
    "build_mesh",
    "check_monotone",
    "composite_error",
    "continuous_energy",
    "decay_plateau",
    "derive_effective_params",
    "discrete_energy",
    "fit_decay_rate",
    "h1_seminorm_sq",
    "initial_state",
    "interpolate",
    "l2_norm_sq",
    "load_config",
    "lyapunov",
    "pairing",
    "parse_config",
    "preset",
    "require_valid",
    "run",
    "run_study",
    "serialize_config",
    "step",
    "validate",
]
