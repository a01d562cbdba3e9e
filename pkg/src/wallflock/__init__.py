"""Deterministic simulator and verdict harness for wall-confined
velocity-alignment flocks on the half-line and on bounded intervals."""

from .kernels import CommunicationKernel
from .potentials import (
    Geometry,
    WallDomainError,
    WallPotential,
    check_domain,
    geometry_curvature,
    geometry_force,
    geometry_potential,
    wall_distances,
    warn_if_overlapping,
)
from .dynamics import (
    FlockModel,
    FlockState,
    PhaseDerivative,
    acceleration,
    initial_condition,
    mean_force,
    momentum,
    rhs,
)
from .integrator import (
    IntegratorControl,
    StiffnessError,
    Trajectory,
    integrate,
    reference_rk4,
    step_embedded,
)
from .observables import (
    FIELDS,
    DiagnosticsRecord,
    diagnostics,
    diagnostics_table,
    dissipation_residual,
    initial_energy,
    read_diagnostics_csv,
    record_series,
    write_diagnostics_csv,
)
from .verification import (
    Claim,
    FitResult,
    IntervalDecayResult,
    SettlementResult,
    TheoremReport,
    Thresholds,
    check_alignment,
    check_interval_decay,
    check_no_collision,
    check_settlement,
    check_work_of_force,
    detect_escape,
    fit_exponential,
    verify_halfline,
    verify_interval,
)
from .config import (
    ConfigError,
    InitialConditions,
    RunConfig,
    initial_state_from_config,
    load_config,
    model_from_config,
    parse_config,
    serialize_config,
)

__all__ = [
    "CommunicationKernel",
    "Geometry",
    "WallDomainError",
    "WallPotential",
    "check_domain",
    "geometry_curvature",
    "geometry_force",
    "geometry_potential",
    "wall_distances",
    "warn_if_overlapping",
    "FlockModel",
    "FlockState",
    "PhaseDerivative",
    "acceleration",
    "initial_condition",
    "mean_force",
    "momentum",
    "rhs",
    "IntegratorControl",
    "StiffnessError",
    "Trajectory",
    "integrate",
    "reference_rk4",
    "step_embedded",
    "FIELDS",
    "DiagnosticsRecord",
    "diagnostics",
    "diagnostics_table",
    "dissipation_residual",
    "initial_energy",
    "read_diagnostics_csv",
    "record_series",
    "write_diagnostics_csv",
    "Claim",
    "FitResult",
    "IntervalDecayResult",
    "SettlementResult",
    "TheoremReport",
    "Thresholds",
    "check_alignment",
    "check_interval_decay",
    "check_no_collision",
    "check_settlement",
    "check_work_of_force",
    "detect_escape",
    "fit_exponential",
    "verify_halfline",
    "verify_interval",
    "ConfigError",
    "InitialConditions",
    "RunConfig",
    "initial_state_from_config",
    "load_config",
    "model_from_config",
    "parse_config",
    "serialize_config",
]

__version__ = "0.1.0"
