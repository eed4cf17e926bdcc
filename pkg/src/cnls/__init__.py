"""Conservative relaxation compact-difference solver for coupled NLS systems.

Fourth-order compact differences in space, staggered-in-time relaxation of
the nonlinear potentials, circulant-preconditioned Krylov solves per step,
and exact discrete mass/energy diagnostics on periodic boxes in 1-3
dimensions.
"""

from .mesh import Field, Mesh, RealField, TimeGrid, make_mesh, sample
from .operators import (
    compact_average,
    compact_average_inverse,
    compact_laplacian,
    inner,
    norm_h1,
    norm_inf,
    norm_l2,
    seminorm_h1,
)
from .linsolve import SolveReport, SolverConfig, SolverError, StepOperator, solve
from .stepper import RelaxState, SchemeParams, SourceHook, run
from .diagnostics import ErrorRecord, InvariantRecord, energy, mass, relaxation_mass
from .cases import CaseSpec, by_name
from .harness import StudyPlan, collision_run, conservation_run, convergence_study

__version__ = "0.1.0"

__all__ = [
    "Field",
    "Mesh",
    "RealField",
    "TimeGrid",
    "make_mesh",
    "sample",
    "compact_average",
    "compact_average_inverse",
    "compact_laplacian",
    "inner",
    "norm_h1",
    "norm_inf",
    "norm_l2",
    "seminorm_h1",
    "SolveReport",
    "SolverConfig",
    "SolverError",
    "StepOperator",
    "solve",
    "RelaxState",
    "SchemeParams",
    "SourceHook",
    "run",
    "ErrorRecord",
    "InvariantRecord",
    "energy",
    "mass",
    "relaxation_mass",
    "CaseSpec",
    "by_name",
    "StudyPlan",
    "collision_run",
    "conservation_run",
    "convergence_study",
]
