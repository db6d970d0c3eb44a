"""Critical points of double-well potentials via secular equations."""
from .errors import (
    ConvergenceError,
    DimensionError,
    DoubleWellError,
    EmptyInterval,
    InvariantViolation,
    NotPositiveDefinite,
    PoleEvaluation,
)
from .model import CriticalPoint, GeneralDwp, Kind, ReducedDwp, SolutionSet, eval_g, eval_grad, eval_hess
from .reduction import BackMap, reduce
from .solvers import Portrait, solve_global, solve_local_max, solve_local_nonglobal, solve_portrait

__all__ = [
    "BackMap",
    "ConvergenceError",
    "CriticalPoint",
    "DimensionError",
    "DoubleWellError",
    "EmptyInterval",
    "GeneralDwp",
    "InvariantViolation",
    "Kind",
    "NotPositiveDefinite",
    "PoleEvaluation",
    "Portrait",
    "ReducedDwp",
    "SolutionSet",
    "eval_g",
    "eval_grad",
    "eval_hess",
    "reduce",
    "solve_global",
    "solve_local_max",
    "solve_local_nonglobal",
    "solve_portrait",
]
