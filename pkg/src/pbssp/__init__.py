"""Boost in-expectation stochastic saddle-point solvers to high-probability guarantees."""

from .accounting import CallCounter
from .boost import (PbsspPlan, boost_constrained, boost_mogda, boost_saa, boost_saa_c,
                    pb_ssp_generic, plan_geometric, rde_baseline)
from .constants import ProblemConstants
from .core import (GapReport, PrimalDualPair, SspProblem, cc_regularize, eval_gap, eval_weak_gap,
                   linear_saddle, perturb)
from .domains import Box, Reals, Simplex
from .errors import (CapabilityError, ConvergenceError, DiagnosticError, DomainError,
                     InvariantError, PbsspError)
from .kernels import BACKEND
from .oracles import mogda_solve, saa_solve, solve_exact, speg_solve
from .robust import extract, function_gap_select, robust_gradient, robust_select

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Box", "CallCounter", "CapabilityError", "ConvergenceError", "DiagnosticError",
    "DomainError", "GapReport", "InvariantError", "PbsspError", "PbsspPlan", "PrimalDualPair",
    "ProblemConstants", "Reals", "Simplex", "SspProblem", "boost_constrained", "boost_mogda",
    "boost_saa", "boost_saa_c", "cc_regularize", "eval_gap", "eval_weak_gap", "extract",
    "function_gap_select", "linear_saddle", "mogda_solve", "pb_ssp_generic", "perturb",
    "plan_geometric", "rde_baseline", "robust_gradient", "robust_select", "saa_solve",
    "solve_exact", "speg_solve",
]
