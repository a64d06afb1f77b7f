"""Cartesian-separable planar Hamiltonians with cubic invariants.

A catalog of 29 potential families (21 quantum, 8 classical), numerical
certification of every listed invariant through the invariance
conditions, classical conservation monitoring along trajectories, and
validated evaluation of the ODE-defined special functions the quantum
entries are built from.
"""

from . import catalog, detsolve, dynamics, implicit, phasecore, specfun
from .errors import CubintError
from .phasecore import (
    CoeffTensor,
    CorrectionFields,
    DerivStack,
    ParamSet,
    PhaseState,
    Potential1D,
    SeparablePotential,
    ThirdOrderIntegral,
    eval_f_polynomials,
    eval_integral_classical,
    poisson_bracket_residual,
)

__version__ = "0.1.0"

__all__ = [
    "catalog", "detsolve", "dynamics", "implicit", "phasecore", "specfun",
    "CubintError", "CoeffTensor", "CorrectionFields", "DerivStack",
    "ParamSet", "PhaseState", "Potential1D", "SeparablePotential",
    "ThirdOrderIntegral", "eval_f_polynomials", "eval_integral_classical",
    "poisson_bracket_residual", "__version__",
]
