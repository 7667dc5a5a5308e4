"""Variational integrators from prolongation-collocation discrete Lagrangians.

The building blocks, bottom up:

* :mod:`pcvi.jets` -- truncated Taylor series and forward-mode duals
* :mod:`pcvi.hermite` -- two-point Hermite interpolation
* :mod:`pcvi.prolongation` -- Taylor coefficients of the local flow
* :mod:`pcvi.collocation` -- endpoint velocities of the collocation curve
* :mod:`pcvi.discrete_lagrangian` -- L_d by Euler-Maclaurin, and its gradients
* :mod:`pcvi.integrator` -- one-step maps and trajectories
* :mod:`pcvi.systems` -- mechanical systems and the builtin examples
* :mod:`pcvi.harness` -- experiment drivers and the command line
"""
from .collocation import CollocationSolution, residual
from .collocation import solve as collocation_solve
from .discrete_lagrangian import LdEvaluation, euler_maclaurin, eval_Ld, grad_Ld, lagrangian_jet
from .errors import CapabilityError, OracleError, PCVIError, SolverError, UsageError
from .hermite import HermiteData, PolynomialCurve, assemble, basis_eval, eval_deriv
from .integrator import (MethodConfig, PhasePoint, Trajectory, legendre_minus, legendre_plus,
                         run, step_gauss2, step_hem, step_midpoint)
from .jets import Dual, Jet, jet_add, jet_analytic, jet_derivative_value, jet_mul
from .prolongation import prolongation_values, solution_jet
from .systems import BUILTINS, MechanicalSystem, builtin, energy

__all__ = [
    "BUILTINS", "CapabilityError", "CollocationSolution", "Dual", "HermiteData", "Jet",
    "LdEvaluation", "MechanicalSystem", "MethodConfig", "OracleError", "PCVIError", "PhasePoint",
    "PolynomialCurve", "SolverError", "Trajectory", "UsageError", "assemble", "basis_eval",
    "builtin", "collocation_solve", "energy", "euler_maclaurin", "eval_Ld", "eval_deriv",
    "grad_Ld", "jet_add", "jet_analytic", "jet_derivative_value", "jet_mul", "lagrangian_jet",
    "legendre_minus", "legendre_plus", "prolongation_values", "residual", "run",
    "solution_jet", "step_gauss2", "step_hem", "step_midpoint",
]
