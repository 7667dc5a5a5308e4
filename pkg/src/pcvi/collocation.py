"""Prolongation-collocation: find endpoint velocities (v0, v1).

Given (q0, q1, h), the endpoint data of the Hermite curve are
A0 = [q0, v0, P_2(q0, v0), ..., P_{n-1}(q0, v0)] and likewise at t = h, where
P_j are prolongation values.  Conditions of order < n then hold by
construction and only the order-n conditions

    q_d^(n)(0) = P_n(q0, v0),    q_d^(n)(h) = P_n(q1, v1)

remain: 2*dim equations in the 2*dim unknowns (v0, v1), solved by Newton
with an exact Jacobian from Dual seeding.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, UsageError
from .hermite import HermiteData, PolynomialCurve, assemble
from .jets import Dual, stack, value_of
from .prolongation import jet_order, solution_jet


@dataclass
class SegmentEvaluation:
    """Everything computed for one (q0, q1, v0, v1) on a step."""

    n: int
    h: float
    jet0: object
    jet1: object
    data: HermiteData
    curve: PolynomialCurve
    residual: object  # raw order-n defects, shape (2, dim)
    scaled_residual: object  # residual * h**n / n!

    @property
    def seeded(self):
        return isinstance(self.residual, Dual)


def _vec(x, dim):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (dim,):
        raise UsageError(f"expected a vector of length {dim}, got shape {x.shape}")
    return x


def evaluate_segment(system, n, h, q0, q1, v0, v1, seeded=False):
    """Build the collocation curve for given endpoint velocities.

    With ``seeded=True`` all quantities carry partials with respect to the
    stacked variables (q0, q1, v0, v1), in that order.
    """
    if n < 2:
        raise UsageError(f"collocation needs n >= 2, got {n}")
    d = system.dim
    if seeded:
        nseeds = 4 * d
        q0 = Dual.seed(q0, 0, nseeds)
        q1 = Dual.seed(q1, d, nseeds)
        v0 = Dual.seed(v0, 2 * d, nseeds)
        v1 = Dual.seed(v1, 3 * d, nseeds)
    order = jet_order(n)
    jet0 = solution_jet(system, q0, v0, order)
    jet1 = solution_jet(system, q1, v1, order)
    data = HermiteData(n, h,
                       tuple(jet0.derivative_value(j) for j in range(n)),
                       tuple(jet1.derivative_value(j) for j in range(n)))
    curve = assemble(data)
    r0 = curve.eval_deriv(0.0, n) - jet0.derivative_value(n)
    r1 = curve.eval_deriv(h, n) - jet1.derivative_value(n)
    res = stack([r0, r1])
    return SegmentEvaluation(n, h, jet0, jet1, data, curve, res,
                             res * (h ** n / math.factorial(n)))


def residual(system, n, h, q0, q1, v0, v1):
    """Order-n collocation defects (r0, r1) at t = 0 and t = h."""
    d = system.dim
    ev = evaluate_segment(system, n, h, _vec(q0, d), _vec(q1, d), _vec(v0, d), _vec(v1, d))
    return ev.residual[0], ev.residual[1]


@dataclass
class CollocationSolution:
    v0: np.ndarray
    v1: np.ndarray
    data: HermiteData
    curve: PolynomialCurve
    iterations: int
    residual_norm: float
    evaluation: SegmentEvaluation = field(repr=False)


def default_tolerance(q0, q1):
    return 1e-12 * max(1.0, float(np.max(np.abs(q0))), float(np.max(np.abs(q1))))


def solve(system, n, h, q0, q1, guess=None, tol=None, max_iter=25):
    """Newton solve of the collocation conditions for (v0, v1).

    ``guess`` is an optional (v0, v1) pair; the default is the divided
    difference (q1 - q0)/h for both.  Convergence is declared when the
    scaled residual max-norm drops below ``tol``.
    """
    if not h:
        raise UsageError("step h must be nonzero")
    d = system.dim
    q0, q1 = _vec(q0, d), _vec(q1, d)
    if guess is None:
        v0 = v1 = (q1 - q0) / h
    else:
        v0, v1 = _vec(guess[0], d), _vec(guess[1], d)
    tol = default_tolerance(q0, q1) if tol is None else tol
    res_norm = np.inf
    for it in range(max_iter + 1):
        ev = evaluate_segment(system, n, h, q0, q1, v0, v1, seeded=True)
        R = ev.scaled_residual
        rv = R.value.reshape(-1)
        res_norm = float(np.max(np.abs(rv)))
        if not np.isfinite(res_norm):
            raise SolverError("collocation residual is not finite", res_norm, it)
        if res_norm < tol:
            data = HermiteData(n, h, tuple(value_of(a) for a in ev.data.A0),
                               tuple(value_of(a) for a in ev.data.A1))
            curve = PolynomialCurve(n, h, value_of(ev.curve.coeffs))
            return CollocationSolution(v0, v1, data, curve, it, res_norm, ev)
        if it == max_iter:
            break
        J = R.partials.reshape(2 * d, 4 * d)[:, 2 * d:]
        try:
            delta = np.linalg.solve(J, -rv)
        except np.linalg.LinAlgError:
            raise SolverError("singular collocation Jacobian", res_norm, it) from None
        v0 = v0 + delta[:d]
        v1 = v1 + delta[d:]
    raise SolverError(f"collocation did not converge in {max_iter} iterations "
                      f"(residual {res_norm:.3e})", res_norm, max_iter)
