"""Prolongation-collocation discrete Lagrangian and its gradients.

L_d(q0, q1, h) applies the endpoint Euler-Maclaurin rule with m correction
terms to t -> L(q_d(t), q_d'(t)).  Collocation makes the endpoint
derivatives of q_d up to order n equal to prolongation values, so the
L-jets at t = 0 and t = h are built from the prolongation jets through
(q0, v0) and (q1, v1); 2m <= n keeps every derivative used inside the
collocated range.

D1 L_d and D2 L_d come from the implicit function theorem applied to the
collocation residual R(q0, q1, v0, v1) = 0, with all partials from one
Dual-seeded evaluation.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import collocation
from .collocation import CollocationSolution, evaluate_segment
from .errors import CapabilityError, SolverError, UsageError
from .jets import Dual, Jet

BERNOULLI = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
}


def bernoulli_numbers(kmax):
    """B_0..B_kmax from sum_{j=0}^{m} C(m+1, j) B_j = 0 (B_1 = -1/2 convention)."""
    B = [Fraction(1)]
    for m in range(1, kmax + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B


def _bernoulli(k):
    if k in BERNOULLI:
        return BERNOULLI[k]
    return bernoulli_numbers(k)[k]


def _em_weights(m):
    return [float(_bernoulli(2 * l) / math.factorial(2 * l)) for l in range(1, m + 1)]


def _scalar(x):
    if isinstance(x, Dual):
        return x.reshape(()) if x.shape == (1,) else x
    x = np.asarray(x, dtype=float)
    return float(x.reshape(())) if x.size == 1 else x


def euler_maclaurin(endpoint_jets, h, m):
    """Endpoint Euler-Maclaurin rule for the integral over [0, h].

    ``endpoint_jets`` are the integrand's jets about t = 0 and t = h; they
    must reach order 2m - 1.
    """
    f0, f1 = endpoint_jets
    if m < 0:
        raise UsageError("number of correction terms m must be >= 0")
    need = 2 * m - 1
    if m and (f0.order < need or f1.order < need):
        raise CapabilityError(f"Euler-Maclaurin with m={m} needs integrand jets of order {need}")
    total = 0.5 * h * (f0.coeffs[0] + f1.coeffs[0])
    for l, w in enumerate(_em_weights(m), start=1):
        k = 2 * l - 1
        total = total - (w * h ** (2 * l)) * (f1.derivative_value(k) - f0.derivative_value(k))
    return _scalar(total)


def euler_maclaurin_composite(samples, theta, endpoint_jets, m):
    """Composite rule on N = len(samples) - 1 panels of width ``theta``.

    ``samples`` are f(a + k*theta); ``endpoint_jets`` the integrand jets at a
    and b = a + N*theta.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] < 2:
        raise UsageError("need at least two samples")
    f0, f1 = endpoint_jets
    need = 2 * m - 1
    if m and (f0.order < need or f1.order < need):
        raise CapabilityError(f"Euler-Maclaurin with m={m} needs integrand jets of order {need}")
    total = 0.5 * theta * (samples[0] + 2.0 * samples[1:-1].sum(axis=0) + samples[-1])
    for l, w in enumerate(_em_weights(m), start=1):
        k = 2 * l - 1
        total = total - (w * theta ** (2 * l)) * (f1.derivative_value(k) - f0.derivative_value(k))
    return _scalar(total)


def lagrangian_jet(system, q_jet):
    """Jet of t -> L(q(t), q'(t)); one order lower than ``q_jet``."""
    if q_jet.order < 1:
        raise CapabilityError("the Lagrangian jet needs a position jet of order >= 1")
    qdot = q_jet.derivative()
    mv = qdot if system.identity_mass else qdot @ system.mass
    kinetic = 0.5 * qdot.dot(mv)
    return kinetic - system.potential(q_jet.truncate(q_jet.order - 1))


def resolve_m(n, m):
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    m = n // 2 if m is None else m
    if not 0 <= m <= n // 2:
        raise UsageError(f"need 0 <= m <= floor(n/2) = {n // 2}, got m={m}")
    return m


def ld_from_segment(system, ev, m, h):
    """Euler-Maclaurin value of L on an evaluated segment (Dual if seeded)."""
    order = max(2 * m, 1)
    L0 = lagrangian_jet(system, ev.jet0.truncate(order))
    L1 = lagrangian_jet(system, ev.jet1.truncate(order))
    return euler_maclaurin((L0, L1), h, m)


@dataclass
class Linearization:
    """L_d, residual and their partials at one (q0, q1, v0, v1)."""

    value: float
    scaled_residual: np.ndarray  # (2*dim,)
    R_q: np.ndarray  # d R / d(q0, q1)
    R_v: np.ndarray  # d R / d(v0, v1)
    L_q: np.ndarray
    L_v: np.ndarray
    evaluation: object

    def gradients(self):
        """(D1, D2) by the implicit function theorem."""
        d = self.L_q.shape[0] // 2
        try:
            lam = np.linalg.solve(self.R_v.T, self.L_v)
        except np.linalg.LinAlgError:
            raise SolverError("singular collocation Jacobian in gradient solve") from None
        D = self.L_q - self.R_q.T @ lam
        return D[:d], D[d:]

    def velocity_sensitivity(self):
        """d(v0, v1)/d(q0, q1) along the collocation manifold."""
        return -np.linalg.solve(self.R_v, self.R_q)


def linearize(system, ev, m, h):
    if not ev.seeded:
        raise UsageError("linearize needs a seeded segment evaluation")
    d = system.dim
    val = ld_from_segment(system, ev, m, h)
    Rp = ev.scaled_residual.partials.reshape(2 * d, 4 * d)
    Lp = val.partials.reshape(4 * d)
    return Linearization(float(val.value), ev.scaled_residual.value.reshape(-1),
                         Rp[:, :2 * d], Rp[:, 2 * d:], Lp[:2 * d], Lp[2 * d:], ev)


def linearize_at(system, n, m, h, q0, q1, v0, v1):
    """Linearization at arbitrary (not necessarily collocated) velocities."""
    m = resolve_m(n, m)
    ev = evaluate_segment(system, n, h, q0, q1, v0, v1, seeded=True)
    return linearize(system, ev, m, h)


@dataclass
class LdEvaluation:
    value: float
    D1: np.ndarray
    D2: np.ndarray
    colloc: CollocationSolution
    n: int
    m: int
    h: float


def eval_Ld(system, n, m, h, q0, q1, gradients=False, guess=None, tol=None, max_iter=25):
    """Evaluate L_d(q0, q1, h); ``m=None`` selects floor(n/2)."""
    m = resolve_m(n, m)
    sol = collocation.solve(system, n, h, q0, q1, guess=guess, tol=tol, max_iter=max_iter)
    lin = linearize(system, sol.evaluation, m, h)
    D1 = D2 = None
    if gradients:
        D1, D2 = lin.gradients()
    return LdEvaluation(lin.value, D1, D2, sol, n, m, h)


def grad_Ld(system, n, m, h, q0, q1, guess=None, tol=None):
    ev = eval_Ld(system, n, m, h, q0, q1, gradients=True, guess=guess, tol=tol)
    return ev.D1, ev.D2
