"""Reference solutions used to measure errors.

* closed forms for the harmonic oscillator (flow and exact discrete
  Lagrangian, the latter in extended precision);
* a classical RK4 integrator for q'' = f(q), optionally accumulating the
  action integral;
* ``exact_Ld_oracle``: the exact discrete Lagrangian of any system by
  shooting plus Richardson-extrapolated quadrature.
"""
import math

import mpmath
import numpy as np

from ..errors import OracleError, UsageError
from ..jets import Dual

_DPS = 40


def sho_flow(q, p, t):
    """Exact flow of H = (p^2 + q^2)/2."""
    c, s = math.cos(t), math.sin(t)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return c * q + s * p, -s * q + c * p


def sho_exact_Ld(q0, q1, h):
    """((q0^2 + q1^2) cos h - 2 q0 q1) / (2 sin h), summed over components.

    Evaluated with 40 significant digits: for q1 close to q0 the numerator
    cancels to O(h^2) of its terms.
    """
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    with mpmath.workdps(_DPS):
        h = mpmath.mpf(float(h))
        total = mpmath.mpf(0)
        for a, b in zip(q0, q1):
            a, b = mpmath.mpf(float(a)), mpmath.mpf(float(b))
            total += ((a * a + b * b) * mpmath.cos(h) - 2 * a * b) / (2 * mpmath.sin(h))
        return float(total)


def _rk4(system, q, v, h, steps, action):
    dt = h / steps
    f = system.force
    increments = []
    L = system.lagrangian
    for _ in range(steps):
        k1q, k1v = v, f(q)
        q2, v2 = q + 0.5 * dt * k1q, v + 0.5 * dt * k1v
        k2q, k2v = v2, f(q2)
        q3, v3 = q + 0.5 * dt * k2q, v + 0.5 * dt * k2v
        k3q, k3v = v3, f(q3)
        q4, v4 = q + dt * k3q, v + dt * k3v
        k4q, k4v = v4, f(q4)
        if action:
            increments.append(dt / 6.0 * (L(q, v) + 2.0 * L(q2, v2) + 2.0 * L(q3, v3) + L(q4, v4)))
        q = q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return q, v, (math.fsum(increments) if action else None)


def rk4_flow(system, q, v, t, steps):
    """(q(t), q'(t)) of q'' = f(q) by ``steps`` classical RK4 steps."""
    if steps < 1:
        raise UsageError("steps must be >= 1")
    q = np.atleast_1d(np.asarray(q, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    qt, vt, _ = _rk4(system, q, v, t, steps, action=False)
    return qt, vt


def rk4_action(system, q, v, t, steps):
    """(q(t), q'(t), integral of L) along the RK4 solution.

    The action is integrated as an extra ODE component, so it carries the
    same fourth-order accuracy as the trajectory.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return _rk4(system, q, v, t, steps, action=True)


def reference_flow(system, q, p, t, steps=None):
    """Phase point (q, p) at time t from a fine RK4 run (M^-1 p -> v)."""
    steps = steps or max(1000, int(math.ceil(abs(t) / 1e-3)))
    qt, vt = rk4_flow(system, q, system.velocity(p), t, steps)
    return qt, system.momentum(vt)


def shoot(system, q0, q1, h, steps, guess=None, tol=1e-12, max_iter=30):
    """Initial velocity v with q(h; q0, v) = q1 for the RK4 map.

    Newton iteration; the Jacobian dq(h)/dv is exact for the discrete map
    because the RK4 run is carried out on Dual numbers.
    """
    d = system.dim
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    v = (q1 - q0) / h if guess is None else np.array(guess, dtype=float)
    scale = max(1.0, float(np.max(np.abs(q1))))
    miss = np.inf
    for it in range(max_iter):
        qh, _, _ = _rk4(system, Dual.constant(q0, d), Dual.seed(v), h, steps, action=False)
        r = qh.value - q1
        miss = float(np.max(np.abs(r)))
        if not np.isfinite(miss):
            break
        if miss <= tol * scale:
            return v
        try:
            v = v - np.linalg.solve(qh.partials, r)
        except np.linalg.LinAlgError:
            break
    raise OracleError(f"shooting did not converge (miss {miss:.3e})", miss, max_iter)


def exact_Ld_oracle(system, q0, q1, h, steps=None, tol=1e-12, max_doublings=4):
    """Action of the Euler-Lagrange solution with q(0) = q0 and q(h) = q1.

    Shooting with RK4 at step <= h/1000, then Richardson extrapolation of
    the RK4 actions at N and 2N steps.  N is doubled until the
    extrapolation estimate is below ``tol * max(1, |L_d|)``.
    """
    if not h or not math.isfinite(h):
        raise UsageError("h must be nonzero and finite")
    N = steps or 1000
    v = None
    coarse = None
    for _ in range(max_doublings + 1):
        if coarse is None:
            v = shoot(system, q0, q1, h, N, guess=v)
            coarse = rk4_action(system, q0, v, h, N)[2]
        v = shoot(system, q0, q1, h, 2 * N, guess=v)
        fine = rk4_action(system, q0, v, h, 2 * N)[2]
        value = fine + (fine - coarse) / 15.0
        estimate = abs(fine - coarse) / 15.0
        if estimate <= tol * max(1.0, abs(value)):
            return value
        N, coarse = 2 * N, fine
    raise OracleError(f"quadrature did not reach {tol:g} (estimate {estimate:.3e})", estimate)
