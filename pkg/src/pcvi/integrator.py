"""One-step maps (q_k, p_k) -> (q_{k+1}, p_{k+1}) and trajectory runner.

``hem`` is the variational integrator generated by the prolongation-
collocation discrete Lagrangian:

    p_k = -D1 L_d(q_k, q_{k+1}),    p_{k+1} = D2 L_d(q_k, q_{k+1}).

Two solver layouts are offered.  ``nested`` runs Newton on q_{k+1} and a
full collocation solve inside every residual evaluation.  ``combined``
solves for (q_{k+1}, v0, v1) in one Newton loop.  Both use exact residual
partials from Dual seeding and finite differences for the rows that would
need second derivatives.

``gauss2`` (2-stage Gauss-Legendre) and ``midpoint`` are reference methods
applied to Hamilton's equations.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .collocation import default_tolerance
from .collocation import solve as collocation_solve
from .discrete_lagrangian import resolve_m, grad_Ld, linearize, linearize_at
from .errors import PCVIError, SolverError, UsageError
from .hermite import PolynomialCurve
from .jets import value_of
from .prolongation import jet_order, solution_jet

METHODS = ("hem", "gauss2", "midpoint")


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise UsageError(f"q and p must be vectors of equal length, got {q.shape}, {p.shape}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))

    def as_array(self):
        return np.concatenate([self.q, self.p])


@dataclass(frozen=True)
class MethodConfig:
    method: str = "hem"
    n: int = 3
    m: int = None
    tol: float = 1e-12
    max_iter: int = 50
    mode: str = "combined"

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.mode not in ("combined", "nested"):
            raise UsageError(f"unknown hem solver mode {self.mode!r}")
        if self.tol <= 0 or self.max_iter < 1:
            raise UsageError("tol must be positive and max_iter >= 1")
        if self.method == "hem":
            object.__setattr__(self, "m", resolve_m(self.n, self.m))

    @property
    def descriptor(self):
        if self.method == "hem":
            return f"hem({self.n},{self.m})"
        return self.method


@dataclass
class StepInfo:
    iterations: int
    residual: float
    v0: np.ndarray = None
    v1: np.ndarray = None
    curve: object = None


# hem -------------------------------------------------------------------------

def _fd_step(x):
    return 1.5e-8 * max(1.0, abs(x))


# Residual contraction below which a cached Jacobian is kept.
_CHORD_RATIO = 0.1
_MAX_HALVINGS = 4


def _predict(system, n, h, q0, v0):
    """Exact-flow Taylor polynomial through (q0, v0) evaluated at t = h."""
    jet = solution_jet(system, q0, v0, jet_order(n))
    c = jet.coeffs
    powers = h ** np.arange(c.shape[0])
    q1 = powers @ c
    v1 = (np.arange(1, c.shape[0]) * powers[:-1]) @ c[1:]
    return q1, v1


def _hem_combined(system, cfg, q0, p0, h, v_guess, cache):
    d = system.dim
    n, m = cfg.n, cfg.m
    v0 = system.velocity(p0) if v_guess is None else np.array(v_guess, dtype=float)
    q1, v1 = _predict(system, n, h, q0, v0)
    x_pred = np.concatenate([q1, v0, v1])
    key = (n, m, float(h))
    rows, offset = cache.get(key, (None, None)) if cache is not None else (None, None)
    # the predictor's error varies slowly along a trajectory, so last step's is reused
    x = x_pred if offset is None else x_pred + offset
    tol_p = cfg.tol * max(1.0, float(np.max(np.abs(p0))))

    def evaluate(x):
        lin = linearize_at(system, n, m, h, q0, x[:d], x[d:2 * d], x[2 * d:])
        D1, D2 = lin.gradients()
        return lin, D1, D2

    def d1_rows(x, D1):
        out = np.empty((d, 3 * d))
        for j in range(3 * d):
            dx = _fd_step(x[j])
            xp = x.copy()
            xp[j] += dx
            out[:, j] = (evaluate(xp)[1] - D1) / dx
        return out

    def merit_of(x, lin, D1):
        rnorm = float(np.max(np.abs(lin.scaled_residual)))
        gnorm = float(np.max(np.abs(p0 + D1)))
        return rnorm, gnorm, max(rnorm / default_tolerance(q0, x[:d]), gnorm / tol_p)

    lin, D1, D2 = evaluate(x)
    rnorm, gnorm, merit = merit_of(x, lin, D1)
    prev = np.inf
    converged = False
    for it in range(cfg.max_iter + 1):
        if not np.isfinite(merit):
            raise SolverError("hem step produced non-finite residuals", max(rnorm, gnorm), it)
        was_converged, converged = converged, merit < 1.0
        # one extra correction after convergence keeps the step map smooth
        # well below the tolerance, which finite-difference Jacobians of it need
        if was_converged:
            if cache is not None:
                cache[key] = (rows, x - x_pred)
            return x[:d], D2, StepInfo(it, max(rnorm, gnorm), x[d:2 * d], x[2 * d:]), lin
        if it == cfg.max_iter:
            break
        if rows is None or (not converged and merit > _CHORD_RATIO * prev):
            rows = d1_rows(x, D1)
        prev = merit
        # collocation rows are exact at every iterate; only the D1 rows may be stale
        J = np.vstack([np.hstack([lin.R_q[:, d:], lin.R_v]), rows])
        try:
            delta = np.linalg.solve(J, -np.concatenate([lin.scaled_residual, p0 + D1]))
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian in hem step", max(rnorm, gnorm), it) from None
        step = delta
        for _ in range(_MAX_HALVINGS + 1):
            x_try = x + step
            lin_try, D1_try, D2_try = evaluate(x_try)
            rn, gn, merit_try = merit_of(x_try, lin_try, D1_try)
            if converged or merit_try < merit:
                break
            step = 0.5 * step
        if not converged:
            # Broyden secant update keeps the cached rows close to the true
            # D1 Jacobian; a polishing step is too short for a clean secant
            rows = rows + np.outer(D1_try - D1 - rows @ step, step) / (step @ step)
        x, lin, D1, D2 = x_try, lin_try, D1_try, D2_try
        rnorm, gnorm, merit = rn, gn, merit_try
    raise SolverError(f"hem step did not converge in {cfg.max_iter} iterations",
                      max(rnorm, gnorm), cfg.max_iter)


def _hem_nested(system, cfg, q0, p0, h, v_guess, cache=None):
    d = system.dim
    n, m = cfg.n, cfg.m
    tol_p = cfg.tol * max(1.0, float(np.max(np.abs(p0))))
    q1 = q0 + h * system.velocity(p0)
    guess = None if v_guess is None else (v_guess, v_guess)

    def evaluate(q1, guess):
        sol = collocation_solve(system, n, h, q0, q1, guess=guess)
        lin = linearize(system, sol.evaluation, m, h)
        D1, D2 = lin.gradients()
        return sol, lin, D1, D2

    sol, lin, D1, D2 = evaluate(q1, guess)
    for it in range(cfg.max_iter + 1):
        G = p0 + D1
        gnorm = float(np.max(np.abs(G)))
        if not np.isfinite(gnorm):
            raise SolverError("hem step produced non-finite residuals", gnorm, it)
        if gnorm < tol_p:
            return q1, D2, StepInfo(it, gnorm, sol.v0, sol.v1), lin
        if it == cfg.max_iter:
            break
        warm = (sol.v0, sol.v1)
        J = np.zeros((d, d))
        for j in range(d):
            dq = _fd_step(q1[j])
            qp = q1.copy()
            qp[j] += dq
            J[:, j] = (evaluate(qp, warm)[2] - D1) / dq
        try:
            delta = np.linalg.solve(J, -G)
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian in hem step", gnorm, it) from None
        q1 = q1 + delta
        sol, lin, D1, D2 = evaluate(q1, warm)
    raise SolverError(f"hem step did not converge in {cfg.max_iter} iterations",
                      gnorm, cfg.max_iter)


def step_hem_detailed(system, cfg, state, h, v_guess=None, dense=False, cache=None):
    """hem step returning (PhasePoint, StepInfo).

    ``cache`` is an optional dict in which the combined solver keeps its
    finite-difference Jacobian rows and last predictor error between calls
    with the same (n, m, h).
    """
    if cfg.method != "hem":
        raise UsageError("step_hem needs a hem MethodConfig")
    if not h:
        raise UsageError("step size must be nonzero")
    solver = _hem_combined if cfg.mode == "combined" else _hem_nested
    q1, p1, info, lin = solver(system, cfg, state.q, state.p, h, v_guess, cache)
    if dense:
        info.curve = PolynomialCurve(cfg.n, h, value_of(lin.evaluation.curve.coeffs))
    return PhasePoint(q1, p1, state.t + h), info


def step_hem(system, cfg, state, h):
    return step_hem_detailed(system, cfg, state, h)[0]


def legendre_minus(system, cfg, q0, q1, h):
    """F^- L_d: (q0, q1) -> (q0, -D1 L_d)."""
    D1, _ = grad_Ld(system, cfg.n, cfg.m, h, q0, q1)
    return PhasePoint(q0, -D1)


def legendre_plus(system, cfg, q0, q1, h):
    """F^+ L_d: (q0, q1) -> (q1, D2 L_d)."""
    _, D2 = grad_Ld(system, cfg.n, cfg.m, h, q0, q1)
    return PhasePoint(q1, D2)


# reference methods -----------------------------------------------------------

_S3 = math.sqrt(3.0)
GAUSS2_A = np.array([[0.25, 0.25 - _S3 / 6.0], [0.25 + _S3 / 6.0, 0.25]])
GAUSS2_B = np.array([0.5, 0.5])
GAUSS2_C = np.array([0.5 - _S3 / 6.0, 0.5 + _S3 / 6.0])


def hamiltonian_field(system, y):
    """(dq/dt, dp/dt) = (M^-1 p, -grad V(q)) and its Jacobian."""
    d = system.dim
    q, p = y[:d], y[d:]
    f, df = system.force_jacobian(q)
    F = np.concatenate([system.mass_inv @ p, system.mass @ f])
    J = np.zeros((2 * d, 2 * d))
    J[:d, d:] = system.mass_inv
    J[d:, :d] = system.mass @ df
    return F, J


def step_gauss2_detailed(system, state, h, tol=1e-12, max_iter=50):
    """2-stage Gauss-Legendre step returning (PhasePoint, StepInfo)."""
    y = state.as_array()
    N = y.size
    Z = np.zeros((2, N))
    scale = max(1.0, float(np.max(np.abs(y))))
    for it in range(max_iter + 1):
        F0, J0 = hamiltonian_field(system, y + Z[0])
        F1, J1 = hamiltonian_field(system, y + Z[1])
        F = np.stack([F0, F1])
        G = (Z - h * GAUSS2_A @ F).reshape(-1)
        if it == max_iter:
            break
        Jac = np.eye(2 * N)
        for i in range(2):
            for j, Jj in enumerate((J0, J1)):
                Jac[i * N:(i + 1) * N, j * N:(j + 1) * N] -= h * GAUSS2_A[i, j] * Jj
        try:
            delta = np.linalg.solve(Jac, -G)
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian in gauss2 stage solve", None, it) from None
        Z = Z + delta.reshape(2, N)
        if float(np.max(np.abs(delta))) <= tol * scale:
            F = np.stack([hamiltonian_field(system, y + Z[i])[0] for i in range(2)])
            y1 = y + h * GAUSS2_B @ F
            d = system.dim
            return PhasePoint(y1[:d], y1[d:], state.t + h), StepInfo(it + 1, float(np.max(np.abs(delta))))
    raise SolverError(f"gauss2 stage solve did not converge in {max_iter} iterations",
                      float(np.max(np.abs(G))), max_iter)


def step_midpoint_detailed(system, state, h, tol=1e-12, max_iter=50):
    """Implicit midpoint step returning (PhasePoint, StepInfo)."""
    y0 = state.as_array()
    N = y0.size
    d = system.dim
    F, _ = hamiltonian_field(system, y0)
    y1 = y0 + h * F
    scale = max(1.0, float(np.max(np.abs(y0))))
    for it in range(max_iter):
        F, J = hamiltonian_field(system, 0.5 * (y0 + y1))
        G = y1 - y0 - h * F
        try:
            delta = np.linalg.solve(np.eye(N) - 0.5 * h * J, -G)
        except np.linalg.LinAlgError:
            raise SolverError("singular Jacobian in midpoint solve", None, it) from None
        y1 = y1 + delta
        if float(np.max(np.abs(delta))) <= tol * scale:
            return PhasePoint(y1[:d], y1[d:], state.t + h), StepInfo(it + 1, float(np.max(np.abs(delta))))
    raise SolverError(f"midpoint solve did not converge in {max_iter} iterations",
                      float(np.max(np.abs(G))), max_iter)


def step_gauss2(system, state, h, tol=1e-12, max_iter=50):
    return step_gauss2_detailed(system, state, h, tol, max_iter)[0]


def step_midpoint(system, state, h, tol=1e-12, max_iter=50):
    return step_midpoint_detailed(system, state, h, tol, max_iter)[0]


# trajectories ----------------------------------------------------------------

@dataclass
class Trajectory:
    method: str
    h: float
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    newton_iters: np.ndarray
    residuals: np.ndarray
    v_defect: np.ndarray
    truncated: bool = False
    message: str = ""
    segments: list = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    @property
    def steps(self):
        return len(self.times) - 1

    def state(self, k):
        return PhasePoint(self.q[k], self.p[k], self.times[k])

    @property
    def final(self):
        return self.state(-1)

    def energy(self, system):
        return np.array([system.hamiltonian(q, p) for q, p in zip(self.q, self.p)])


def step(system, cfg, state, h, v_guess=None, dense=False, cache=None):
    """Dispatch one step of the configured method; returns (PhasePoint, StepInfo)."""
    if cfg.method == "hem":
        return step_hem_detailed(system, cfg, state, h, v_guess=v_guess, dense=dense, cache=cache)
    if cfg.method == "gauss2":
        return step_gauss2_detailed(system, state, h, cfg.tol, cfg.max_iter)
    return step_midpoint_detailed(system, state, h, cfg.tol, cfg.max_iter)


def run(system, cfg, initial, h, steps, dense=False):
    """Iterate ``steps`` steps from ``initial``.

    A failure on the first step raises; a later failure returns the
    trajectory so far with ``truncated=True``.
    """
    if steps < 1:
        raise UsageError("steps must be >= 1")
    if not h:
        raise UsageError("step size must be nonzero")
    if initial.q.shape != (system.dim,):
        raise UsageError("initial state does not match the system dimension")
    states = [initial]
    iters = [0]
    resid = [0.0]
    defect = [np.nan]
    segments = [] if dense and cfg.method == "hem" else None
    prev_v1 = None
    cache = {}
    truncated, message = False, ""
    state = initial
    for k in range(steps):
        try:
            state, info = step(system, cfg, state, h, v_guess=prev_v1, dense=dense, cache=cache)
        except PCVIError as exc:
            if k == 0:
                raise SolverError(f"{cfg.descriptor}: first step failed: {exc}",
                                  getattr(exc, "residual", None)) from exc
            truncated, message = True, f"step {k} failed at t={state.t}: {exc}"
            break
        if info.v0 is not None and prev_v1 is not None:
            defect[-1] = float(np.linalg.norm(info.v0 - prev_v1))
        prev_v1 = info.v1
        states.append(state)
        iters.append(info.iterations)
        resid.append(info.residual)
        defect.append(np.nan)
        if segments is not None:
            segments.append(info.curve)
    return Trajectory(
        method=cfg.descriptor,
        h=float(h),
        times=initial.t + h * np.arange(len(states)),
        q=np.array([s.q for s in states]),
        p=np.array([s.p for s in states]),
        newton_iters=np.array(iters),
        residuals=np.array(resid),
        v_defect=np.array(defect),
        truncated=truncated,
        message=message,
        segments=segments,
    )
