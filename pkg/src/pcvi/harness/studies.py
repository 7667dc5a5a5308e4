"""Experiment drivers: convergence, variational order, energy, work-precision."""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .. import collocation
from ..discrete_lagrangian import eval_Ld, resolve_m
from ..errors import PCVIError, UsageError
from ..integrator import MethodConfig, PhasePoint, run
from ..prolongation import solution_jet
from ..systems import builtin
from . import oracles

DEFAULT_Q0 = {"sho": 1.0, "pendulum": 0.5, "duffing": 0.5}
DEFAULT_H_LIST = (0.2, 0.1, 0.05, 0.025)
NON_ASYMPTOTIC = 0.1  # max log-log fit residual before a fit is flagged


def _floats(x):
    if x is None:
        return None
    if isinstance(x, str):
        return tuple(float(t) for t in x.split(",") if t.strip())
    return tuple(float(t) for t in np.atleast_1d(x))


@dataclass
class ExperimentConfig:
    system: str = "sho"
    method: str = "hem"
    n: int = 3
    m: int = None
    q0: tuple = None
    p0: tuple = None
    h: float = None
    h_list: tuple = None
    steps: int = None
    t_end: float = None
    out: str = None
    plot: bool = False
    tol: float = 1e-12
    component: str = "phase"
    oracle: str = None
    mode: str = "combined"
    baseline: str = None

    def __post_init__(self):
        self.q0 = _floats(self.q0)
        self.p0 = _floats(self.p0)
        self.h_list = _floats(self.h_list)
        if self.component not in ("phase", "q", "p"):
            raise UsageError(f"component must be phase, q or p, got {self.component!r}")
        if self.h is not None and (self.h == 0 or not math.isfinite(self.h)):
            raise UsageError("h must be nonzero and finite")

    def system_obj(self):
        return builtin(self.system)

    def method_config(self, method=None):
        return MethodConfig(method or self.method, self.n, self.m, tol=self.tol, mode=self.mode)

    def initial(self):
        sysobj = self.system_obj()
        q0 = self.q0 if self.q0 is not None else (DEFAULT_Q0.get(self.system, 0.5),) * sysobj.dim
        p0 = self.p0 if self.p0 is not None else (0.0,) * sysobj.dim
        if len(q0) != sysobj.dim or len(p0) != sysobj.dim:
            raise UsageError(f"initial state must have {sysobj.dim} components")
        return PhasePoint(q0, p0)

    def slope_h_list(self):
        hs = self.h_list if self.h_list is not None else DEFAULT_H_LIST
        if len(hs) < 3:
            raise UsageError("a slope fit needs at least 3 step sizes")
        if any(b >= a for a, b in zip(hs, hs[1:])) or hs[-1] <= 0:
            raise UsageError("h-list must be positive and strictly decreasing")
        return hs

    def steps_for(self, h, default_t_end):
        if self.steps is not None:
            if self.steps < 1:
                raise UsageError("steps must be >= 1")
            return self.steps
        t_end = default_t_end if self.t_end is None else self.t_end
        steps = int(round(t_end / abs(h)))
        if steps < 1 or abs(steps * abs(h) - t_end) > 1e-9 * max(1.0, t_end):
            raise UsageError(f"t_end={t_end} is not a positive multiple of h={h}")
        return steps


def fit_slope(hs, errors):
    """Least-squares slope of log(error) against log(h) and the max residual."""
    x = np.log(np.asarray(hs, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(y - (slope * x + icpt))))
    return float(slope), resid


@dataclass
class ConvergenceReport:
    """Rows of (h, error) with a log-log slope fit.

    ``slope`` is None unless every run converged and every error is
    positive; ``non_asymptotic`` flags fits whose residual exceeds 0.1 in
    log space.
    """

    system: str
    method: str
    quantity: str
    hs: list
    errors: list
    failures: list = field(default_factory=list)
    slope: float = None
    fit_residual: float = None
    non_asymptotic: bool = False

    def __post_init__(self):
        ok = (not self.failures and len(self.hs) >= 2
              and all(e is not None and e > 0 and math.isfinite(e) for e in self.errors))
        if ok:
            self.slope, self.fit_residual = fit_slope(self.hs, self.errors)
            self.non_asymptotic = self.fit_residual > NON_ASYMPTOTIC

    @property
    def header(self):
        return ["h", self.quantity]

    @property
    def rows(self):
        return [[h, e] for h, e in zip(self.hs, self.errors)]

    def local_slopes(self):
        x, y = np.log(self.hs), np.log(self.errors)
        return list(np.diff(y) / np.diff(x))

    def summary(self):
        if self.slope is None:
            why = "; ".join(self.failures) or "non-positive errors"
            return f"{self.system} {self.method} {self.quantity}: slope unavailable ({why})"
        flag = "  [non-asymptotic fit]" if self.non_asymptotic else ""
        return f"{self.system} {self.method} {self.quantity}: slope={self.slope:.4f}{flag}"


# global error ---------------------------------------------------------------

def _error_norm(dq, dp, component):
    if component == "q":
        return float(np.linalg.norm(dq))
    if component == "p":
        return float(np.linalg.norm(dp))
    return float(np.linalg.norm(np.concatenate([dq, dp])))


_REFERENCE_CACHE = {}


def reference_state(cfg, T, h_min):
    """Exact state at T: closed form for sho, fine gauss2 run otherwise.

    The gauss2 runs take tens of seconds, so results are memoised per
    (system, initial state, T, h_min).
    """
    sysobj = cfg.system_obj()
    init = cfg.initial()
    if cfg.system == "sho":
        return oracles.sho_flow(init.q, init.p, T)
    key = (cfg.system, tuple(init.q), tuple(init.p), float(T), float(h_min))
    if key not in _REFERENCE_CACHE:
        steps = int(round(T / (h_min / 100.0)))
        traj = run(sysobj, MethodConfig("gauss2", tol=1e-14), init, T / steps, steps)
        _REFERENCE_CACHE[key] = (traj.q[-1], traj.p[-1])
    return _REFERENCE_CACHE[key]


def global_error_study(cfg, method=None):
    """Error at T = t_end (default 10) for each h of the h-list."""
    sysobj = cfg.system_obj()
    mcfg = cfg.method_config(method)
    hs = cfg.slope_h_list()
    T = 10.0 if cfg.t_end is None else cfg.t_end
    qT, pT = reference_state(cfg, T, hs[-1])
    errors, failures = [], []
    for h in hs:
        steps = cfg.steps_for(h, T)
        try:
            traj = run(sysobj, mcfg, cfg.initial(), h, steps)
        except PCVIError as exc:
            failures.append(f"h={h}: {exc}")
            errors.append(None)
            continue
        if traj.truncated:
            failures.append(f"h={h}: {traj.message}")
            errors.append(None)
            continue
        errors.append(_error_norm(traj.q[-1] - qT, traj.p[-1] - pT, cfg.component))
    quantity = {"phase": "global_error", "q": "position_error", "p": "momentum_error"}[cfg.component]
    return ConvergenceReport(cfg.system, mcfg.descriptor, quantity, list(hs), errors, failures)


# variational order ----------------------------------------------------------

def ldorder_study(cfg):
    """|L_d - L_d^E| along the exact trajectory from the initial state.

    For each h the pair (q0, q1) is the initial configuration and the
    exact configuration at time h.  ``oracle`` is ``analytic`` (sho only)
    or ``shooting``.
    """
    sysobj = cfg.system_obj()
    n = cfg.n
    m = resolve_m(n, cfg.m)
    oracle = cfg.oracle or ("analytic" if cfg.system == "sho" else "shooting")
    if oracle not in ("analytic", "shooting"):
        raise UsageError(f"unknown oracle {oracle!r}")
    if oracle == "analytic" and cfg.system != "sho":
        raise UsageError("the analytic oracle exists for sho only")
    init = cfg.initial()
    hs = cfg.slope_h_list()
    errors, failures = [], []
    for h in hs:
        if cfg.system == "sho":
            q1, _ = oracles.sho_flow(init.q, init.p, h)
        else:
            q1, _ = oracles.reference_flow(sysobj, init.q, init.p, h)
        try:
            exact = (oracles.sho_exact_Ld(init.q, q1, h) if oracle == "analytic"
                     else oracles.exact_Ld_oracle(sysobj, init.q, q1, h))
            approx = eval_Ld(sysobj, n, m, h, init.q, q1).value
        except PCVIError as exc:
            failures.append(f"h={h}: {exc}")
            errors.append(None)
            continue
        errors.append(abs(approx - exact))
    return ConvergenceReport(cfg.system, f"hem({n},{m})", "ld_error", list(hs), errors, failures)


# collocation accuracy with exact boundary data --------------------------------

def endpoint_rates(system, n, hs, q0, v0):
    """Endpoint errors of collocation driven by exact boundary positions.

    For each h the exact solution through (q0, v0) supplies q1 = q(h); the
    rows hold |v0_d - q'(0)|, |v1_d - q'(h)| and |q_d'''(0) - q'''(0)|.
    """
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    third = solution_jet(system, q0, v0, 3).derivative_value(3)
    rows = []
    for h in hs:
        q1, v1 = oracles.rk4_flow(system, q0, v0, h, max(1000, int(math.ceil(h / 1e-4))))
        sol = collocation.solve(system, n, h, q0, q1)
        d3 = sol.curve.eval_deriv(0.0, 3)
        rows.append((h,
                     float(np.max(np.abs(sol.v0 - v0))),
                     float(np.max(np.abs(sol.v1 - v1))),
                     float(np.max(np.abs(d3 - third)))))
    return rows


# energy ---------------------------------------------------------------------

@dataclass
class EnergyReport:
    system: str
    method: str
    h: float
    times: np.ndarray
    dH: np.ndarray
    max_abs: float
    drift_slope: float
    truncated: bool = False
    message: str = ""

    def summary(self):
        s = (f"{self.system} {self.method} h={self.h}: max|dH|={self.max_abs:.3e} "
             f"drift={self.drift_slope:.3e}")
        return s + (f"  [truncated: {self.message}]" if self.truncated else "")


def energy_study(cfg, method=None):
    """H(t) - H(0) along a long run (defaults h = 0.2, t_end = 1000)."""
    sysobj = cfg.system_obj()
    mcfg = cfg.method_config(method)
    h = 0.2 if cfg.h is None else cfg.h
    steps = cfg.steps_for(h, 1000.0)
    traj = run(sysobj, mcfg, cfg.initial(), h, steps)
    E = traj.energy(sysobj)
    dH = E - E[0]
    absdH = np.abs(dH)
    drift = float(np.polyfit(traj.times, absdH, 1)[0]) if len(absdH) > 1 else 0.0
    return EnergyReport(cfg.system, mcfg.descriptor, h, traj.times, dH,
                        float(absdH.max()), drift, traj.truncated, traj.message)


# work-precision ---------------------------------------------------------------

def default_baseline(system):
    return "midpoint" if system == "duffing" else "gauss2"


def work_precision(cfg):
    """(method, h, wall_time, global_error) for hem and a baseline."""
    sysobj = cfg.system_obj()
    hs = cfg.slope_h_list()
    T = 10.0 if cfg.t_end is None else cfg.t_end
    qT, pT = reference_state(cfg, T, hs[-1])
    methods = [cfg.method_config()]
    baseline = cfg.baseline or default_baseline(cfg.system)
    if baseline != cfg.method:
        methods.append(cfg.method_config(baseline))
    rows = []
    for mcfg in methods:
        for h in hs:
            start = time.perf_counter()
            traj = run(sysobj, mcfg, cfg.initial(), h, cfg.steps_for(h, T))
            wall = time.perf_counter() - start
            err = (float("nan") if traj.truncated else
                   _error_norm(traj.q[-1] - qT, traj.p[-1] - pT, cfg.component))
            rows.append((mcfg.descriptor, h, wall, err))
    return rows
