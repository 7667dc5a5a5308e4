"""Separable mechanical systems L(q, v) = 1/2 v.M.v - V(q).

A system is defined by a constant mass matrix and a symbolic potential.  The
force f(q) = -M^{-1} grad V(q) is derived symbolically, then both V and f are
compiled into callables that accept float arrays, Duals and Jets, so the same
system feeds the Taylor recursion, the Newton Jacobians and plain energy
evaluation.
"""
from functools import lru_cache

import numpy as np
import sympy as sp

from . import jets
from .errors import CapabilityError, UsageError
from .jets import Dual, Jet

_MODULES = [{"sin": jets.sin, "cos": jets.cos, "exp": jets.exp}, "math"]

BUILTINS = ("sho", "pendulum", "duffing")


class MechanicalSystem:
    """Mass matrix + potential, with jet/Dual-evaluable V and f."""

    def __init__(self, potential, coordinates, mass=None, name="custom"):
        if isinstance(coordinates, (str, sp.Symbol)):
            coordinates = [coordinates]
        coords = [sp.Symbol(c) if isinstance(c, str) else c for c in coordinates]
        if not coords:
            raise UsageError("need at least one coordinate")
        dim = len(coords)
        mass = np.eye(dim) if mass is None else np.atleast_2d(np.asarray(mass, dtype=float))
        if mass.shape != (dim, dim):
            raise UsageError(f"mass matrix must be {dim}x{dim}, got {mass.shape}")
        if not np.allclose(mass, mass.T, rtol=0, atol=1e-14 * np.abs(mass).max()):
            raise UsageError("mass matrix must be symmetric")
        try:
            np.linalg.cholesky(mass)
        except np.linalg.LinAlgError:
            raise UsageError("mass matrix must be positive definite") from None

        V = sp.sympify(potential)
        unknown = V.free_symbols - set(coords)
        if unknown:
            raise UsageError(f"potential has unbound symbols {sorted(map(str, unknown))}")

        self.name = name
        self.dim = dim
        self.coordinates = tuple(coords)
        self.mass = mass
        self.identity_mass = bool(np.array_equal(mass, np.eye(dim)))
        self.mass_inv = np.eye(dim) if self.identity_mass else np.linalg.inv(mass)
        self.potential_expr = V
        grad = [sp.diff(V, c) for c in coords]
        if self.identity_mass:
            f_exprs = [-g for g in grad]
        else:
            f_exprs = [-sum(float(self.mass_inv[i, j]) * grad[j] for j in range(dim))
                       for i in range(dim)]
        self.force_exprs = tuple(f_exprs)
        self._V = sp.lambdify(coords, V, modules=_MODULES)
        self._f = sp.lambdify(coords, f_exprs, modules=_MODULES)

    def __repr__(self):
        return f"MechanicalSystem({self.name!r}, V={self.potential_expr})"

    def _components(self, x):
        if isinstance(x, Jet):
            return [x] if self.dim == 1 else [x.component(i) for i in range(self.dim)]
        if isinstance(x, Dual):
            if x.shape != (self.dim,):
                raise UsageError(f"expected state of shape ({self.dim},), got {x.shape}")
            return [x[i] for i in range(self.dim)]
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise UsageError(f"expected state of shape ({self.dim},), got {x.shape}")
        return list(x)

    def _call(self, fn, x):
        comps = self._components(x)
        try:
            return comps, fn(*comps)
        except (TypeError, AttributeError) as exc:
            if isinstance(x, (Jet, Dual)):
                raise CapabilityError(
                    f"{self.name}: potential cannot be evaluated on {type(x).__name__} "
                    f"arguments ({exc})") from exc
            raise

    def potential(self, x):
        comps, val = self._call(self._V, x)
        if isinstance(x, (Jet, Dual)) and not isinstance(val, type(x)):
            val = comps[0] * 0.0 + val
        return val

    def force(self, x):
        """f(x) = -M^{-1} grad V(x), same container type as x."""
        comps, vals = self._call(self._f, x)
        if isinstance(x, Jet):
            vals = [v if isinstance(v, Jet) else comps[0] * 0.0 + v for v in vals]
            if self.dim == 1:
                return vals[0]
            return Jet(jets.concatenate([v.coeffs for v in vals], axis=1))
        if isinstance(x, Dual):
            return jets.stack([v if isinstance(v, Dual) else comps[0] * 0.0 + v for v in vals])
        return np.array(vals, dtype=float)

    def force_jacobian(self, q):
        """(f(q), df/dq) at a plain point, via Dual seeding."""
        fd = self.force(Dual.seed(np.asarray(q, dtype=float)))
        return fd.value, fd.partials

    def kinetic(self, v):
        v = np.asarray(v, dtype=float)
        return 0.5 * float(v @ self.mass @ v)

    def lagrangian(self, q, v):
        return self.kinetic(v) - float(self.potential(np.asarray(q, dtype=float)))

    def velocity(self, p):
        return self.mass_inv @ np.asarray(p, dtype=float)

    def momentum(self, v):
        return self.mass @ np.asarray(v, dtype=float)

    def hamiltonian(self, q, p):
        p = np.asarray(p, dtype=float)
        return 0.5 * float(p @ self.mass_inv @ p) + float(self.potential(np.asarray(q, dtype=float)))


@lru_cache(maxsize=None)
def builtin(name):
    """The example systems: ``sho``, ``pendulum`` (m = l = 1), ``duffing``."""
    q = sp.Symbol("q")
    if name == "sho":
        return MechanicalSystem(q ** 2 / 2, [q], name="sho")
    if name == "pendulum":
        # V(0) = 0 normalisation; the force -sin q does not see the constant
        return MechanicalSystem(1 - sp.cos(q), [q], name="pendulum")
    if name == "duffing":
        return MechanicalSystem(-q ** 2 / 2 + q ** 4 / 4, [q], name="duffing")
    raise UsageError(f"unknown system {name!r}; choose from {', '.join(BUILTINS)}")


def energy(system, state):
    """H(q, p) of a PhasePoint-like object."""
    q = np.atleast_1d(np.asarray(state.q, dtype=float))
    p = np.atleast_1d(np.asarray(state.p, dtype=float))
    if q.shape != (system.dim,) or p.shape != (system.dim,):
        raise UsageError("state dimension does not match the system")
    return system.hamiltonian(q, p)
