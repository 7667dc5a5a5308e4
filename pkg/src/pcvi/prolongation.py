"""Taylor coefficients of the Euler-Lagrange flow through a phase point.

For q'' = f(q), the solution through (q, v) has c_0 = q, c_1 = v and

    (k+1)(k+2) c_{k+2} = [f(q(.))]_k,

where [.]_k is the k-th Taylor coefficient.  Since [f(q(.))]_k only involves
c_0..c_k, the coefficients are produced one degree at a time.  The values
j! c_j are the prolonged right-hand sides imposed by collocation.
"""
import numpy as np

from .errors import CapabilityError, UsageError
from .jets import Dual, Jet, _dual, value_of


def jet_order(n):
    """Truncation order used for degree-(2n-1) collocation."""
    return max(n, 2 * (n // 2)) + 1


def _as_vector(x):
    if isinstance(x, Dual):
        return x.reshape(-1) if x.ndim == 0 else x
    return np.atleast_1d(np.asarray(x, dtype=float))


def solution_jet(system, q, v, order):
    """Jet of the exact local solution through (q, v), truncated at ``order``.

    ``q`` and ``v`` may be Duals; the returned jet then carries their partials.
    """
    if order < 2:
        raise UsageError(f"prolongation order must be >= 2, got {order}")
    q, v = _as_vector(q), _as_vector(v)
    if q.shape != (system.dim,) or v.shape != (system.dim,):
        raise UsageError("q and v must match the system dimension")
    f0 = system.force(q) * 0.5
    seeded = [x for x in (q, v, f0) if isinstance(x, Dual)]
    # coefficients are written in place; the partial jets below are views
    val = np.zeros((order + 1, system.dim))
    par = np.zeros((order + 1, system.dim, seeded[0].nseeds)) if seeded else None
    for k, c in enumerate((q, v, f0)):
        val[k] = value_of(c)
        if par is not None and isinstance(c, Dual):
            par[k] = c.partials
    coeffs = val if par is None else _dual(val, par)
    for k in range(1, order - 1):
        try:
            fk = system.force(Jet(coeffs[:k + 1])).coeffs[k]
        except CapabilityError as exc:
            raise CapabilityError(
                f"force of {system.name!r} is not jet-evaluable; "
                f"prolongation order {order} > 2 needs it") from exc
        scale = 1.0 / ((k + 1) * (k + 2))
        val[k + 2] = value_of(fk) * scale
        if par is not None and isinstance(fk, Dual):
            par[k + 2] = fk.partials * scale
    return Jet(coeffs)


def prolongation_values(system, q, v, order):
    """[q, q', q'', ..., q^(order)] at the point (derivative values, not coefficients)."""
    jet = solution_jet(system, q, v, order)
    return [jet.derivative_value(j) for j in range(order + 1)]
