"""Two-point Hermite interpolation of degree 2n-1 on [0, h].

Curves are stored as monomial coefficients in the scaled variable u = t/h.
The basis polynomials are expanded once per n in exact rational arithmetic,
so assembling a curve from endpoint data is a single constant matrix
product.  That product is linear, which means HermiteData entries may be
:class:`~pcvi.jets.Dual` values and the assembled curve carries their
partials along.
"""
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import UsageError
from .jets import Dual, stack


class ExtrapolationWarning(UserWarning):
    """A curve was evaluated outside its interval [0, h]."""


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def basis_coefficients(n, j):
    """Monomial coefficients (in u) of H_{n,j}(t) / h**j, as exact Fractions."""
    if n < 1 or not 0 <= j < n:
        raise UsageError(f"need 0 <= j < n, got n={n}, j={j}")
    tail = [Fraction(math.comb(n + s - 1, s)) for s in range(n - j)]
    one_minus_u_n = [Fraction(math.comb(n, k) * (-1) ** k) for k in range(n + 1)]
    head = [Fraction(0)] * j + [Fraction(1, math.factorial(j))]
    poly = _poly_mul(_poly_mul(head, one_minus_u_n), tail)
    return tuple(poly + [Fraction(0)] * (2 * n - len(poly)))


def _reflect(poly):
    """Coefficients of p(1 - u) given those of p(u)."""
    out = [Fraction(0)] * len(poly)
    for k, c in enumerate(poly):
        if c:
            for i in range(k + 1):
                out[i] += c * math.comb(k, i) * (-1) ** i
    return out


@lru_cache(maxsize=None)
def _assembly_matrix(n):
    cols = []
    for j in range(n):
        cols.append(list(basis_coefficients(n, j)))
    for j in range(n):
        cols.append([(-1) ** j * c for c in _reflect(basis_coefficients(n, j))])
    mat = np.array([[float(c) for c in col] for col in cols]).T
    mat.setflags(write=False)
    return mat


def basis_eval(n, j, t, h):
    """H_{n,j}(t) on [0, h]."""
    if not 0 <= j < n:
        raise UsageError(f"basis index j={j} must satisfy 0 <= j < n={n}")
    u = t / h
    tail = sum(math.comb(n + s - 1, s) * u ** s for s in range(n - j))
    return t ** j / math.factorial(j) * (1.0 - u) ** n * tail


@dataclass(frozen=True)
class HermiteData:
    """Endpoint derivatives A0[j] = q^(j)(0), A1[j] = q^(j)(h) for j < n."""

    n: int
    h: float
    A0: tuple
    A1: tuple

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("n must be >= 1")
        if not self.h or not np.isfinite(self.h):
            raise UsageError(f"step h must be nonzero and finite, got {self.h}")
        if len(self.A0) != self.n or len(self.A1) != self.n:
            raise UsageError(f"need exactly n={self.n} derivative values at each end")
        shapes = {np.shape(a) for a in (*self.A0, *self.A1)}
        if len(shapes) != 1:
            raise UsageError(f"endpoint data have inconsistent shapes {shapes}")


@dataclass(frozen=True)
class PolynomialCurve:
    """q_d(t) = sum_k coeffs[k] * (t/h)**k, k = 0 .. 2n-1."""

    n: int
    h: float
    coeffs: object  # (2n, dim) float array or Dual

    @property
    def degree(self):
        return 2 * self.n - 1

    def eval_deriv(self, t, r=0):
        return eval_deriv(self, t, r)

    def __call__(self, t):
        return eval_deriv(self, t, 0)


def assemble(data):
    """Build the interpolating PolynomialCurve from HermiteData."""
    n, h = data.n, data.h
    scaled = [h ** j * a for j, a in enumerate(data.A0)]
    scaled += [h ** j * a for j, a in enumerate(data.A1)]
    block = stack([np.atleast_1d(x) if not isinstance(x, Dual) else
                   (x.reshape(-1) if x.ndim == 0 else x) for x in scaled])
    return PolynomialCurve(n, h, _assembly_matrix(n) @ block)


def eval_deriv(curve, t, r=0):
    """r-th time derivative of the curve at time t."""
    if r < 0:
        raise UsageError("derivative order must be >= 0")
    u = t / curve.h
    if u < -1e-12 or u > 1 + 1e-12:
        warnings.warn(f"evaluating at t={t} outside [0, {curve.h}]",
                      ExtrapolationWarning, stacklevel=2)
    ncoef = 2 * curve.n
    if r >= ncoef:
        return 0.0 * curve.coeffs[0]
    return (_weights(ncoef, r, float(u)) @ curve.coeffs) / curve.h ** r


@lru_cache(maxsize=4096)
def _weights(ncoef, r, u):
    k = np.arange(r, ncoef)
    falling = np.array([math.perm(int(kk), r) for kk in k], dtype=float)
    w = np.zeros(ncoef)
    w[r:] = falling * u ** (k - r)
    w.setflags(write=False)
    return w
