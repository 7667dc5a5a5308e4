"""Truncated Taylor series (jets) and forward-mode dual numbers.

A :class:`Jet` stores the Taylor coefficients ``c_0 .. c_K`` of a
vector-valued curve about some base time, so the j-th time derivative at the
base point is ``j! * c_j``.  The coefficient block is either a plain float
array of shape ``(K+1, dim)`` or a :class:`Dual` of that shape; in the second
case every coefficient also carries its partial derivatives with respect to
a fixed list of seed variables.  That nesting is what lets the collocation
and discrete-Lagrangian code get exact Jacobians of endpoint jet quantities.

The free functions :func:`sin`, :func:`cos`, :func:`exp` dispatch on the
argument type, so potential/force callables written once work on floats,
arrays, duals and jets alike.
"""
import math

import numpy as np

from .errors import UsageError


def _dual(value, partials):
    d = Dual.__new__(Dual)
    d.value = value
    d.partials = partials
    return d


class Dual:
    """Value plus first partials with respect to ``nseeds`` seed variables.

    ``partials`` has the shape of ``value`` with one extra trailing axis,
    one column per seed.  Indexing acts on the value axes only.
    """

    __slots__ = ("value", "partials")
    __array_ufunc__ = None

    def __init__(self, value, partials):
        value = np.asarray(value, dtype=float)
        partials = np.asarray(partials, dtype=float)
        if partials.shape[:-1] != value.shape or partials.ndim != value.ndim + 1:
            raise UsageError(
                f"partials shape {partials.shape} does not extend value shape {value.shape}")
        self.value = value
        self.partials = partials

    @classmethod
    def seed(cls, value, start=0, nseeds=None):
        """Seed a vector as independent variables ``start .. start+len-1``."""
        value = np.atleast_1d(np.asarray(value, dtype=float))
        if value.ndim != 1:
            raise UsageError("only vectors can be seeded")
        d = value.shape[0]
        nseeds = d + start if nseeds is None else nseeds
        if start < 0 or start + d > nseeds:
            raise UsageError("seed block falls outside the seed range")
        partials = np.zeros((d, nseeds))
        partials[np.arange(d), start + np.arange(d)] = 1.0
        return _dual(value, partials)

    @classmethod
    def constant(cls, value, nseeds):
        value = np.asarray(value, dtype=float)
        return _dual(value, np.zeros(value.shape + (nseeds,)))

    @property
    def nseeds(self):
        return self.partials.shape[-1]

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    def __len__(self):
        return len(self.value)

    def __getitem__(self, idx):
        return _dual(self.value[idx], self.partials[idx])

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        v = self.value.reshape(shape)
        return _dual(v, self.partials.reshape(v.shape + (self.nseeds,)))

    def __repr__(self):
        return f"Dual(value={self.value!r}, partials={self.partials!r})"

    # arithmetic ---------------------------------------------------------

    def __neg__(self):
        return _dual(-self.value, -self.partials)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Dual):
            return _dual(self.value + other.value, self.partials + other.partials)
        if isinstance(other, Jet):
            return NotImplemented
        v = self.value + other
        p = self.partials
        if v.shape != self.value.shape:
            p = np.broadcast_to(p, v.shape + p.shape[-1:]).copy()
        return _dual(v, p)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            return _dual(self.value * other.value,
                         self.partials * other.value[..., None]
                         + other.partials * self.value[..., None])
        if isinstance(other, Jet):
            return NotImplemented
        o = np.asarray(other, dtype=float)
        return _dual(self.value * o, self.partials * o[..., None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self * other.reciprocal()
        if isinstance(other, Jet):
            return NotImplemented
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        r = 1.0 / self.value
        return _dual(r, -self.partials * (r * r)[..., None])

    def __pow__(self, k):
        if not float(k).is_integer():
            raise UsageError("Dual supports integer powers only")
        k = int(k)
        if k == 0:
            return _dual(np.ones_like(self.value), np.zeros_like(self.partials))
        return _dual(self.value ** k,
                     self.partials * (k * self.value ** (k - 1))[..., None])

    def __matmul__(self, mat):
        # self (..., d) @ mat (d, e)
        mat = np.asarray(mat, dtype=float)
        return _dual(self.value @ mat, np.einsum("...dp,de->...ep", self.partials, mat))

    def __rmatmul__(self, mat):
        # mat (..., k) @ self (k, ...)
        mat = np.asarray(mat, dtype=float)
        return _dual(np.tensordot(mat, self.value, axes=([-1], [0])),
                     np.tensordot(mat, self.partials, axes=([-1], [0])))

    def sum(self, axis=None):
        if axis is None:
            axes = tuple(range(self.value.ndim))
            return _dual(self.value.sum(), self.partials.sum(axis=axes))
        axis = axis % self.value.ndim
        return _dual(self.value.sum(axis=axis), self.partials.sum(axis=axis))

    def sin(self):
        return _dual(np.sin(self.value), self.partials * np.cos(self.value)[..., None])

    def cos(self):
        return _dual(np.cos(self.value), -self.partials * np.sin(self.value)[..., None])

    def exp(self):
        e = np.exp(self.value)
        return _dual(e, self.partials * e[..., None])


def value_of(x):
    """Strip derivative information: Dual -> value array, others unchanged."""
    return x.value if isinstance(x, Dual) else x


def partials_of(x, nseeds):
    """Partials of ``x``; zeros for plain arrays."""
    if isinstance(x, Dual):
        return x.partials
    x = np.asarray(x, dtype=float)
    return np.zeros(x.shape + (nseeds,))


def stack(items, axis=0):
    """np.stack that understands Dual items (plain items get zero partials)."""
    nseeds = next((it.nseeds for it in items if isinstance(it, Dual)), None)
    if nseeds is None:
        return np.stack([np.asarray(it, dtype=float) for it in items], axis=axis)
    v = np.stack([value_of(it) for it in items], axis=axis)
    ax = axis % v.ndim
    p = np.stack([partials_of(it, nseeds) for it in items], axis=ax)
    return _dual(v, p)


def concatenate(items, axis=0):
    nseeds = next((it.nseeds for it in items if isinstance(it, Dual)), None)
    if nseeds is None:
        return np.concatenate([np.asarray(it, dtype=float) for it in items], axis=axis)
    v = np.concatenate([value_of(it) for it in items], axis=axis)
    ax = axis % v.ndim
    p = np.concatenate([partials_of(it, nseeds) for it in items], axis=ax)
    return _dual(v, p)


# series kernels (leading axis = Taylor index) -----------------------------

def _conv(a, b):
    n = a.shape[0]
    out = a[0] * b
    for i in range(1, n):
        out[i:] += a[i] * b[:n - i]
    return out


def _series_mul(a, b):
    ad, bd = isinstance(a, Dual), isinstance(b, Dual)
    if not (ad or bd):
        return _conv(a, b)
    if ad and bd:
        return _dual(_conv(a.value, b.value),
                     _conv(a.value[..., None], b.partials) + _conv(a.partials, b.value[..., None]))
    if ad:
        return _dual(_conv(a.value, b), _conv(a.partials, b[..., None]))
    return _dual(_conv(a, b.value), _conv(a[..., None], b.partials))


def _series_div(a, b):
    n = a.shape[0]
    inv0 = 1.0 / b[0]
    out = [a[0] * inv0]
    for k in range(1, n):
        acc = a[k]
        for i in range(1, k + 1):
            acc = acc - b[i] * out[k - i]
        out.append(acc * inv0)
    return stack(out)


def _const_series(c, order):
    if isinstance(c, Dual):
        c = c.reshape(-1) if c.ndim == 0 else c
        v = np.zeros((order + 1,) + c.value.shape)
        v[0] = c.value
        p = np.zeros((order + 1,) + c.partials.shape)
        p[0] = c.partials
        return _dual(v, p)
    c = np.atleast_1d(np.asarray(c, dtype=float))
    out = np.zeros((order + 1,) + c.shape)
    out[0] = c
    return out


def _scalar_sin(x):
    return x.sin() if isinstance(x, Dual) else np.sin(x)


def _scalar_cos(x):
    return x.cos() if isinstance(x, Dual) else np.cos(x)


def _scalar_exp(x):
    return x.exp() if isinstance(x, Dual) else np.exp(x)


def _sincos_series(a):
    n = a.shape[0]
    da = [j * a[j] for j in range(n)]
    s = [_scalar_sin(a[0])]
    c = [_scalar_cos(a[0])]
    for k in range(1, n):
        sk = da[1] * c[k - 1]
        ck = da[1] * s[k - 1]
        for j in range(2, k + 1):
            sk = sk + da[j] * c[k - j]
            ck = ck + da[j] * s[k - j]
        s.append(sk / k)
        c.append(-ck / k)
    return stack(s), stack(c)


def _sin_series(a):
    return _sincos_series(a)[0]


def _cos_series(a):
    return _sincos_series(a)[1]


def _exp_series(a):
    n = a.shape[0]
    da = [j * a[j] for j in range(n)]
    e = [_scalar_exp(a[0])]
    for k in range(1, n):
        acc = da[1] * e[k - 1]
        for j in range(2, k + 1):
            acc = acc + da[j] * e[k - j]
        e.append(acc / k)
    return stack(e)


_RECURRENCES = {"sin": _sin_series, "cos": _cos_series, "exp": _exp_series}


def register_analytic(name, recurrence):
    """Make ``jet_analytic(name, ...)`` available.

    ``recurrence`` maps a coefficient block of shape ``(K+1, dim)`` (float
    array or Dual) to the coefficient block of the composed series, exact up
    to order K.
    """
    if name in ("pow", "polynomial") or name.startswith("pow_"):
        raise UsageError(f"{name!r} is reserved")
    _RECURRENCES[name] = recurrence


class Jet:
    """Truncated Taylor series of a curve in R^dim."""

    __slots__ = ("coeffs",)
    __array_ufunc__ = None

    def __init__(self, coeffs):
        if not isinstance(coeffs, Dual):
            coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(-1, 1)
        if coeffs.ndim != 2:
            raise UsageError(f"jet coefficients must be (K+1, dim), got shape {coeffs.shape}")
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, order):
        return cls(_const_series(value, order))

    @classmethod
    def variable(cls, value, order):
        """The jet of t -> value + t (plain floats only)."""
        c = _const_series(np.asarray(value, dtype=float), order)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def from_coefficients(cls, items):
        return cls(stack([np.atleast_1d(it) if not isinstance(it, Dual) else
                          (it.reshape(-1) if it.ndim == 0 else it) for it in items]))

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def is_dual(self):
        return isinstance(self.coeffs, Dual)

    def coeff(self, k):
        return self.coeffs[k]

    def derivative_value(self, j):
        if not 0 <= j <= self.order:
            raise UsageError(f"derivative order {j} outside 0..{self.order}")
        return math.factorial(j) * self.coeffs[j]

    def derivative(self):
        """Jet of the time derivative (order drops by one)."""
        if self.order == 0:
            raise UsageError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1, dtype=float)[:, None]
        return Jet(self.coeffs[1:] * k)

    def truncate(self, order):
        if order > self.order or order < 0:
            raise UsageError(f"cannot truncate order-{self.order} jet to order {order}")
        return Jet(self.coeffs[:order + 1])

    def component(self, i):
        return Jet(self.coeffs[:, i:i + 1])

    def values(self):
        return Jet(value_of(self.coeffs))

    def __repr__(self):
        return f"Jet(order={self.order}, dim={self.dim}, coeffs={self.coeffs!r})"

    # arithmetic ---------------------------------------------------------

    def _other_series(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise UsageError(f"jet order mismatch: {self.order} vs {other.order}")
            if self.dim != other.dim and 1 not in (self.dim, other.dim):
                raise UsageError(f"jet dimension mismatch: {self.dim} vs {other.dim}")
            return other.coeffs
        return None

    def __add__(self, other):
        s = self._other_series(other)
        if s is None:
            s = _const_series(other, self.order)
        return Jet(self.coeffs + s)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        s = self._other_series(other)
        if s is not None:
            return Jet(_series_mul(self.coeffs, s))
        if isinstance(other, Dual):
            return Jet(other * self.coeffs)
        return Jet(self.coeffs * np.asarray(other, dtype=float))

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = self._other_series(other)
        if s is not None:
            return Jet(_series_div(self.coeffs, s))
        if isinstance(other, Dual):
            return self * other.reciprocal()
        return Jet(self.coeffs * (1.0 / np.asarray(other, dtype=float)))

    def __rtruediv__(self, other):
        return Jet(_series_div(_const_series(other, self.order) + 0 * self.coeffs, self.coeffs))

    def __pow__(self, k):
        return jet_analytic(f"pow_{k}", self)

    def __matmul__(self, mat):
        """Apply a constant matrix on the state axis: rows are ``c_k @ mat``."""
        return Jet(self.coeffs @ np.asarray(mat, dtype=float))

    def dot(self, other):
        """Jet of the Euclidean inner product (a dim-1 jet)."""
        prod = self * other
        c = prod.coeffs
        return Jet(c.sum(axis=1).reshape(-1, 1) if isinstance(c, Dual)
                   else c.sum(axis=1, keepdims=True))


# named operations ----------------------------------------------------------

def jet_add(a, b):
    if not (isinstance(a, Jet) and isinstance(b, Jet)):
        raise UsageError("jet_add expects two jets")
    if a.order != b.order or a.dim != b.dim:
        raise UsageError("jet_add: order/dim mismatch")
    return a + b


def jet_mul(a, b):
    if not (isinstance(a, Jet) and isinstance(b, Jet)):
        raise UsageError("jet_mul expects two jets")
    return a * b


def _int_power(coeffs, k):
    if k == 0:
        return _const_series(np.ones(coeffs.shape[1]), coeffs.shape[0] - 1) + 0 * coeffs
    if k < 0:
        return _series_div(_const_series(np.ones(coeffs.shape[1]), coeffs.shape[0] - 1)
                           + 0 * coeffs, _int_power(coeffs, -k))
    result = None
    base = coeffs
    while k:
        if k & 1:
            result = base if result is None else _series_mul(result, base)
        k >>= 1
        if k:
            base = _series_mul(base, base)
    return result


def jet_analytic(f_name, a, coefficients=None):
    """Compose an analytic function with a jet.

    ``f_name`` is one of ``sin``, ``cos``, ``exp``, ``pow_<k>`` (integer k),
    ``polynomial`` (then ``coefficients`` lists p_0, p_1, ... so that
    f(x) = sum p_i x^i), or any name added with :func:`register_analytic`.
    The function acts componentwise.
    """
    if not isinstance(a, Jet):
        raise UsageError("jet_analytic expects a Jet")
    if f_name in _RECURRENCES:
        return Jet(_RECURRENCES[f_name](a.coeffs))
    if f_name.startswith("pow_"):
        try:
            k = int(f_name[4:])
        except ValueError:
            raise UsageError(f"bad integer power {f_name!r}") from None
        return Jet(_int_power(a.coeffs, k))
    if f_name == "polynomial":
        if coefficients is None or len(coefficients) == 0:
            raise UsageError("polynomial needs coefficients")
        result = Jet.constant(np.full(a.dim, float(coefficients[-1])), a.order) + 0 * a
        for c in reversed(coefficients[:-1]):
            result = result * a + float(c)
        return result
    raise UsageError(f"unsupported analytic function {f_name!r}")


def jet_derivative_value(a, j):
    return a.derivative_value(j)


def sin(x):
    if isinstance(x, Jet):
        return jet_analytic("sin", x)
    return _scalar_sin(x)


def cos(x):
    if isinstance(x, Jet):
        return jet_analytic("cos", x)
    return _scalar_cos(x)


def exp(x):
    if isinstance(x, Jet):
        return jet_analytic("exp", x)
    return _scalar_exp(x)


def power(x, k):
    return x ** k
