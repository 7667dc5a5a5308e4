import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from pcvi.discrete_lagrangian import (BERNOULLI, bernoulli_numbers, eval_Ld, euler_maclaurin,
                                      euler_maclaurin_composite, grad_Ld, lagrangian_jet,
                                      linearize_at, resolve_m)
from pcvi.errors import CapabilityError, UsageError
from pcvi.jets import Jet
from pcvi.systems import builtin

SHO, PEND, DUFF = builtin("sho"), builtin("pendulum"), builtin("duffing")


def poly_jet(coeffs, x, order):
    """Jet of sum c_k t^k about t = x."""
    out = []
    for j in range(order + 1):
        out.append(sum(c * math.comb(k, j) * x ** (k - j) for k, c in enumerate(coeffs) if k >= j))
    return Jet(out)


def test_bernoulli_table_matches_recurrence():
    B = bernoulli_numbers(12)
    assert B[1] == Fraction(-1, 2)
    for k, v in BERNOULLI.items():
        assert B[k] == v
    assert all(B[k] == 0 for k in range(3, 13, 2))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_em_exact_on_low_degree(m):
    h = 0.7
    for deg in range(2 * m + 2):
        coeffs = [0.0] * deg + [1.0]
        order = max(2 * m - 1, 0)
        got = euler_maclaurin((poly_jet(coeffs, 0.0, order), poly_jet(coeffs, h, order)), h, m)
        assert got == pytest.approx(h ** (deg + 1) / (deg + 1), rel=1e-14)


def test_em_examples():
    # m = 1 is exact for x^3; for x^4 the error is -h^5 f^(4)/720 = -1/30
    h = 1.0
    x3 = euler_maclaurin((poly_jet([0, 0, 0, 1], 0, 1), poly_jet([0, 0, 0, 1], h, 1)), h, 1)
    assert x3 == pytest.approx(0.25)
    x4 = euler_maclaurin((poly_jet([0, 0, 0, 0, 1], 0, 1), poly_jet([0, 0, 0, 0, 1], h, 1)), h, 1)
    assert x4 - 0.2 == pytest.approx(-1 / 30, rel=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_composite_em_order_on_exp(m):
    thetas = [1.0, 0.5, 0.25, 0.125]
    errs = []
    for th in thetas:
        N = int(round(1 / th))
        xs = np.linspace(0.0, 1.0, N + 1)
        jets = (Jet([math.exp(0.0) / math.factorial(k) for k in range(max(2 * m, 1))]),
                Jet([math.exp(1.0) / math.factorial(k) for k in range(max(2 * m, 1))]))
        got = euler_maclaurin_composite(np.exp(xs), th, jets, m)
        errs.append(abs(got - (math.e - 1)))
    slope = np.polyfit(np.log(thetas), np.log(errs), 1)[0]
    assert abs(slope - (2 * m + 2)) < 0.3


def test_em_rejects_short_jets():
    with pytest.raises(CapabilityError):
        euler_maclaurin((Jet([1.0, 0.0]), Jet([1.0, 0.0])), 0.1, 2)
    with pytest.raises(UsageError):
        euler_maclaurin((Jet([1.0, 0.0]), Jet([1.0, 0.0])), 0.1, -1)


def test_lagrangian_jet_of_cosine():
    q = Jet([1.0, 0.0, -0.5, 0.0, 1 / 24])  # cos t
    L = lagrangian_jet(SHO, q)
    # L = (sin^2 - cos^2)/2 = -cos(2t)/2
    assert np.allclose(np.ravel(L.coeffs), [-0.5, 0.0, 1.0, 0.0][:L.order + 1], atol=1e-15)


def test_resolve_m():
    assert resolve_m(3, None) == 1
    assert resolve_m(4, None) == 2
    with pytest.raises(UsageError):
        resolve_m(3, 2)
    with pytest.raises(UsageError):
        resolve_m(1, 0)


def sho_hem21_closed_form():
    q0, q1, h, a, b = sp.symbols("q0 q1 h a b")
    t = sp.Symbol("t")
    c = sp.symbols("c0:4")
    q = sum(ci * t ** i for i, ci in enumerate(c))
    eqs = [q.subs(t, 0) - q0, q.subs(t, h) - q1, sp.diff(q, t, 1).subs(t, 0) - a,
           sp.diff(q, t, 1).subs(t, h) - b,
           sp.diff(q, t, 2).subs(t, 0) + q0, sp.diff(q, t, 2).subs(t, h) + q1]
    sol = sp.solve(eqs, [*c, a, b], dict=True)[0]
    # L = (v^2 - q^2)/2 along the true flow has dL/dt = -2 q v
    L = lambda x, v: (v ** 2 - x ** 2) / 2  # noqa: E731
    Ld = h / 2 * (L(q0, a) + L(q1, b)) - h ** 2 / 12 * (-2 * q1 * b + 2 * q0 * a)
    return sp.lambdify((q0, q1, h), sp.simplify(Ld.subs(sol)))


def test_sho_hem21_matches_symbolic_closed_form():
    f = sho_hem21_closed_form()
    for q0, q1, h in [(1.0, 0.9, 0.1), (0.3, -0.2, 0.25), (-1.0, 0.5, 0.05)]:
        assert eval_Ld(SHO, 2, 1, h, [q0], [q1]).value == pytest.approx(f(q0, q1, h), rel=1e-12)


def test_gradients_of_sho_closed_form():
    q0, q1, h = 0.7, 0.5, 0.2
    D1, D2 = grad_Ld(SHO, 3, 1, h, [q0], [q1])
    eps = 1e-6
    v = lambda a, b: eval_Ld(SHO, 3, 1, h, [a], [b]).value  # noqa: E731
    assert D1[0] == pytest.approx((v(q0 + eps, q1) - v(q0 - eps, q1)) / (2 * eps), abs=1e-8)
    assert D2[0] == pytest.approx((v(q0, q1 + eps) - v(q0, q1 - eps)) / (2 * eps), abs=1e-8)


def test_linearize_at_reports_residual_off_manifold():
    lin = linearize_at(PEND, 3, None, 0.1, [0.4], [0.3], [0.0], [0.0])
    assert np.max(np.abs(lin.scaled_residual)) > 1e-6
    assert lin.R_v.shape == (2, 2) and lin.L_q.shape == (2,)


pairs = st.tuples(st.floats(-1, 1), st.floats(-1, 1))
nm = st.sampled_from([(2, 0), (2, 1), (3, 1), (4, 2)])


@given(pairs, nm, st.sampled_from(["sho", "pendulum", "duffing"]))
def test_symmetry(qq, nm_, name):
    q0, q1 = qq
    n, m = nm_
    s = builtin(name)
    a = eval_Ld(s, n, m, 0.1, [q0], [q1], gradients=True)
    b = eval_Ld(s, n, m, 0.1, [q1], [q0], gradients=True)
    assert a.value == pytest.approx(b.value, abs=1e-12 * (1 + abs(a.value)))
    assert a.D1[0] == pytest.approx(b.D2[0], abs=1e-9)


@given(pairs, nm)
def test_gradients_match_finite_differences(qq, nm_):
    q0, q1 = qq
    n, m = nm_
    h, eps = 0.1, 1e-6
    ev = eval_Ld(DUFF, n, m, h, [q0], [q1], gradients=True)
    f = lambda a, b: eval_Ld(DUFF, n, m, h, [a], [b]).value  # noqa: E731
    fd1 = (f(q0 + eps, q1) - f(q0 - eps, q1)) / (2 * eps)
    fd2 = (f(q0, q1 + eps) - f(q0, q1 - eps)) / (2 * eps)
    assert ev.D1[0] == pytest.approx(fd1, abs=1e-6 * (1 + abs(fd1)))
    assert ev.D2[0] == pytest.approx(fd2, abs=1e-6 * (1 + abs(fd2)))
