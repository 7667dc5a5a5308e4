import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pcvi.errors import UsageError
from pcvi.jets import (Dual, Jet, cos, exp, jet_add, jet_analytic, jet_derivative_value,
                       jet_mul, register_analytic, sin, stack)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def jet_strategy(order=4, dim=1):
    return arrays(float, (order + 1, dim), elements=finite).map(Jet)


def t_jet(order):
    return Jet.variable(0.0, order)


# examples ------------------------------------------------------------------

def test_add_examples():
    assert np.array_equal(jet_add(Jet([1.0, 2.0]), Jet([0.0, 0.0])).coeffs[:, 0], [1, 2])
    t = t_jet(1)
    assert np.array_equal((t + t).coeffs[:, 0], [0, 2])
    one_plus, one_minus = Jet([1.0, 1.0]), Jet([1.0, -1.0])
    assert np.array_equal(jet_add(one_plus, one_minus).coeffs[:, 0], [2, 0])


def test_add_mismatch_is_usage_error():
    with pytest.raises(UsageError):
        jet_add(Jet([1.0, 2.0]), Jet([1.0, 2.0, 3.0]))
    with pytest.raises(UsageError):
        jet_add(Jet(np.zeros((2, 2))), Jet(np.zeros((2, 3))))


def test_mul_examples():
    a = Jet([1.0, 1.0, 0.0])
    assert np.allclose(jet_mul(a, a).coeffs[:, 0], [1, 2, 1])
    one = Jet.constant([1.0], 2)
    assert np.array_equal(jet_mul(a, one).coeffs, a.coeffs)
    t = t_jet(4)
    t2 = Jet([0.0, 0.0, 1.0, 0.0, 0.0])
    assert np.array_equal(jet_mul(t, t2).coeffs[:, 0], [0, 0, 0, 1, 0])


def test_mul_order_mismatch():
    with pytest.raises(UsageError):
        jet_mul(Jet([1.0, 1.0]), Jet([1.0, 1.0, 1.0]))


def test_scalar_times_vector_jet():
    s = Jet([2.0, 1.0])
    v = Jet(np.array([[1.0, 3.0], [0.0, 1.0]]))
    out = s * v
    assert out.dim == 2
    assert np.allclose(out.coeffs, [[2.0, 6.0], [1.0, 5.0]])


def test_analytic_examples():
    t3 = t_jet(3)
    assert np.allclose(jet_analytic("sin", t3).coeffs[:, 0], [0, 1, 0, -1 / 6], atol=1e-16)
    t4 = t_jet(4)
    assert np.allclose(jet_analytic("exp", t4).coeffs[:, 0], [1, 1, 1 / 2, 1 / 6, 1 / 24])
    assert np.allclose(jet_analytic("pow_3", Jet([1.0, 1.0, 0.0])).coeffs[:, 0], [1, 3, 3])


def test_polynomial_and_negative_power():
    a = Jet([1.0, 1.0, 0.0, 0.0])
    p = jet_analytic("polynomial", a, coefficients=[1.0, 0.0, 2.0])  # 1 + 2 a^2
    assert np.allclose(p.coeffs[:, 0], [3, 4, 2, 0])
    inv = jet_analytic("pow_-1", a)  # 1/(1+t)
    assert np.allclose(inv.coeffs[:, 0], [1, -1, 1, -1])


def test_unsupported_function():
    with pytest.raises(UsageError):
        jet_analytic("tan", t_jet(2))
    with pytest.raises(UsageError):
        jet_analytic("pow_x", t_jet(2))


def test_register_analytic_hook():
    def sinh_series(a):
        e = jet_analytic("exp", Jet(a)).coeffs
        em = jet_analytic("exp", Jet(-a)).coeffs
        return 0.5 * (e - em)

    register_analytic("sinh_test", sinh_series)
    out = jet_analytic("sinh_test", t_jet(3))
    assert np.allclose(out.coeffs[:, 0], [0, 1, 0, 1 / 6])
    with pytest.raises(UsageError):
        register_analytic("pow_2", sinh_series)


def test_derivative_value_examples():
    c = Jet([1.0, 0.0, -0.5, 0.0, 1 / 24])
    assert jet_derivative_value(c, 4)[0] == pytest.approx(1.0)
    assert jet_derivative_value(c, 0)[0] == 1.0
    assert jet_derivative_value(Jet([0.0, 0.0, 1.0]), 2)[0] == 2.0
    with pytest.raises(UsageError):
        jet_derivative_value(c, 5)
    with pytest.raises(UsageError):
        jet_derivative_value(c, -1)


def test_dispatch_on_plain_values():
    assert sin(0.5) == pytest.approx(math.sin(0.5))
    assert cos(np.array([0.0]))[0] == 1.0
    assert exp(Dual.seed([0.0])).partials[0, 0] == 1.0


# properties ----------------------------------------------------------------

@given(jet_strategy(), jet_strategy())
def test_product_rule(a, b):
    # derivative of a*b equals a'*b + a*b' up to the common truncation order
    lhs = (a * b).derivative()
    rhs = a.derivative() * b.truncate(3) + a.truncate(3) * b.derivative()
    scale = 1.0 + np.abs(a.coeffs).max() * np.abs(b.coeffs).max()
    assert np.allclose(lhs.coeffs, rhs.coeffs, rtol=1e-13, atol=1e-13 * scale * 10)


@given(jet_strategy(order=5))
def test_sin_chain_rule(a):
    lhs = jet_analytic("sin", a).derivative()
    rhs = jet_analytic("cos", a.truncate(4)) * a.derivative()
    scale = 1.0 + np.abs(a.coeffs).max() ** 5
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-13 * scale * 10)


@given(jet_strategy(order=5))
def test_exp_chain_rule(a):
    lhs = jet_analytic("exp", a).derivative()
    rhs = jet_analytic("exp", a.truncate(4)) * a.derivative()
    scale = math.exp(3) * (1.0 + np.abs(a.coeffs).max() ** 5)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-13 * scale * 10)


@given(arrays(float, (3,), elements=finite))
def test_dual_jacobian_of_polynomial_map(x):
    # F(x) = (x0^2 x1, x1 - x2^3, x0 x2)
    d = Dual.seed(x)
    F = stack([d[0] ** 2 * d[1], d[1] - d[2] ** 3, d[0] * d[2]])
    J = np.array([
        [2 * x[0] * x[1], x[0] ** 2, 0.0],
        [0.0, 1.0, -3 * x[2] ** 2],
        [x[2], 0.0, x[0]],
    ])
    assert np.allclose(F.partials, J, rtol=0, atol=1e-14 * (1 + np.abs(J).max()))


def test_seed_is_identity():
    d = Dual.seed([1.0, 2.0, 3.0])
    assert np.array_equal(d.partials, np.eye(3))
    block = Dual.seed([5.0], start=2, nseeds=4)
    assert np.array_equal(block.partials, [[0, 0, 1, 0]])
    with pytest.raises(UsageError):
        Dual.seed([1.0, 2.0], start=3, nseeds=4)


def test_jet_over_dual_matches_finite_difference():
    # d/dx of the t^2 coefficient of sin(x + t) is -cos(x)/2
    x = 0.3
    a = Jet(stack([Dual.seed([x]), Dual.constant([1.0], 1), Dual.constant([0.0], 1)]))
    c2 = jet_analytic("sin", a).coeffs[2]
    assert c2.value[0] == pytest.approx(-math.sin(x) / 2)
    assert c2.partials[0, 0] == pytest.approx(-math.cos(x) / 2, abs=1e-15)


def test_dual_division_and_power():
    d = Dual.seed([2.0])
    q = 1.0 / d
    assert q.partials[0, 0] == pytest.approx(-0.25)
    assert (d ** 3).partials[0, 0] == pytest.approx(12.0)
    with pytest.raises(UsageError):
        d ** 0.5
