import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcvi.errors import CapabilityError, UsageError
from pcvi.jets import Dual
from pcvi.prolongation import jet_order, prolongation_values, solution_jet
from pcvi.systems import MechanicalSystem, builtin

SHO, PEND, DUFF = builtin("sho"), builtin("pendulum"), builtin("duffing")


def test_sho_gives_cosine_series():
    jet = solution_jet(SHO, [1.0], [0.0], 8)
    expect = [((-1) ** (k // 2)) / math.factorial(k) if k % 2 == 0 else 0.0 for k in range(9)]
    assert np.allclose(jet.coeffs[:, 0], expect, atol=1e-16)


def test_pendulum_at_right_angle():
    vals = [float(x[0]) for x in prolongation_values(PEND, [math.pi / 2], [0.0], 5)]
    # q'' = -1, q''' = -cos(q) q' = 0, q'''' = -cos(q) q'' + sin(q) q'^2 = 0
    assert vals[:3] == pytest.approx([math.pi / 2, 0.0, -1.0], abs=1e-15)
    assert vals[3] == pytest.approx(0.0, abs=1e-15)
    assert vals[4] == pytest.approx(0.0, abs=1e-15)


def test_duffing_equilibrium_is_fixed():
    jet = solution_jet(DUFF, [1.0], [0.0], 6)
    assert jet.coeffs[0, 0] == 1.0
    assert np.all(jet.coeffs[1:, 0] == 0.0)


def test_jet_order_values():
    assert [jet_order(n) for n in (2, 3, 4, 5)] == [3, 4, 5, 6]


def test_bad_arguments():
    with pytest.raises(UsageError):
        solution_jet(SHO, [1.0], [0.0], 1)
    with pytest.raises(UsageError):
        solution_jet(SHO, [1.0, 2.0], [0.0], 3)


def test_non_jet_force_is_capability_error():
    import sympy as sp
    q = sp.Symbol("q")
    sys_ = MechanicalSystem(sp.tan(q), [q], name="tan")
    with pytest.raises(CapabilityError):
        solution_jet(sys_, [0.1], [0.0], 4)


def test_two_dimensional_system():
    sys_ = MechanicalSystem("(x**2 + 4*y**2)/2", ["x", "y"])
    jet = solution_jet(sys_, [1.0, 1.0], [0.0, 0.0], 4)
    # x = cos t, y = cos 2t
    assert np.allclose(jet.coeffs[:, 0], [1, 0, -0.5, 0, 1 / 24])
    assert np.allclose(jet.coeffs[:, 1], [1, 0, -2, 0, 16 / 24])


def test_dual_inputs_carry_partials():
    q = Dual.seed([0.4], 0, 2)
    v = Dual.seed([0.3], 1, 2)
    jet = solution_jet(PEND, q, v, 4)
    eps = 1e-7
    plus = solution_jet(PEND, [0.4 + eps], [0.3], 4).coeffs[:, 0]
    minus = solution_jet(PEND, [0.4 - eps], [0.3], 4).coeffs[:, 0]
    fd = (plus - minus) / (2 * eps)
    assert np.allclose(jet.coeffs.partials[:, 0, 0], fd, atol=1e-8)


states = st.tuples(st.floats(-2, 2), st.floats(-2, 2))


@given(states, st.sampled_from(["sho", "pendulum", "duffing"]))
def test_higher_derivatives_match_chain_rule(state, name):
    q, v = state
    sys_ = builtin(name)
    d = [float(x[0]) for x in prolongation_values(sys_, [q], [v], 4)]
    f, fp = sys_.force_jacobian([q])
    eps = 1e-5
    fpp = (sys_.force_jacobian([q + eps])[1] - sys_.force_jacobian([q - eps])[1])[0, 0] / (2 * eps)
    fp = fp[0, 0]
    assert d[2] == pytest.approx(f[0], abs=1e-14)
    assert d[3] == pytest.approx(fp * v, abs=1e-12)
    assert d[4] == pytest.approx(fpp * v * v + fp * f[0], abs=1e-7 * (1 + v * v))


@given(states)
def test_self_consistency_along_flow(state):
    # the jet at (q(s), q'(s)) agrees with the shifted jet of the same solution
    q, v = state
    big = solution_jet(PEND, [q], [v], 12)
    s = 0.05
    c = big.coeffs[:, 0]
    qs = sum(c[k] * s ** k for k in range(13))
    vs = sum(k * c[k] * s ** (k - 1) for k in range(1, 13))
    local = solution_jet(PEND, [qs], [vs], 4).coeffs[:, 0]
    shifted = [sum(math.comb(k, j) * c[k] * s ** (k - j) for k in range(j, 13)) for j in range(5)]
    assert np.allclose(local, shifted, atol=1e-10)


@pytest.mark.parametrize("name,q,v", [("pendulum", 0.7, -0.4), ("duffing", 0.5, 0.3)])
def test_matches_derivatives_of_reference_trajectory(name, q, v):
    from pcvi.harness.oracles import rk4_flow
    s = builtin(name)
    ts = np.linspace(-0.12, 0.12, 13)
    qs = [q if t == 0 else rk4_flow(s, [q], [v], t, 400)[0][0] for t in ts]
    poly = np.polynomial.Polynomial.fit(ts, qs, 10, domain=[-1, 1])
    got = [float(x[0]) for x in prolongation_values(s, [q], [v], 4)]
    for j in range(5):
        assert got[j] == pytest.approx(poly.deriv(j)(0.0), abs=1e-5)
