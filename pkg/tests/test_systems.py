import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from pcvi.errors import UsageError
from pcvi.integrator import PhasePoint
from pcvi.jets import Dual, Jet
from pcvi.systems import BUILTINS, MechanicalSystem, builtin, energy


@pytest.mark.parametrize("name,q,p,H", [
    ("sho", 1.0, 0.0, 0.5),
    ("duffing", 1.0, 0.0, -0.25),
    ("sho", 0.6, 0.8, 0.5),
    ("pendulum", 0.0, 1.0, 0.5),
])
def test_energy_values(name, q, p, H):
    assert energy(builtin(name), PhasePoint([q], [p])) == pytest.approx(H, abs=1e-15)


def test_pendulum_force_vanishes_at_top():
    assert builtin("pendulum").force(np.array([math.pi]))[0] == pytest.approx(0.0, abs=1e-15)


def test_unknown_system():
    with pytest.raises(UsageError):
        builtin("kepler")
    assert set(BUILTINS) == {"sho", "pendulum", "duffing"}


def test_force_accepts_all_containers():
    s = builtin("duffing")
    assert isinstance(s.force(Jet([0.5, 1.0])), Jet)
    assert isinstance(s.force(Dual.seed([0.5])), Dual)
    f, J = s.force_jacobian([0.5])
    assert f[0] == pytest.approx(0.5 - 0.125)
    assert J[0, 0] == pytest.approx(1 - 3 * 0.25)


def test_constant_force_returns_matching_container():
    s = MechanicalSystem("3*q", ["q"])
    out = s.force(Jet([1.0, 1.0, 0.0]))
    assert np.allclose(out.coeffs[:, 0], [-3, 0, 0])


def test_mass_matrix():
    s = MechanicalSystem("(x**2 + y**2)/2", ["x", "y"], mass=[[2.0, 0.0], [0.0, 4.0]])
    assert np.allclose(s.force(np.array([1.0, 1.0])), [-0.5, -0.25])
    assert s.hamiltonian(np.zeros(2), np.array([2.0, 4.0])) == pytest.approx(1.0 + 2.0)
    assert np.allclose(s.momentum(s.velocity([1.0, 2.0])), [1.0, 2.0])


@pytest.mark.parametrize("kwargs", [
    dict(potential="q**2", coordinates=[]),
    dict(potential="q**2", coordinates=["q"], mass=[[1.0, 0.0], [0.0, 1.0]]),
    dict(potential="q**2", coordinates=["q"], mass=[[-1.0]]),
    dict(potential="q**2 + a", coordinates=["q"]),
    dict(potential="x*y", coordinates=["x", "y"], mass=[[1.0, 0.5], [0.0, 1.0]]),
])
def test_invalid_definitions(kwargs):
    with pytest.raises(UsageError):
        MechanicalSystem(**kwargs)


def test_state_shape_checked():
    with pytest.raises(UsageError):
        builtin("sho").force(np.array([1.0, 2.0]))
    with pytest.raises(UsageError):
        energy(builtin("sho"), PhasePoint([1.0, 2.0], [0.0, 0.0]))


@given(st.sampled_from(BUILTINS), st.floats(-3, 3))
def test_force_is_minus_gradient(name, q):
    s = builtin(name)
    eps = 1e-6
    fd = -(float(s.potential(np.array([q + eps]))) - float(s.potential(np.array([q - eps])))) / (2 * eps)
    assert s.force(np.array([q]))[0] == pytest.approx(fd, abs=1e-7 * (1 + abs(q) ** 3))


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_lagrangian_and_hamiltonian_are_legendre_dual(q, v):
    s = builtin("pendulum")
    p = s.momentum(np.array([v]))
    assert s.hamiltonian(np.array([q]), p) == pytest.approx(
        float(p @ np.array([v])) - s.lagrangian(np.array([q]), np.array([v])), abs=1e-14)
