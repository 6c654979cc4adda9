import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import GridDegreeError, spin, states
from phasespace.linalg import random_density, rng_from
from phasespace.quadrature import SphereGrid

spins = st.sampled_from([0.5, 1.0, 1.5, 2.0])
angles = st.tuples(st.floats(0, 2 * math.pi), st.floats(0, math.pi))


def test_spin_operators_commutator():
    s = spin.spin_system(1.5)
    comm = s.Jx @ s.Jy - s.Jy @ s.Jx
    assert np.allclose(comm, 1j * s.Jz)
    assert np.allclose(s.m, [1.5, 0.5, -0.5, -1.5])


@pytest.mark.parametrize("j", [0.5, 1, 2.5])
def test_multipoles_are_orthonormal(j):
    s = spin.spin_system(j)
    d = int(2 * j)
    T = [spin.multipole(s, l, m) for l in range(d + 1) for m in range(-l, l + 1)]
    G = np.array([[np.trace(a.conj().T @ b) for b in T] for a in T])
    assert np.allclose(G, np.eye(len(T)), atol=1e-12)


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2])
@pytest.mark.parametrize("s", [-1.0, -0.3, 0.0, 1.0])
def test_parity_trace_and_q_limit(j, s):
    sys = spin.spin_system(j)
    P = spin.parity_s(sys, s)
    assert np.trace(P).real == pytest.approx(1.0)
    if s == -1.0:
        # Q kernel: projector on the highest weight state
        expect = np.zeros_like(P)
        expect[0, 0] = 1
        assert np.allclose(P, expect, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(spins, angles)
def test_kernel_is_rotated_parity(j, ang):
    sys = spin.spin_system(j)
    phi, theta = ang
    U = spin.euler_rotation(sys, (phi, theta, 0.0))
    K = spin.kernel_at(sys, 0.0, (phi, theta, 0.0))
    assert np.allclose(K, U @ spin.parity_s(sys, 0.0) @ U.conj().T, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(angles)
def test_qubit_wigner_of_coherent_state(ang):
    phi, theta = ang
    sys = spin.spin_system(0.5)
    rho = states.spin_coherent(0.5, theta, phi)
    # peak sits at the coherent direction
    g = SphereGrid([theta], [phi], [1.0], 0)
    assert spin.evaluate(sys, rho, 0.0, g, check_degree=False).values[0] == pytest.approx(
        (1 + math.sqrt(3)) / 2)


def test_q_function_matches_s_minus_one_kernel():
    sys = spin.spin_system(1.5)
    rho = random_density(4, rng_from(1))
    g = spin.spin_grid(1.5)
    assert np.allclose(spin.q_function(sys, rho, g).values, spin.evaluate(sys, rho, -1.0, g).values)


def test_evaluate_checks_grid_degree():
    sys = spin.spin_system(2)
    with pytest.raises(GridDegreeError):
        spin.evaluate(sys, np.eye(5) / 5, 0.0, spin.spin_grid(2, L=3))


@pytest.mark.parametrize("j", [0.5, 1, 1.5])
def test_p_function_reproduces_state(j):
    sys = spin.spin_system(j)
    rho = random_density(sys.dim, rng_from(2))
    g = spin.spin_grid(j, L=4 * int(2 * j) + 2)
    P = spin.p_reconstruct(sys, rho, g)
    kets = np.array([spin.coherent_state(sys, t, p) for t, p in zip(g.theta, g.phi)])
    back = np.einsum("n,n,ni,nj->ij", g.weights, P.values, kets, kets.conj())
    assert np.allclose(back, rho, atol=1e-10)
    # and agrees with the s = +1 kernel
    assert np.allclose(P.values, spin.evaluate(sys, rho, 1.0, g).values, atol=1e-10)


def test_weyl_function_at_identity_is_trace():
    sys = spin.spin_system(1)
    rho = random_density(3, rng_from(5))
    assert spin.weyl(sys, rho, (0.0, 0.0, 0.0)) == pytest.approx(1.0)


def test_kernel_direction_is_unit():
    n = spin.kernel_direction(np.array([0.3, 1.2]), np.array([2.0, 0.1]))
    assert np.allclose(np.linalg.norm(n, axis=-1), 1.0)
