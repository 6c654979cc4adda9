import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import DomainError, KernelSpec, SampledFunction, spin, sun
from phasespace.linalg import random_density, rng_from

Ns = st.sampled_from([2, 3, 4, 5])


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_gell_mann_normalization(N):
    g = sun.generators(N).generators
    assert len(g) == N * N - 1
    G = np.array([[np.trace(a @ b) for b in g] for a in g])
    assert np.allclose(G, 2 * np.eye(len(g)))
    for a in g:
        assert np.allclose(a, a.conj().T) and abs(np.trace(a)) < 1e-14


def test_su2_generators_are_paulis():
    l1, l2, l3 = sun.generators(2).generators
    assert np.allclose(l1, [[0, 1], [1, 0]])
    assert np.allclose(l2, [[0, -1j], [1j, 0]])
    assert np.allclose(l3, np.diag([1, -1]))


def test_generator_range_checked():
    with pytest.raises(DomainError):
        sun.generators(3).lam(9)


@settings(max_examples=20, deadline=None)
@given(Ns, st.integers(0, 10 ** 6))
def test_rotation_is_special_unitary(N, seed):
    sys = sun.generators(N)
    ang = rng_from(seed).uniform(0, 2 * math.pi, sun.n_angles(N))
    n = sys.n_pairs
    U = sun.euler_rotation_sun(sys, (ang[:n], ang[n:2 * n], ang[2 * n:]))
    assert np.allclose(U @ U.conj().T, np.eye(N), atol=1e-12)
    assert np.linalg.det(U) == pytest.approx(1.0)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_closed_form_coherent_column(N):
    sys = sun.generators(N)
    rng = rng_from(N)
    phi = rng.uniform(0, 2 * math.pi, sys.n_pairs)
    theta = rng.uniform(0, math.pi, sys.n_pairs)
    a = sun.coherent_state_sun(sys, phi, theta)
    b = sun.coherent_column(sys, phi, theta)
    assert abs(abs(np.vdot(a, b)) - 1) < 1e-12


@pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
def test_qubit_kernel_agrees_with_spin_half(s):
    # doubled angles, and the antipode because SU(N) rotates the lowest weight vector
    sys2 = sun.generators(2)
    s12 = spin.spin_system(0.5)
    for phi, theta in [(0.3, 0.7), (2.0, 2.5)]:
        K = sun.kernel_sun(sys2, s, [phi], [theta])
        K_spin = spin.kernel_at(s12, s, (2 * phi + math.pi, math.pi - 2 * theta, 0.0))
        assert np.allclose(K, K_spin, atol=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_parity_trace_and_spectrum(N):
    P = sun.parity_sun(sun.generators(N))
    assert np.trace(P).real == pytest.approx(1.0)
    # rank-one deformation of I/N: one eigenvalue (1 + sqrt(N+1)(N-1))/N, the rest degenerate
    ev = np.sort(np.linalg.eigvalsh(P))
    assert ev[-1] == pytest.approx((1 + math.sqrt(N + 1) * (N - 1)) / N)
    assert np.allclose(ev[:-1], ev[0])


@pytest.mark.parametrize("N", [2, 3])
def test_haar_moments_against_sampling(N):
    rng = rng_from(12)
    A = random_density(N, rng)
    B = random_density(N, rng)
    exact = sun.moment_integral(N, [A, B])
    kets = sun.random_coherent_states(N, 200_000, rng)
    ea = np.einsum("ni,ij,nj->n", kets.conj(), A, kets).real
    eb = np.einsum("ni,ij,nj->n", kets.conj(), B, kets).real
    mc = N * np.mean(ea * eb)
    assert mc == pytest.approx(exact.real, abs=5e-3)
    # closed form: (Tr A Tr B + Tr AB)/(N+1)
    assert exact == pytest.approx((1 + np.trace(A @ B)) / (N + 1))


def test_weyl_coefficients_round_trip():
    sys = sun.generators(4)
    rho = random_density(4, rng_from(5))
    chi = sun.generator_weyl(sys, rho)
    assert np.allclose(sun.generator_weyl_inverse(sys, chi), rho)


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_s_transform_composes(s1, s2):
    vals = np.array([0.1, 0.5, -0.2])
    F = SampledFunction(vals, KernelSpec.sun(3, 0.0), None)
    G = sun.s_transform_sun(sun.s_transform_sun(F, s1), s2)
    assert np.allclose(G.values, sun.s_transform_sun(F, s2).values)
