import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import ValidationError, spin, wootters
from phasespace.linalg import random_density, rng_from

seeds = st.integers(0, 2 ** 32 - 1)


def test_phase_point_operators_form_a_frame():
    A = [wootters.phase_point_operator(p) for p in wootters.LATTICE]
    G = np.array([[np.trace(a @ b).real for b in A] for a in A])
    # Tr[A_i A_k] = 2 delta_ik in this normalization
    assert np.allclose(G, 2 * np.eye(4), atol=1e-12)
    assert np.allclose(sum(A) / 2, np.eye(2))


@pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
def test_trace_and_duality(s):
    for p in wootters.LATTICE:
        assert np.trace(wootters.phase_point_operator(p, s)).real == pytest.approx(1.0)
    G = np.array([[np.trace(wootters.phase_point_operator(a, s) @ wootters.phase_point_operator(b, -s)).real
                   for b in wootters.LATTICE] for a in wootters.LATTICE])
    assert np.allclose(G, 2 * np.eye(4), atol=1e-12)


def test_spin_up_values():
    up = np.diag([1.0, 0.0])
    W = wootters.discrete_wigner(up)
    assert W.as_sequence() == pytest.approx([1.0, 1.0, 0.0, 0.0])
    X = wootters.discrete_weyl(up)
    assert np.allclose(X.as_sequence(), [1, 0, 1, 0])


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_fourier_pair_round_trip(seed):
    rho = random_density(2, rng_from(seed))
    X = wootters.discrete_weyl(rho)
    W = wootters.dft_wigner_weyl(X)
    assert np.allclose(W.values, wootters.discrete_wigner(rho).values, atol=1e-12)
    assert np.allclose(wootters.dft_wigner_weyl(W).values, X.values, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1))
def test_s_transform_of_kernel(s):
    A0 = wootters.phase_point_operator((1, 0), 0.0)
    assert np.allclose(wootters.transform_kernel(A0, 0.0, s), wootters.phase_point_operator((1, 0), s))


def test_sphere_embedding_gives_same_operator():
    for s in (-1.0, 0.0, 1.0):
        for p in wootters.LATTICE:
            assert np.allclose(wootters.phase_point_operator_from_sphere(p, s),
                               wootters.phase_point_operator(p, s), atol=1e-12)
    theta, _ = wootters.stratonovich_embedding((0, 0))
    assert theta == pytest.approx(math.acos(1 / math.sqrt(3)))


def test_weyl_squared_modulus_matches_spin_weyl():
    rho = random_density(2, rng_from(11))
    sys = spin.spin_system(0.5)
    X = wootters.discrete_weyl(rho)
    for p in wootters.LATTICE:
        chi = spin.weyl(sys, rho, wootters.continuous_weyl_angles(p))
        assert abs(X[p]) ** 2 == pytest.approx(abs(chi) ** 2, abs=1e-12)


def test_stabilizer_states_are_non_negative():
    for rho in wootters.pauli_eigenstates().values():
        assert wootters.discrete_wigner(rho).values.min() >= -1e-15


def test_magic_state_is_negative():
    # eigenstate of (sx + sy + sz)/sqrt(3) pointing away from a lattice point
    n = -np.array([1, 1, 1]) / math.sqrt(3)
    rho = 0.5 * (np.eye(2) + n[0] * wootters.SIGMA_X + n[1] * wootters.SIGMA_Y + n[2] * wootters.SIGMA_Z)
    assert wootters.discrete_wigner(rho).values.min() < 0


def test_discrete_function_validation():
    with pytest.raises(ValidationError):
        wootters.DiscreteFunction(np.zeros(3))
    with pytest.raises(ValidationError):
        wootters.DiscreteFunction(np.array([[1j, 0], [0, 0]]))
