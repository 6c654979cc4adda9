import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import DomainError, KernelSpec, ValidationError, composite, metrics, spin, states, wootters
from phasespace.linalg import random_density, random_pure, rng_from, trace_norm

seeds = st.integers(0, 2 ** 32 - 1)


def _spin(j, rho, s=0.0, L=None):
    sys = spin.spin_system(j)
    return spin.evaluate(sys, rho, s, spin.spin_grid(j, L))


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([0.5, 1.0, 2.0]))
def test_purity_and_fidelity_match_traces(seed, j):
    rng = rng_from(seed)
    d = int(2 * j) + 1
    r1, r2 = random_density(d, rng), random_density(d, rng)
    assert metrics.purity(_spin(j, r1)) == pytest.approx(np.trace(r1 @ r1).real, abs=1e-12)
    assert metrics.purity(r1) == pytest.approx(np.trace(r1 @ r1).real)
    f = metrics.fidelity_ps(_spin(j, r1, 0.7), _spin(j, r2, -0.7))
    assert f == pytest.approx(np.trace(r1 @ r2).real, abs=1e-12)


def test_purity_rejects_non_self_dual():
    with pytest.raises(DomainError):
        metrics.purity(_spin(1, np.eye(3) / 3, -1.0))


def test_fidelity_needs_dual_pair():
    with pytest.raises(DomainError):
        metrics.fidelity_ps(_spin(1, np.eye(3) / 3, 0.5), _spin(1, np.eye(3) / 3, 0.5))


def test_lattice_purity_and_fidelity():
    rho = random_density(2, rng_from(2))
    W = wootters.discrete_wigner(rho)
    assert metrics.purity(W) == pytest.approx(np.trace(rho @ rho).real)
    bell = states.bell()
    grid = composite.composite_grid([KernelSpec.wootters()] * 2)
    Wb = composite.composite_evaluate(bell, [KernelSpec.wootters()] * 2, grid, 0.0)
    Ww = composite.composite_evaluate(states.werner(0.6), [KernelSpec.wootters()] * 2, grid, 0.0)
    assert metrics.fidelity_discrete(Ww, Wb) == pytest.approx(0.7)
    with pytest.raises(ValidationError):
        metrics.fidelity_discrete(Wb, Ww)  # mixed target is not unit norm


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_trace_distance_qubit(seed):
    rng = rng_from(seed)
    a, b = random_density(2, rng), random_density(2, rng)
    assert metrics.trace_distance_qubit(a, b) == pytest.approx(0.5 * trace_norm(a - b), abs=1e-12)


def test_trace_distance_rejects_larger_spins():
    with pytest.raises(ValidationError):
        metrics.trace_distance_qubit(_spin(1, np.eye(3) / 3))


def test_pauli_weyl_of_pure_state_is_unit_norm():
    psi = random_pure(8, rng_from(5))
    f = metrics.pauli_weyl(np.outer(psi, psi.conj()))
    assert f.size == 64
    assert np.sum(f ** 2) == pytest.approx(1.0)


def test_dfe_bell_values():
    bell = states.bell()
    f = metrics.pauli_weyl(bell)
    nz = np.abs(f[np.abs(f) > 1e-12])
    assert np.allclose(nz, 0.5)
    run = metrics.dfe_sample(bell, states.maximally_mixed(4), 20_000, seed=1)
    assert abs(run.estimate - 0.25) < 4 * run.stderr
    assert run.to_dict()["normalizer"] == 2.0


def test_dfe_is_reproducible_and_needs_seed():
    bell = states.bell()
    w = states.werner(0.3)
    a = metrics.dfe_sample(bell, w, 1000, seed=9, shots=50)
    b = metrics.dfe_sample(bell, w, 1000, seed=9, shots=50)
    assert a.estimate == b.estimate and np.array_equal(a.indices, b.indices)
    with pytest.raises(ValidationError):
        metrics.dfe_sample(bell, w, 10, seed=None)
    with pytest.raises(ValidationError):
        metrics.dfe_sample(w, bell, 10, seed=1)


def test_negativity_of_spin_up_closed_form():
    # W = (1 + sqrt3 cos t)/2 is negative beyond cos t = -1/sqrt3
    c0 = -1 / math.sqrt(3)
    neg_integral = 0.5 * ((c0 + 1) + math.sqrt(3) / 2 * (c0 ** 2 - 1))
    expect = -neg_integral  # half of int |W| - 1 equals the negative part
    assert metrics.negativity_volume_spin(states.spin_up(), 0.5) == pytest.approx(expect, abs=1e-12)


def test_grid_negativity_is_rough_but_close():
    fine = _spin(0.5, states.spin_up(), L=200)
    assert abs(metrics.negativity_volume(fine) - 0.0773502692) < 2e-3


def test_negativity_vanishes_for_maximally_mixed():
    assert metrics.negativity_volume_spin(np.eye(3) / 3, 1) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5])
def test_wehrl_entropy_of_coherent_states(j):
    sys = spin.spin_system(j)
    g = spin.spin_grid(j, L=160)
    Q = spin.q_function(sys, states.spin_coherent(j, 0.7, 0.3), g)
    assert metrics.wehrl_entropy(Q) == pytest.approx(2 * j / (2 * j + 1), abs=1e-6)


def test_wehrl_of_maximally_mixed_qubit():
    sys = spin.spin_system(0.5)
    Q = spin.q_function(sys, np.eye(2) / 2, spin.spin_grid(0.5))
    assert metrics.wehrl_entropy(Q) == pytest.approx(math.log(2), abs=1e-12)
    with pytest.raises(DomainError):
        metrics.wehrl_entropy(_spin(0.5, np.eye(2) / 2))


@pytest.mark.parametrize("which", ["Jx", "Jy", "Jz"])
def test_centre_of_mass_moments(which):
    sys = spin.spin_system(1.5)
    rho = random_density(4, rng_from(3))
    J = getattr(sys, which)
    assert metrics.expectation_from_moments(_spin(1.5, rho), which) == pytest.approx(
        np.trace(rho @ J).real, abs=1e-12)
