import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import RankDeficiencyError, ValidationError, spin, states, tomography
from phasespace.linalg import random_density, rng_from
from phasespace.quadrature import SphereGrid

seeds = st.integers(0, 2 ** 32 - 1)


@pytest.mark.parametrize("j,size", [(0.5, 16), (1, 36), (1.5, 64), (2, 100)])
def test_net_sizes(j, size):
    net = tomography.reconstruction_net(j)
    assert len(net) == size
    assert net.total_measure == pytest.approx(2 * j + 1)


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([0.5, 1.0, 1.5, 2.0]), st.sampled_from([-1.0, 0.0, 0.5]))
def test_exact_recovery(seed, j, s):
    sys = spin.spin_system(j)
    rho = random_density(sys.dim, rng_from(seed))
    net = tomography.reconstruction_net(j)
    vals = spin.evaluate(sys, rho, s, net, check_degree=False).values
    coeffs, est, rep = tomography.reconstruct_from_grid(j, vals, s, net)
    assert np.abs(est - rho).max() < 1e-10
    assert rep.condition_number < 10
    assert rep.reality_defect < 1e-10
    assert rep.n_points == len(net)


def test_too_few_points_raise():
    net = SphereGrid([0.3, 1.0, 2.0], [0.0, 1.0, 2.0], np.ones(3), 0)
    with pytest.raises(RankDeficiencyError):
        tomography.reconstruct_from_grid(1, np.ones(3), 0.0, net)


def test_degenerate_net_raises():
    # all points on one meridian cannot separate m from -m
    theta = np.linspace(0.2, 3.0, 40)
    net = SphereGrid(theta, np.zeros(40), np.ones(40), 0)
    with pytest.raises(RankDeficiencyError):
        tomography.reconstruct_from_grid(1, np.ones(40), 0.0, net)


def test_projection_pipeline_matches_kernel_evaluation():
    sys = spin.spin_system(1.5)
    rho = random_density(4, rng_from(3))
    for phi, theta in [(0.0, 0.0), (1.2, 0.4), (4.0, 2.9)]:
        rec = tomography.simulate_projections(rho, (phi, theta, 0.0))
        W = tomography.wigner_from_projections(rec)
        g = SphereGrid([theta], [phi], [1.0], 0)
        assert W == pytest.approx(spin.evaluate(sys, rho, 0.0, g, check_degree=False).values[0], abs=1e-12)


def test_projection_shots_are_seeded():
    rho = states.spin_coherent(1, 0.5, 0.2)
    a = tomography.simulate_projections(rho, (0.3, 0.2, 0.0), shots=500, seed=4)
    b = tomography.simulate_projections(rho, (0.3, 0.2, 0.0), shots=500, seed=4)
    assert np.array_equal(a.probabilities, b.probabilities)
    with pytest.raises(ValidationError):
        tomography.simulate_projections(rho, (0.0, 0.0, 0.0), shots=10)


def test_projection_record_validation():
    with pytest.raises(ValidationError):
        tomography.ProjectionRecord((0, 0), [0.7, 0.7])
    with pytest.raises(ValidationError):
        tomography.ProjectionRecord((0, 0), [1.2, -0.2])
    with pytest.raises(ValidationError):
        tomography.wigner_from_projections(tomography.ProjectionRecord((0, 0), [1.0, 0.0]), [1.0, 0.0, 0.0])


def test_harmonic_coefficients_of_constant():
    net = tomography.reconstruction_net(1)
    coeffs, cond, res = tomography.fit_harmonics(1, net.theta, net.phi, np.full(len(net), 0.5))
    assert coeffs[0, 0] == pytest.approx(0.5 * math.sqrt(4 * math.pi))
    assert res < 1e-12
    assert np.allclose(coeffs.evaluate([0.1, 2.0], [0.0, 3.0]), 0.5)
