import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import FamilyMismatchError, KernelSpec, ValidationError, composite, hw, spin, states, sun
from phasespace.linalg import random_density, rng_from
from phasespace.spin import EulerPoint

Q = KernelSpec.su2(0.5)
angles = st.tuples(st.floats(0, 2 * math.pi), st.floats(0, math.pi))


@settings(max_examples=20, deadline=None)
@given(angles, angles)
def test_tensor_kernel_is_kronecker_product(a, b):
    K = composite.tensor_kernel([Q, KernelSpec.su2(1)], (EulerPoint(*a), EulerPoint(*b)))
    ref = np.kron(spin.kernel_at(spin.spin_system(0.5), 0.0, (*a, 0.0)),
                  spin.kernel_at(spin.spin_system(1), 0.0, (*b, 0.0)))
    assert np.allclose(K, ref, atol=1e-12)
    assert np.trace(K).real == pytest.approx(1.0)


def test_tensor_kernel_validates_point_count():
    with pytest.raises(ValidationError):
        composite.tensor_kernel([Q, Q], (EulerPoint(0, 0),))


def test_two_qubit_kernel_at_origin():
    K = composite.tensor_kernel([Q, Q], (EulerPoint(0, 0), EulerPoint(0, 0)))
    a, b = (1 + math.sqrt(3)) / 2, (1 - math.sqrt(3)) / 2
    assert np.allclose(np.diag(K).real, [a * a, a * b, a * b, b * b])


@pytest.mark.parametrize("specs", [[Q, Q], [Q, Q, Q], [KernelSpec.su2(1), KernelSpec.wootters()]],
                         ids=["2q", "3q", "spin1-lattice"])
def test_product_grid_round_trip(specs):
    dim = int(np.prod([s.dim for s in specs]))
    rho = random_density(dim, rng_from(dim))
    grid = composite.composite_grid(specs)
    F = composite.composite_evaluate(rho, specs, grid, s=0.0)
    assert F.values.shape == grid.shape
    assert composite.composite_integrate(F.values, grid) == pytest.approx(1.0)
    assert np.allclose(composite.composite_reconstruct(F), rho, atol=1e-12)


def test_mixed_orderings_round_trip():
    specs = [Q, Q]
    rho = random_density(4, rng_from(3))
    grid = composite.composite_grid(specs)
    F = composite.composite_evaluate(rho, specs, grid, s=[-1.0, 1.0])
    assert np.allclose(composite.composite_reconstruct(F), rho, atol=1e-12)


def test_hw_factor_needs_explicit_points():
    with pytest.raises(FamilyMismatchError):
        composite.composite_grid([Q, KernelSpec.hw(5)])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hybrid_kernel_zero_angles_is_sun_parity(n):
    pts = [EulerPoint(0.0, 0.0)] * n
    K = composite.hybrid_multiqubit_kernel(n, pts)
    assert np.allclose(K, sun.parity_sun(sun.generators(2 ** n)), atol=1e-12)


def test_hybrid_single_qubit_matches_sun_kernel():
    phi, theta = 0.8, 1.3
    K = composite.hybrid_multiqubit_kernel(1, [EulerPoint(phi, theta)])
    assert np.allclose(K, sun.kernel_sun(sun.generators(2), 0.0, [phi / 2], [theta / 2]), atol=1e-12)


def test_hybrid_standardization_and_dof():
    est, err = composite.hybrid_standardization(2, samples=40_000, seed=1)
    assert np.all(np.abs(est - np.eye(4)) < 5 * err + 1e-12)
    assert composite.hybrid_dof(4) == {"hybrid": 8, "sun": 30}


def test_ghz_equatorial_slice_formula():
    n = 3
    phi = np.linspace(0, 2 * math.pi, 50)
    F = composite.slice_evaluate(states.ghz(n), [Q] * n, composite.SliceSpec.equatorial(n), phi)
    # at theta = pi/2 the qubit kernel has diagonal 1/2 and coherences -(sqrt 3/2) e^{+-i phi}
    c = -math.sqrt(3) / 2
    expect = 0.5 * (2 * 0.5 ** n + 2 * c ** n * np.cos(n * phi))
    assert np.allclose(F.values, expect, atol=1e-12)


def test_slice_binding_errors():
    with pytest.raises(ValidationError):
        composite.SliceSpec("diagonal")
    slc = composite.SliceSpec.axis_pair()
    with pytest.raises(ValidationError):
        composite.slice_evaluate(states.bell(), [Q, Q], slc, {"theta1": [0.0]})
    with pytest.raises(ValidationError):
        composite.slice_evaluate(states.ghz(3), [Q] * 3, slc, {"theta1": [0.0], "theta2": [0.0]})


def test_equal_angle_slice_of_product_state():
    rho = np.kron(states.spin_up(), states.spin_down())
    g = spin.spin_grid(0.5)
    F = composite.slice_evaluate(rho, [Q, Q], composite.SliceSpec.equal_angle(2), g)
    s = spin.spin_system(0.5)
    a = spin.evaluate(s, states.spin_up(), 0.0, g).values
    b = spin.evaluate(s, states.spin_down(), 0.0, g).values
    assert np.allclose(F.values, a * b)


def test_marginal_paths_agree():
    rho = random_density(6, rng_from(8))
    specs = [Q, KernelSpec.su2(1)]
    g = spin.spin_grid(1)
    M = composite.marginal_wigner(rho, specs, 1, g)
    assert M.meta["path_difference"] < 1e-12
    bell = composite.marginal_wigner(states.bell(), [Q, Q], 0, spin.spin_grid(0.5))
    assert np.allclose(bell.values, 0.5)
    with pytest.raises(IndexError):
        composite.marginal_wigner(rho, specs, 2, g)


def test_hybrid_cv_dv_values():
    space = hw.fock_space(7)
    rho = np.kron(hw.fock_dm(space, 0), np.diag([1.0, 0.0]))
    assert composite.hybrid_cv_dv_point(rho, 0.0, (0.0, 0.0)) == pytest.approx(1 + math.sqrt(3))
    G = composite.hybrid_cv_dv_grid(states.hybrid_bell(7), [0.0, 0.5], spin.spin_grid(0.5))
    assert G.values.shape == (2, len(spin.spin_grid(0.5)))
    assert np.allclose(G.meta["alpha_max"], G.values.max(axis=1))
