import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import DomainError, KernelSpec, ValidationError
from phasespace.linalg import (partial_trace, random_density, random_unitary, rng_from,
                               trace_norm, validate_density)
from phasespace.quadrature import sphere_quadrature
from phasespace.special import clebsch_gordan, spherical_harmonic, twice

half_integers = st.integers(min_value=0, max_value=8).map(lambda k: k / 2)


class TestClebschGordan:
    def test_known_values(self):
        # two spin-1/2 into a triplet and a singlet
        assert clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == pytest.approx(1 / math.sqrt(2))
        assert clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) == pytest.approx(-1 / math.sqrt(2))
        assert clebsch_gordan(1, 1, 1, -1, 2, 0) == pytest.approx(1 / math.sqrt(6))
        assert clebsch_gordan(1, 0, 1, 0, 1, 0) == pytest.approx(0.0, abs=1e-15)

    def test_selection_rules(self):
        assert clebsch_gordan(1, 1, 1, 1, 2, 1) == 0.0
        assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0

    def test_rejects_bad_projection(self):
        with pytest.raises(DomainError):
            clebsch_gordan(0.5, 1.5, 0.5, 0.5, 1, 2)
        with pytest.raises(DomainError):
            clebsch_gordan(0.3, 0.3, 0.5, 0.5, 1, 1)

    @settings(max_examples=40, deadline=None)
    @given(half_integers, half_integers)
    def test_unitarity(self, j1, j2):
        # sum over J, M of |<j1 m1 j2 m2|J M>|^2 = 1 for each (m1, m2)
        m1, m2 = j1, -j2
        total = 0.0
        J = abs(j1 - j2)
        while J <= j1 + j2 + 1e-9:
            total += clebsch_gordan(j1, m1, j2, m2, J, m1 + m2) ** 2
            J += 1
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_large_arguments_stay_finite(self):
        c = clebsch_gordan(40, 3, 40, -3, 50, 0)
        assert np.isfinite(c) and abs(c) < 1


def test_twice_rejects_non_half_integers():
    assert twice(1.5) == 3
    with pytest.raises(DomainError):
        twice(0.7, "j")


@pytest.mark.parametrize("L", [0, 3, 8])
def test_sphere_quadrature_exact_for_harmonics(L):
    g = sphere_quadrature(L)
    assert g.exact_degree >= L
    for l in range(L + 1):
        for m in range(-l, l + 1):
            val = g.integrate(spherical_harmonic(l, m, g.theta, g.phi))
            expect = math.sqrt(4 * math.pi) if l == 0 else 0.0
            assert abs(val - expect) < 1e-12


def test_spherical_harmonic_orthonormal():
    g = sphere_quadrature(10)
    Y = np.stack([spherical_harmonic(l, m, g.theta, g.phi) for l in range(5) for m in range(-l, l + 1)])
    gram = (Y.conj() * g.weights) @ Y.T
    assert np.allclose(gram, np.eye(len(Y)), atol=1e-12)


class TestDensityValidation:
    def test_accepts_random_states(self):
        rho = random_density(4, rng_from(0))
        assert np.allclose(validate_density(rho), rho)

    def test_messages_name_the_invariant(self):
        with pytest.raises(ValidationError, match="not Hermitian"):
            validate_density(np.array([[1, 1], [0, 0]]))
        with pytest.raises(ValidationError, match="trace"):
            validate_density(np.eye(2))

    def test_negative_eigenvalue(self):
        with pytest.raises(ValidationError):
            validate_density(np.diag([1.5, -0.5]))


def test_partial_trace_of_product():
    rng = rng_from(3)
    a, b = random_density(2, rng), random_density(3, rng)
    ab = np.kron(a, b)
    assert np.allclose(partial_trace(ab, (2, 3), [0]), a)
    assert np.allclose(partial_trace(ab, (2, 3), [1]), b)


def test_trace_norm_is_unitarily_invariant():
    rng = rng_from(4)
    A = random_density(3, rng) - random_density(3, rng)
    U = random_unitary(3, rng)
    assert trace_norm(U @ A @ U.conj().T) == pytest.approx(trace_norm(A))


def test_rng_is_reproducible():
    assert np.array_equal(rng_from(9).random(5), rng_from(9).random(5))


class TestKernelSpec:
    def test_dimensions(self):
        assert KernelSpec.su2(1.5).dim == 4
        assert KernelSpec.wootters().dim == 2
        assert KernelSpec.sun(3).dim == 3
        assert KernelSpec.hw(10).dim == 11

    def test_s_out_of_range(self):
        with pytest.raises(DomainError):
            KernelSpec.su2(1, s=1.5)

    def test_same_family_ignores_s(self):
        assert KernelSpec.su2(1, 0).same_family(KernelSpec.su2(1, -1))
        assert not KernelSpec.su2(1).same_family(KernelSpec.su2(2))
