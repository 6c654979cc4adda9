import numpy as np
import pytest

from phasespace import FamilyMismatchError, GridDegreeError, KernelSpec, SampledFunction, spin, wootters
from phasespace.correspondence import (generalized_fourier, kernel_convolution, reconstruct,
                                       verify_stratonovich_weyl)
from phasespace.linalg import random_density, random_hermitian, rng_from


@pytest.mark.parametrize("spec", [KernelSpec.su2(1.5, 0.4), KernelSpec.wootters(-1), KernelSpec.sun(3, 0.5)],
                         ids=["su2", "wootters", "sun"])
def test_axioms_hold(spec):
    rep = verify_stratonovich_weyl(spec, trials=5, seed=3)
    assert rep.passed
    d = rep.to_dict()
    assert d["passed"] and "wall_time" not in d


def test_hw_axioms_on_truncated_block():
    rep = verify_stratonovich_weyl(KernelSpec.hw(40, 0.0), trials=3, seed=0)
    assert rep.passed, rep.to_dict()


def test_report_is_deterministic():
    a = verify_stratonovich_weyl(KernelSpec.sun(3), seed=4, mode="monte-carlo", samples=20_000)
    b = verify_stratonovich_weyl(KernelSpec.sun(3), seed=4, mode="monte-carlo", samples=20_000)
    assert a.to_dict() == b.to_dict()


def test_wrong_parity_fails_the_check():
    # a Hermitian unit-trace parity that is not the Stratonovich one breaks traciality
    rep = verify_stratonovich_weyl(KernelSpec.su2(1), seed=0, parity=np.diag([1.0, 0.0, 0.0]))
    assert not rep.passed


@pytest.mark.parametrize("j", [0.5, 1, 2])
@pytest.mark.parametrize("s1,s2", [(0.0, -1.0), (1.0, 0.3), (-0.5, 0.5)])
def test_generalized_fourier_matches_direct_evaluation(j, s1, s2):
    sys = spin.spin_system(j)
    g = spin.spin_grid(j)
    rho = random_density(sys.dim, rng_from(1))
    F = spin.evaluate(sys, rho, s1, g)
    G = generalized_fourier(F, KernelSpec.su2(j, s2))
    assert np.allclose(G.values, spin.evaluate(sys, rho, s2, g).values, atol=1e-12)
    assert np.allclose(reconstruct(F), rho, atol=1e-12)


def test_wootters_fourier_and_reconstruct():
    rho = random_density(2, rng_from(2))
    W = wootters.discrete_wigner(rho, 0.0)
    F = SampledFunction(W.values, KernelSpec.wootters(0.0), wootters.LATTICE)
    G = generalized_fourier(F, KernelSpec.wootters(1.0))
    assert np.allclose(G.values, wootters.discrete_wigner(rho, 1.0).values)
    assert np.allclose(reconstruct(G), rho)


def test_kernel_convolution_is_the_operator_product():
    sys = spin.spin_system(1)
    g = spin.spin_grid(1)
    rng = rng_from(6)
    A, B = random_hermitian(3, rng), random_hermitian(3, rng)
    F = spin.evaluate(sys, A, 0.0, g)
    G = spin.evaluate(sys, B, 0.0, g)
    H = kernel_convolution(F, G, -1.0)
    assert np.allclose(H.values, spin.evaluate(sys, A @ B, -1.0, g).values, atol=1e-12)


def test_family_mismatch():
    F = spin.evaluate(spin.spin_system(1), np.eye(3) / 3, 0.0, spin.spin_grid(1))
    with pytest.raises(FamilyMismatchError):
        generalized_fourier(F, KernelSpec.su2(2))


def test_coarse_grid_refused():
    sys = spin.spin_system(2)
    g = spin.spin_grid(2, L=4)
    F = spin.evaluate(sys, np.eye(5) / 5, 0.0, g, check_degree=False)
    with pytest.raises(GridDegreeError):
        reconstruct(F)
