import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import AliasingError, StepBoundError, ValidationError, moyal, states

GRID = moyal.PhaseGrid.square(8.0, 128)
coeffs = st.floats(-2, 2, allow_nan=False)


def _poly(terms, grid=GRID):
    return moyal.GridFunction.polynomial(grid, terms)


def test_canonical_commutator():
    q, p = _poly({(1, 0): 1.0}), _poly({(0, 1): 1.0})
    prod = moyal.star_product(q, p)
    rev = moyal.star_product(p, q)
    assert prod.poly[(0, 0)] - rev.poly[(0, 0)] == pytest.approx(1j)
    assert np.allclose(moyal.moyal_bracket(q, p).values, 1.0)


def test_bracket_of_quadratics():
    B = moyal.moyal_bracket(_poly({(2, 0): 1.0}), _poly({(0, 2): 1.0}))
    assert B.poly == {(1, 1): 4}


@settings(max_examples=20, deadline=None)
@given(coeffs, coeffs, coeffs)
def test_bracket_reduces_to_poisson_for_quadratic_h(a, b, c):
    # for H of degree <= 2 the Moyal bracket equals the Poisson bracket
    H = _poly({(2, 0): a, (1, 1): b, (0, 2): c})
    F = _poly({(3, 0): 1.0, (1, 2): 1.0})
    B = moyal.moyal_bracket(H, F)
    Q, P = GRID.mesh()
    dHq, dHp = 2 * a * Q + b * P, b * Q + 2 * c * P
    dFq, dFp = 3 * Q ** 2 + P ** 2, 2 * Q * P
    assert np.allclose(B.values, dHq * dFp - dHp * dFq, atol=1e-8)


def test_pure_state_is_idempotent():
    W = moyal.coherent_wigner(GRID, 1.0, -0.5)
    WW = moyal.star_product(W, W)
    assert np.abs(WW.values - W.values).max() < 1e-10
    assert moyal.mass(W) == pytest.approx(1.0)
    assert moyal.purity(W) == pytest.approx(1.0)


def test_grid_star_matches_convolution_form():
    grid = moyal.PhaseGrid.square(6.0, 64)
    A = moyal.coherent_wigner(grid, 0.5, 0.0)
    B = moyal.coherent_wigner(grid, 0.0, 0.5)
    AB = moyal.star_product(A, B)
    q, p = 0.2, -0.1
    i, k = np.argmin(np.abs(grid.q - q)), np.argmin(np.abs(grid.p - p))
    direct = moyal.star_product_convolution(A, B, grid.q[i], grid.p[k])
    assert abs(AB.values[i, k] - direct) < 1e-8


def test_operator_oracle_for_star_product():
    grid = moyal.PhaseGrid.square(8.0, 128)
    a, b = states.coherent(0.4, 40), states.coherent(0.3j, 40)
    A, B = moyal.wigner_from_operator(grid, a), moyal.wigner_from_operator(grid, b)
    # the symbol of a product is the star product of the symbols (Weyl normalization)
    AB = moyal.star_product(A, B)
    sym = moyal.wigner_from_operator(grid, 0.5 * (a @ b + b @ a))
    anti = moyal.wigner_from_operator(grid, (a @ b - b @ a) / 2j)
    assert np.abs(AB.values.real - sym.values).max() < 1e-9
    assert np.abs(AB.values.imag - anti.values).max() < 1e-9


def test_aliasing_is_detected():
    coarse = moyal.PhaseGrid.square(8.0, 32)
    W = moyal.coherent_wigner(coarse, 3.0, 3.0)
    with pytest.raises((AliasingError, ValidationError)):
        moyal.star_product(W, W)


def test_step_bound_enforced():
    H = moyal.harmonic(GRID)
    W = moyal.coherent_wigner(GRID, 1.0, 0.0)
    with pytest.raises(StepBoundError):
        moyal.evolve(W, H, 2 * moyal.step_bound(H), 1)


def test_harmonic_quarter_period():
    H = moyal.harmonic(GRID)
    W0 = moyal.coherent_wigner(GRID, 2.0, 0.0)
    steps = int(math.ceil((math.pi / 2) / (0.9 * moyal.step_bound(H))))
    W = moyal.evolve(W0, H, (math.pi / 2) / steps, steps)
    assert np.abs(W.values - moyal.coherent_wigner(GRID, 0.0, -2.0).values).max() < 1e-6
    assert W.meta["mass_drift"] < 1e-12
    assert W.meta["purity_drift"] < 1e-8


def test_linear_potential_translates_momentum():
    H = moyal.linear(GRID, force=1.0)
    W0 = moyal.coherent_wigner(GRID, 0.0, 1.0)
    t = 1.0
    # advection near the stability bound leaves an RK4 phase error of order 1e-5
    steps = int(math.ceil(t / (0.3 * moyal.step_bound(H))))
    W = moyal.evolve(W0, H, t / steps, steps)
    assert np.abs(W.values - moyal.coherent_wigner(GRID, 0.0, 0.0).values).max() < 1e-6


def test_boundary_check_rejects_wide_states():
    W = moyal.coherent_wigner(GRID, 7.0, 0.0)
    with pytest.raises(AliasingError):
        moyal.evolve(W, moyal.harmonic(GRID), 1e-3, 1)


def test_grid_validation():
    with pytest.raises(ValidationError):
        moyal.PhaseGrid(1.0, -1.0, -1.0, 1.0, 16, 16, 1.0)
