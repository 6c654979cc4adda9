"""Figures of merit computed from phase-space functions.

Integrals use the quadrature attached to the function's grid: sphere
grids carry their weights, the qubit lattice weighs every point by 1/2,
product grids multiply factor weights, and anything else needs explicit
``weights``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import integrate, optimize

from . import spin, wootters
from .composite import CompositeGrid, _contract, composite_integrate
from .errors import DomainError, FamilyMismatchError, GridDegreeError, ValidationError
from .linalg import as_operator, rng_from, validate_density
from .quadrature import SphereGrid
from .special import twice
from .types import Family, SampledFunction

__all__ = [
    "EstimationRun", "purity", "fidelity_ps", "fidelity_discrete", "pauli_weyl",
    "dfe_sample", "trace_distance_qubit", "negativity_volume", "negativity_volume_spin",
    "wehrl_entropy", "expectation_from_moments",
]

_PAULIS = np.stack([np.eye(2, dtype=complex), wootters.SIGMA_X,
                    wootters.SIGMA_Y, wootters.SIGMA_Z])


def _spin_degree_needed(F: SampledFunction, factor: int) -> None:
    if F.spec.family is Family.SU2 and isinstance(F.grid, SphereGrid):
        need = factor * twice(F.spec.j)
        if F.grid.exact_degree < need:
            raise GridDegreeError(
                f"grid exact to degree {F.grid.exact_degree}; {need} required")


def _values(F) -> np.ndarray:
    return np.asarray(F.values)


def _integrate(F, values, weights=None):
    """Integrate ``values`` sampled on the grid of ``F``."""
    if weights is not None:
        w = np.asarray(weights)
        if w.shape != np.shape(values):
            raise ValidationError("weights must match the sampled values")
        return np.sum(w * values)
    if isinstance(F, wootters.DiscreteFunction):
        return wootters.WEIGHT * np.sum(values)
    grid = F.grid
    if isinstance(grid, SphereGrid):
        return grid.integrate(values)
    if isinstance(grid, CompositeGrid):
        return composite_integrate(values, grid)
    raise ValidationError("this grid carries no quadrature weights; pass weights=")


def purity(F, weights=None) -> float:
    """Purity ``int W^2``, or ``Tr[rho^2]`` when given an operator.

    Parameters
    ----------
    F : SampledFunction, DiscreteFunction or array_like
        An s=0 phase-space function, or a density matrix.
    weights : array_like, optional
        Quadrature weights for grids that do not carry their own.
    """
    if isinstance(F, (SampledFunction, wootters.DiscreteFunction)):
        if F.s != 0:
            raise DomainError("purity needs the self-dual s=0 function")
        if isinstance(F, SampledFunction):
            _spin_degree_needed(F, 2)
        v = _values(F)
        return float(np.real(_integrate(F, np.abs(v) ** 2, weights)))
    rho = as_operator(F)
    return float(np.real(np.trace(rho @ rho)))


def _same_points(F1, F2) -> bool:
    if F1.grid is F2.grid:
        return True
    if isinstance(F1.grid, SphereGrid) and isinstance(F2.grid, SphereGrid):
        return (np.array_equal(F1.grid.theta, F2.grid.theta)
                and np.array_equal(F1.grid.phi, F2.grid.phi)
                and np.array_equal(F1.grid.weights, F2.grid.weights))
    return np.shape(F1.values) == np.shape(F2.values)


def fidelity_ps(F1, F2, weights=None) -> float:
    """Overlap ``int F1^(s) F2^(-s) = Tr[rho1 rho2]`` from a dual pair.

    Examples
    --------
    >>> sys = spin.spin_system(0.5)
    >>> g = spin.spin_grid(0.5)
    >>> up = np.diag([1.0, 0.0])
    >>> round(fidelity_ps(spin.evaluate(sys, up, 0, g), spin.evaluate(sys, up, 0, g)), 12)
    1.0
    """
    if abs(F1.s + F2.s) > 1e-12:
        raise DomainError(f"ordering parameters {F1.s} and {F2.s} are not a dual pair")
    if isinstance(F1, SampledFunction):
        if not isinstance(F2, SampledFunction) or not F1.spec.with_s(0).same_family(F2.spec.with_s(0)):
            raise FamilyMismatchError("both functions must come from the same family")
        if not _same_points(F1, F2):
            raise ValidationError("functions must share one grid")
        _spin_degree_needed(F1, 2)
    return float(np.real(_integrate(F1, _values(F1) * _values(F2), weights)))


def _lattice_weight(values) -> float:
    n4 = np.size(values)
    n = round(math.log(n4, 4))
    if 4 ** n != n4:
        raise ValidationError("discrete functions have 4^n lattice values")
    return 2.0 ** -n


def fidelity_discrete(W2, W1_dual, tol: float = 1e-8) -> float:
    """Lattice sum ``sum_k F2(k) F1~(k)`` with unit-norm functions.

    Inputs are lattice Wigner functions of ``n`` qubits (``4^n`` values,
    measure ``2^-n`` per point), given as ``DiscreteFunction``, composite
    ``SampledFunction`` or plain arrays. Both are rescaled by
    ``sqrt(2^-n)`` so that a pure target has ``sum F1~(k)^2 = 1``; a
    target violating this by more than ``tol`` is rejected.
    """
    v2 = np.real(np.asarray(getattr(W2, "values", W2), dtype=complex)).ravel()
    v1 = np.real(np.asarray(getattr(W1_dual, "values", W1_dual), dtype=complex)).ravel()
    if v1.shape != v2.shape:
        raise ValidationError("functions must be sampled on the same lattice")
    r = math.sqrt(_lattice_weight(v1))
    f1, f2 = r * v1, r * v2
    norm = float(np.sum(f1 ** 2))
    if abs(norm - 1) > tol:
        raise ValidationError(f"target normalization sum F~^2 = {norm:.12g}, expected 1")
    return float(np.sum(f2 * f1))


# ---------------------------------------------------------------------------
# direct fidelity estimation


@dataclass(frozen=True)
class EstimationRun:
    """Result of a sampled fidelity estimate.

    ``stderr`` is the sample standard deviation over ``sqrt(samples)``.
    """

    target: str
    samples: int
    seed: Any
    estimate: float
    stderr: float
    indices: np.ndarray = field(repr=False, compare=False)
    meta: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {"target": self.target, "samples": self.samples, "seed": self.seed,
                "estimate": self.estimate, "stderr": self.stderr, **self.meta}


def pauli_weyl(rho) -> np.ndarray:
    """Normalized Pauli-product expectations ``Tr[rho P_k] / sqrt(2^n)``.

    ``k`` runs over ``4^n`` products in (I, X, Y, Z) digit order, first
    qubit most significant. For a pure state the squares sum to one.
    """
    rho = as_operator(rho)
    D = rho.shape[0]
    n = int(round(math.log2(D)))
    if 2 ** n != D:
        raise ValidationError("dimension is not a power of two")
    vals = _contract(rho, [2] * n, [_PAULIS] * n, shared=False).reshape(-1)
    return np.real(vals) / math.sqrt(D)


def dfe_sample(target, rho_actual, samples: int, seed, *, shots: int | None = None,
               target_name: str | None = None) -> EstimationRun:
    """Estimate ``Tr[rho1 rho2]`` by importance-sampling Pauli settings.

    Index ``k`` is drawn with probability ``F1~(k)^2`` where ``F1~`` are
    the normalized Pauli expectations of the pure target; each draw
    contributes ``X = F2(k) / F1~(k)``.

    Parameters
    ----------
    target : array_like
        Pure target density matrix (or ket).
    rho_actual : array_like
        State whose overlap with the target is estimated.
    samples : int
        Number of sampled settings.
    seed : int or Generator
        Required; the counter-based stream makes runs reproducible.
    shots : int, optional
        If given, ``Tr[rho2 P_k]`` is itself estimated from that many
        +-1 outcomes per sampled setting instead of being exact.
    """
    if seed is None:
        raise ValidationError("a seed is required for sampling")
    t = np.asarray(target, dtype=complex)
    if t.ndim == 1:
        t = np.outer(t, t.conj())
    t = validate_density(t)
    rho2 = as_operator(rho_actual, t.shape[0])
    f1 = pauli_weyl(t)
    pr = f1 ** 2
    if abs(pr.sum() - 1) > 1e-8:
        raise ValidationError("target must be pure (sum of squared Pauli weights is not 1)")
    pr = np.clip(pr, 0, None)
    pr /= pr.sum()
    rng = rng_from(seed)
    idx = rng.choice(pr.size, size=int(samples), p=pr)
    D = t.shape[0]
    exp2 = pauli_weyl(rho2)[idx] * math.sqrt(D)   # Tr[rho2 P_k]
    exp1 = f1[idx] * math.sqrt(D)                 # Tr[rho1 P_k]
    if shots is not None:
        p_plus = np.clip((1 + exp2) / 2, 0, 1)
        exp2 = 2 * rng.binomial(int(shots), p_plus) / int(shots) - 1
        exp2[idx == 0] = 1.0  # identity setting is known exactly
    X = exp2 / exp1
    est = float(np.mean(X))
    se = float(np.std(X, ddof=1) / math.sqrt(X.size)) if X.size > 1 else float("nan")
    name = target_name or f"custom{D}"
    meta = {"normalizer": math.sqrt(D), "shots": shots}
    return EstimationRun(name, int(samples), seed if not isinstance(seed, np.random.Generator) else None,
                         est, se, idx, meta)


# ---------------------------------------------------------------------------
# distances, negativity, entropy, moments


def trace_distance_qubit(a, b=None) -> float:
    """Qubit trace distance ``(1/2)||rho1 - rho2||_1`` from the Wigner function.

    With one argument, ``a`` is the s=0 Wigner function of ``rho1 - rho2``
    on a spin-1/2 grid; the distance is ``sqrt(int W^2 / 2)``. With two
    operators the same formula is applied to their difference on an exact
    grid.
    """
    if b is not None:
        r1 = as_operator(a)
        r2 = as_operator(b)
        if r1.shape != (2, 2) or r2.shape != (2, 2):
            raise ValidationError("trace_distance_qubit is restricted to qubits")
        sys = spin.spin_system(0.5)
        a = spin.evaluate(sys, r1 - r2, 0.0, spin.spin_grid(0.5))
    if not isinstance(a, SampledFunction) or a.spec.family is not Family.SU2 or a.spec.j != 0.5:
        raise ValidationError("trace_distance_qubit is restricted to qubits")
    if a.s != 0:
        raise DomainError("trace distance formula needs the s=0 function")
    _spin_degree_needed(a, 2)
    sq = float(np.real(a.grid.integrate(np.abs(_values(a)) ** 2)))
    return math.sqrt(max(sq, 0.0) / 2)


def negativity_volume(F, weights=None) -> float:
    """Negative volume ``(1/2)(int |W| - 1)`` by quadrature on the sample grid.

    The integrand has kinks along the zero set of ``W``, so product rules
    converge only algebraically there; use
    :func:`negativity_volume_spin` for an accurate spin value.
    """
    if isinstance(F, (SampledFunction, wootters.DiscreteFunction)) and F.s != 0:
        raise DomainError("negativity is defined for the s=0 function")
    v = np.real(_values(F))
    total = float(np.real(_integrate(F, np.abs(v), weights)))
    return 0.5 * (total - 1.0)


def _theta_abs_integral(values_at, deg: int, order: int) -> float:
    """``int_0^pi |w(theta)| sin(theta) dtheta`` with ``w`` split at its roots."""
    probe = np.linspace(0.0, math.pi, 8 * deg + 17)
    w = values_at(probe)
    edges = [0.0]
    for k in range(probe.size - 1):
        if w[k] == 0.0:
            if 0 < k:
                edges.append(probe[k])
        elif w[k] * w[k + 1] < 0:
            edges.append(optimize.brentq(lambda t: float(values_at(np.array([t]))[0]),
                                         probe[k], probe[k + 1], xtol=1e-15, rtol=1e-15))
    edges.append(math.pi)
    x, wx = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * float(np.sum(wx * np.abs(values_at(t)) * np.sin(t)))
    return total


def negativity_volume_spin(rho, j, epsabs: float = 1e-11) -> float:
    """Negative volume of a spin-j Wigner function, accurate to about ``epsabs``.

    For each azimuth the polar integrand is a trigonometric polynomial of
    degree ``2j``; it is split at its sign changes and each piece is
    integrated by Gauss-Legendre. The azimuthal integral is adaptive.

    Examples
    --------
    >>> round(negativity_volume_spin(np.diag([1.0, 0.0]), 0.5), 9)
    0.077350269
    """
    sys = spin.spin_system(j)
    rho = as_operator(rho, sys.dim)
    d = twice(sys.j)
    order = 2 * d + 24

    def inner(phi):
        def values_at(th):
            K = spin.kernels_on_grid(sys, 0.0, th, np.full(np.size(th), phi))
            return np.real(np.einsum("ij,nji->n", rho, K))
        return _theta_abs_integral(values_at, max(d, 1), order)

    with warnings.catch_warnings():
        # roundoff notices appear once the integrand is resolved to machine precision
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        total, _ = integrate.quad(inner, 0.0, 2 * math.pi, epsabs=epsabs, epsrel=1e-12, limit=200)
    return 0.5 * ((2 * sys.j + 1) / (4 * math.pi) * total - 1.0)


def wehrl_entropy(Q, weights=None, tol: float = 1e-10) -> float:
    """Entropy ``-int Q ln Q`` of a Husimi function (natural logarithm).

    Values below ``-tol`` are rejected; ``0 ln 0`` is taken as 0.
    """
    if isinstance(Q, SampledFunction) and Q.s != -1:
        raise DomainError("entropy is defined for the Q function (s = -1)")
    v = np.real(_values(Q))
    if np.any(v < -tol):
        raise DomainError(f"Q function has negative values down to {v.min():.3g}")
    v = np.clip(v, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(v > 0, -v * np.log(np.where(v > 0, v, 1.0)), 0.0)
    return float(np.real(_integrate(Q, h, weights)))


_AXES = {"Jx": 0, "Jy": 1, "Jz": 2, "x": 0, "y": 1, "z": 2}


def expectation_from_moments(F: SampledFunction, which: str) -> float:
    """Angular momentum expectation from the first moment of ``W``.

    ``<J_i> = (2j+1) sqrt(j(j+1)) / (4 pi) int f_i W sin(theta) dtheta dphi``
    where ``f`` is the direction the kernel points along,
    ``(-sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))``.
    """
    if not isinstance(F, SampledFunction) or F.spec.family is not Family.SU2:
        raise FamilyMismatchError("centre-of-mass moments need a spin function")
    if F.s != 0:
        raise DomainError("centre-of-mass formula uses the s=0 function")
    try:
        axis = _AXES[which]
    except KeyError:
        raise ValidationError("which must be one of Jx, Jy, Jz") from None
    grid = F.grid
    if grid.exact_degree < twice(F.spec.j) + 1:
        raise GridDegreeError(f"grid must be exact to degree {twice(F.spec.j) + 1}")
    j = F.spec.j
    f = spin.kernel_direction(grid.theta, grid.phi)[:, axis]
    # grid weights already include the (2j+1)/(4 pi) sin(theta) measure
    return float(math.sqrt(j * (j + 1)) * np.real(grid.integrate(f * _values(F))))
