"""Stratonovich phase space of a spin-j system.

Basis ordering is descending magnetic quantum number, ``|j,j>, ..., |j,-j>``.
Rotations are ``U = exp(i phi Jz) exp(i theta Jy) exp(i Phi Jz)``, so the
kernel ``U Pi U^dagger`` points along

    n(theta, phi) = (-sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)),

which puts sigma_x, sigma_y, sigma_z at (theta, phi) = (-pi/2, 0),
(-pi/2, -pi/2) and (0, 0) respectively.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import ConditioningWarning, DomainError, GridDegreeError
from .linalg import as_operator, dag, validate_density
from .quadrature import SphereGrid, sphere_quadrature
from .special import clebsch_gordan, spherical_harmonic, twice
from .types import KernelSpec, SampledFunction

__all__ = [
    "SpinSystem", "EulerPoint", "spin_system", "euler_rotation", "multipole",
    "parity_s", "kernel_at", "kernels_on_grid", "kernel_direction", "coherent_state",
    "evaluate", "q_function", "p_reconstruct", "weyl", "spin_grid",
]


class EulerPoint(NamedTuple):
    """Euler angles ``(phi, theta, Phi)`` in radians."""

    phi: float
    theta: float
    Phi: float = 0.0


@dataclass(frozen=True, eq=False)
class SpinSystem:
    j: float
    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray

    @property
    def dim(self) -> int:
        return self.Jz.shape[0]

    @property
    def m(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order (descending)."""
        return np.real(np.diag(self.Jz))

    @property
    def total_measure(self) -> float:
        return 2 * self.j + 1

    def spec(self, s: float = 0.0) -> KernelSpec:
        return KernelSpec.su2(self.j, s)


@lru_cache(maxsize=None)
def _spin_system(d: int) -> SpinSystem:
    j = d / 2
    m = j - np.arange(d + 1)
    # <j, m+1 | J+ | j, m> = sqrt(j(j+1) - m(m+1)); row index of m+1 is one less
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    jm = jp.conj().T
    ops = [(jp + jm) / 2, (jp - jm) / 2j, np.diag(m).astype(complex)]
    for o in ops:
        o.setflags(write=False)
    return SpinSystem(j, *ops)


def spin_system(j) -> SpinSystem:
    """Angular momentum matrices for spin ``j`` (cached)."""
    d = twice(j, "j")
    if d < 0:
        raise DomainError("j must be non-negative")
    return _spin_system(d)


@lru_cache(maxsize=None)
def _jy_eig(d: int):
    w, v = np.linalg.eigh(_spin_system(d).Jy)
    return w, v


def _small_d(sys: SpinSystem, theta) -> np.ndarray:
    """Batch of ``exp(i theta Jy)`` for an array of angles (last two axes)."""
    w, v = _jy_eig(twice(sys.j))
    theta = np.asarray(theta, dtype=float)
    ph = np.exp(1j * theta[..., None] * w)
    return (v * ph[..., None, :]) @ v.conj().T


def euler_rotation(sys: SpinSystem, p) -> np.ndarray:
    """Rotation operator ``exp(i phi Jz) exp(i theta Jy) exp(i Phi Jz)``."""
    phi, theta, Phi = EulerPoint(*p)
    m = sys.m
    return (np.exp(1j * phi * m)[:, None] * expm(1j * theta * sys.Jy)) * np.exp(1j * Phi * m)[None, :]


def multipole(sys: SpinSystem, l: int, m: int) -> np.ndarray:
    """Fano multipole operator ``T_lm`` (orthonormal in the trace inner product)."""
    j = sys.j
    if int(l) != l or not 0 <= l <= 2 * j:
        raise DomainError("multipole rank must satisfy 0 <= l <= 2j")
    if int(m) != m or abs(m) > l:
        raise DomainError("|m| must not exceed l")
    ms = sys.m
    T = np.zeros((sys.dim, sys.dim), dtype=complex)
    for c, mp in enumerate(ms):
        n = mp + m
        if abs(n) > j:
            continue
        r = int(round(j - n))
        T[r, c] = clebsch_gordan(j, mp, l, m, j, n)
    return math.sqrt((2 * l + 1) / (2 * j + 1)) * T


@lru_cache(maxsize=None)
def _parity_diag(d: int, s: float) -> np.ndarray:
    j = d / 2
    ms = j - np.arange(d + 1)
    diag = np.zeros(d + 1)
    for l in range(d + 1):
        top = clebsch_gordan(j, j, l, 0, j, j)
        coef = (2 * l + 1) / (2 * j + 1) * top ** (-s)
        if abs(coef) > 1e12:
            warnings.warn(f"parity coefficient {coef:.3g} at l={l} is ill-conditioned",
                          ConditioningWarning, stacklevel=3)
        diag += coef * np.array([clebsch_gordan(j, n, l, 0, j, n) for n in ms])
    diag.setflags(write=False)
    return diag


def parity_s(sys: SpinSystem, s: float = 0.0) -> np.ndarray:
    """Generalized s-parameterized parity (diagonal in the Jz basis).

    Parameters
    ----------
    sys : SpinSystem
    s : float
        Ordering parameter; -1 gives the Q kernel ``|j,j><j,j|``, 0 the
        Wigner kernel and +1 the P kernel.
    """
    if not -1 <= s <= 1:
        raise DomainError("s must lie in [-1, 1]")
    return np.diag(_parity_diag(twice(sys.j), float(s))).astype(complex)


def kernel_at(sys: SpinSystem, s: float, p) -> np.ndarray:
    """Kernel ``U(p) Pi^(s) U(p)^dagger``; independent of the third angle."""
    U = euler_rotation(sys, p)
    return U @ parity_s(sys, s) @ dag(U)


def kernels_on_grid(sys: SpinSystem, s: float, theta, phi) -> np.ndarray:
    """Stack of kernels, shape ``(npoints, d, d)``, for flat angle arrays."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    dmat = _small_d(sys, theta)
    ph = np.exp(1j * phi[:, None] * sys.m[None, :])
    U = ph[:, :, None] * dmat
    par = _parity_diag(twice(sys.j), float(s))
    return (U * par[None, None, :]) @ dag(U)


def kernel_direction(theta, phi) -> np.ndarray:
    """Unit Bloch vector the kernel at ``(theta, phi)`` points along."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([-np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta)], axis=-1)


def coherent_state(sys: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """Spin coherent ket ``U(phi, theta, 0)|j, j>``."""
    return euler_rotation(sys, (phi, theta, 0.0))[:, 0]


def spin_grid(j, L: int | None = None, **kw) -> SphereGrid:
    """Product grid with the spin-j measure, exact to degree ``4j`` by default."""
    d = twice(j, "j")
    return sphere_quadrature(2 * d if L is None else L, total_measure=d + 1.0, **kw)


def _check_grid(sys: SpinSystem, grid: SphereGrid, need: int):
    if grid.exact_degree < need:
        raise GridDegreeError(
            f"grid exact to degree {grid.exact_degree}, at least {need} required for j={sys.j}")


def evaluate(sys: SpinSystem, rho, s: float, grid: SphereGrid, check_degree: bool = True) -> SampledFunction:
    """Phase-space function ``F(theta, phi) = Tr[rho Pi^(s)(theta, phi)]`` on a grid.

    ``rho`` may be any operator of matching dimension; the output is real
    for Hermitian input. With ``check_degree`` the grid must be exact to
    degree ``4j`` so that products of two such functions integrate exactly.
    """
    rho = as_operator(rho, sys.dim)
    if check_degree:
        _check_grid(sys, grid, twice(sys.j) * 2)
    K = kernels_on_grid(sys, s, grid.theta, grid.phi)
    vals = np.einsum("ij,nji->n", rho, K)
    if np.allclose(rho, rho.conj().T, atol=1e-12):
        vals = vals.real
    return SampledFunction(vals, sys.spec(s), grid)


def q_function(sys: SpinSystem, rho, grid: SphereGrid) -> SampledFunction:
    """Husimi function ``<Omega|rho|Omega>`` (the s = -1 member)."""
    rho = as_operator(rho, sys.dim)
    dmat = _small_d(sys, grid.theta)
    ph = np.exp(1j * np.asarray(grid.phi)[:, None] * sys.m[None, :])
    kets = ph * dmat[:, :, 0]
    vals = np.einsum("ni,ij,nj->n", kets.conj(), rho, kets)
    if np.allclose(rho, rho.conj().T, atol=1e-12):
        vals = vals.real
    return SampledFunction(vals, sys.spec(-1.0), grid)


def p_reconstruct(sys: SpinSystem, rho, grid: SphereGrid | None = None) -> SampledFunction:
    """P function satisfying ``rho = int P(Omega) |Omega><Omega| dOmega``.

    ``P`` is expanded in spherical harmonics with ``l <= 2j``; the map
    from coefficients to the operator is computed by exact quadrature and
    inverted by least squares (it is diagonal in the multipole basis).
    """
    rho = as_operator(rho, sys.dim)
    d = twice(sys.j)
    fine = spin_grid(sys.j)
    dmat = _small_d(sys, fine.theta)
    ph = np.exp(1j * fine.phi[:, None] * sys.m[None, :])
    kets = ph * dmat[:, :, 0]
    proj = np.einsum("ni,nj->nij", kets, kets.conj())
    lm = [(l, m) for l in range(d + 1) for m in range(-l, l + 1)]
    Y = np.stack([spherical_harmonic(l, m, fine.theta, fine.phi) for l, m in lm], axis=1)
    cols = np.einsum("n,nk,nij->kij", fine.weights, Y, proj).reshape(len(lm), -1).T
    coef, *_ = np.linalg.lstsq(cols, rho.ravel(), rcond=None)
    grid = fine if grid is None else grid
    Yg = np.stack([spherical_harmonic(l, m, grid.theta, grid.phi) for l, m in lm], axis=1)
    vals = Yg @ coef
    if np.allclose(rho, rho.conj().T, atol=1e-12):
        vals = vals.real
    return SampledFunction(vals, sys.spec(1.0), grid, {"coefficients": dict(zip(lm, coef))})


def weyl(sys: SpinSystem, rho, p) -> complex:
    """Three-angle Weyl function ``Tr[rho U(phi, theta, Phi)]``."""
    rho = as_operator(rho, sys.dim)
    return complex(np.trace(rho @ euler_rotation(sys, p)))
