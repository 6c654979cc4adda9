"""SU(N) phase space in the fundamental representation.

Generators follow the generalized Gell-Mann construction, indexed from 1 as
in the usual SU(2)/SU(3) tables: for each ``a = 2..N`` the block
``(a-1)^2 .. a^2 - 1`` holds, for ``j = 1..a-1``, the symmetric and
antisymmetric generators coupling levels ``j`` and ``a`` followed by the
diagonal generator ``lambda_{a^2-1}``. ``lambda_{(a-1)^2+1}`` is therefore
``i(|a><1| - |1><a|)``.

Integrals over the coherent-state manifold CP^(N-1) carry total measure
``N`` and are evaluated with Haar moments of the coherent projector,
``E[P^{(x)k}] = Sym_k / binom(N+k-1, k)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, FamilyMismatchError, ValidationError
from .linalg import as_operator, dag, rng_from
from .types import Family, KernelSpec, SampledFunction

__all__ = [
    "SUNSystem", "SUNPoint", "generators", "euler_rotation_sun", "coherent_state_sun",
    "coherent_column", "kernel_sun", "kernel_from_state", "parity_sun", "s_transform_sun",
    "generator_weyl", "generator_weyl_inverse", "haar_moment", "moment_integral",
    "random_coherent_states", "n_angles",
]


class SUNPoint(NamedTuple):
    """Euler angles: ``phi`` and ``theta`` of length N(N-1)/2, ``Phi`` of length N-1."""

    phi: tuple
    theta: tuple
    Phi: tuple = ()


@dataclass(frozen=True, eq=False)
class SUNSystem:
    N: int
    generators: tuple
    euler_index_map: tuple  # (outer a, inner b, angle index) in product order

    def lam(self, k: int) -> np.ndarray:
        """Generator ``lambda_k`` for ``1 <= k <= N^2 - 1``."""
        if not 1 <= k <= self.N ** 2 - 1:
            raise DomainError(f"generator index {k} outside 1..{self.N ** 2 - 1}")
        return self.generators[k - 1]

    @property
    def n_pairs(self) -> int:
        return self.N * (self.N - 1) // 2

    def spec(self, s: float = 0.0) -> KernelSpec:
        return KernelSpec.sun(self.N, s)


def n_angles(N: int) -> int:
    """Total Euler angle count ``N(N-1)/2 + N(N-1)/2 + (N-1) = N^2 - 1``."""
    return N * (N - 1) + (N - 1)


@lru_cache(maxsize=None)
def generators(N: int) -> SUNSystem:
    """Generalized Gell-Mann matrices for SU(N), ``Tr[l_k l_m] = 2 delta_km``."""
    N = int(N)
    if not 2 <= N <= 8:
        raise DomainError("N must lie in 2..8")
    gens = []
    for a in range(2, N + 1):
        for j in range(1, a):
            sym = np.zeros((N, N), dtype=complex)
            sym[j - 1, a - 1] = sym[a - 1, j - 1] = 1
            anti = np.zeros((N, N), dtype=complex)
            anti[a - 1, j - 1] = 1j
            anti[j - 1, a - 1] = -1j
            gens += [sym, anti]
        diag = np.zeros(N)
        diag[: a - 1] = math.sqrt(2 / (a * (a - 1)))
        diag[a - 1] = -math.sqrt(2 * (a - 1) / a)
        gens.append(np.diag(diag).astype(complex))
    # block a starts at index (a-1)^2 with sym(1,a); anti(1,a) follows at (a-1)^2 + 1
    ordered = gens
    for g in ordered:
        g.setflags(write=False)
    index_map = []
    count = 0
    for a in range(N, 1, -1):
        for b in range(2, a + 1):
            count += 1
            index_map.append((a, b, count))
    return SUNSystem(N, tuple(ordered), tuple(index_map))


def _jy1(sys: SUNSystem, b: int) -> np.ndarray:
    return sys.lam((b - 1) ** 2 + 1)


def _as_point(sys: SUNSystem, p) -> SUNPoint:
    if isinstance(p, SUNPoint):
        phi, theta, Phi = p
    else:
        phi, theta, *rest = p
        Phi = rest[0] if rest else ()
    npairs = sys.n_pairs
    phi = np.asarray(phi, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float).ravel()
    Phi = np.asarray(Phi, dtype=float).ravel()
    if phi.size != theta.size:
        raise ValidationError("phi and theta must have equal length")
    if phi.size > npairs:
        raise ValidationError(f"at most {npairs} (phi, theta) pairs for N={sys.N}")
    if Phi.size > sys.N - 1:
        raise ValidationError(f"at most {sys.N - 1} Phi angles for N={sys.N}")
    # shorter vectors are padded with zeros (unused angles)
    phi = np.pad(phi, (0, npairs - phi.size))
    theta = np.pad(theta, (0, npairs - theta.size))
    Phi = np.pad(Phi, (0, sys.N - 1 - Phi.size))
    return SUNPoint(tuple(phi), tuple(theta), tuple(Phi))


def euler_rotation_sun(sys: SUNSystem, p) -> np.ndarray:
    """SU(N) Euler rotation ``R(phi, theta) S(Phi)``.

    ``R`` is the ordered product over ``a = N..2`` and ``b = 2..a`` of
    ``exp(i lambda_3 phi_i) exp(i lambda_{(b-1)^2+1} theta_i)`` with the
    angle index ``i`` running consecutively (see ``sys.euler_index_map``);
    ``S`` is the product of ``exp(i lambda_{(c+1)^2-1} Phi_c)``.

    For N = 2 this is the spin-1/2 rotation at doubled angles, since the
    generators are Pauli matrices rather than spin-1/2 operators.
    """
    phi, theta, Phi = _as_point(sys, p)
    U = np.eye(sys.N, dtype=complex)
    l3 = np.real(np.diag(sys.lam(3)))
    for a, b, i in sys.euler_index_map:
        U = U * np.exp(1j * l3 * phi[i - 1])[None, :]
        U = U @ expm(1j * theta[i - 1] * _jy1(sys, b))
    for c in range(1, sys.N):
        U = U * np.exp(1j * np.real(np.diag(sys.lam((c + 1) ** 2 - 1))) * Phi[c - 1])[None, :]
    return U


def coherent_state_sun(sys: SUNSystem, phi, theta) -> np.ndarray:
    """Coherent ket: the rotation applied to the lowest-weight vector ``|N>``."""
    U = euler_rotation_sun(sys, (phi, theta))
    return U[:, -1].copy()


def coherent_column(sys: SUNSystem, phi, theta) -> np.ndarray:
    """Closed-form coherent ket (valid for N >= 3, up to a global phase).

    Depends only on the first N-1 (phi, theta) pairs.
    """
    N = sys.N
    if N < 3:
        raise DomainError("the closed-form column assumes N >= 3 (lambda_3 annihilates |N>)")
    ph, th, _ = _as_point(sys, (phi, theta))
    ph = np.array(ph[: N - 1])
    th = np.array(th[: N - 1])
    out = np.zeros(N, dtype=complex)
    # component 1: exp(i sum phi) prod_{k<N-1} cos(theta_k) sin(theta_{N-1})
    out[0] = np.exp(1j * ph.sum()) * np.prod(np.cos(th[: N - 2])) * np.sin(th[N - 2])
    # component 2: -exp(i(-phi_1 + phi_2 + ...)) sin(theta_1) prod cos ... sin(theta_{N-1})
    out[1] = (-np.exp(1j * (-ph[0] + ph[1:].sum())) * np.sin(th[0])
              * np.prod(np.cos(th[1: N - 2])) * np.sin(th[N - 2]))
    # components r = 3..N-1: -exp(i sum_{k>=r} phi_k) sin(theta_{r-1}) prod cos ... sin(theta_{N-1})
    for r in range(3, N):
        out[r - 1] = (-np.exp(1j * ph[r - 1:].sum()) * np.sin(th[r - 2])
                      * np.prod(np.cos(th[r - 1: N - 2])) * np.sin(th[N - 2]))
    out[N - 1] = np.cos(th[N - 2])
    return out


def parity_sun(sys: SUNSystem) -> np.ndarray:
    """``(I - sqrt((N-1)N(N+1)/2) lambda_{N^2-1}) / N``."""
    N = sys.N
    c = math.sqrt((N - 1) * N * (N + 1) / 2)
    return (np.eye(N) - c * sys.lam(N * N - 1)) / N


def _kernel_coeff(N: int, s: float) -> float:
    if not -1 <= s <= 1:
        raise DomainError("s must lie in [-1, 1]")
    return (N + 1) ** ((1 + s) / 2)


def kernel_from_state(sys: SUNSystem, s: float, ket) -> np.ndarray:
    """Kernel ``I/N + c_s/2 sum_k <ket|l_k|ket> l_k`` for an arbitrary unit ket."""
    ket = np.asarray(ket, dtype=complex)
    c = _kernel_coeff(sys.N, s)
    out = np.eye(sys.N, dtype=complex) / sys.N
    for g in sys.generators:
        out = out + (c / 2) * np.real(ket.conj() @ g @ ket) * g
    return out


def kernel_sun(sys: SUNSystem, s: float, phi, theta) -> np.ndarray:
    """s-parameterized SU(N) kernel at the coherent point ``(phi, theta)``."""
    return kernel_from_state(sys, s, coherent_state_sun(sys, phi, theta))


def s_transform_sun(F: SampledFunction, s_to: float) -> SampledFunction:
    """Change the ordering of an SU(N) phase-space function pointwise.

    ``F^(s_to) = 1/N + (N+1)^((s_to - s)/2) (F^(s) - 1/N)``.
    """
    if F.spec.family is not Family.SUN:
        raise FamilyMismatchError("s_transform_sun needs an SU(N) function")
    N = F.spec.N
    f = (N + 1) ** ((s_to - F.s) / 2)
    vals = 1 / N + f * (np.asarray(F.values) - 1 / N)
    return SampledFunction(vals, F.spec.with_s(s_to), F.grid, dict(F.meta))


def generator_weyl(sys: SUNSystem, rho) -> np.ndarray:
    """``(Tr rho, Tr[rho l_1], ..., Tr[rho l_{N^2-1}])``."""
    rho = as_operator(rho, sys.N)
    vals = [np.trace(rho)] + [np.trace(rho @ g) for g in sys.generators]
    vals = np.array(vals)
    return vals.real if np.allclose(rho, dag(rho), atol=1e-12) else vals


def generator_weyl_inverse(sys: SUNSystem, chi) -> np.ndarray:
    """``rho = chi_0 I/N + (1/2) sum chi_k l_k``."""
    chi = np.asarray(chi)
    if chi.size != sys.N ** 2:
        raise ValidationError(f"expected {sys.N ** 2} coefficients")
    out = chi[0] * np.eye(sys.N, dtype=complex) / sys.N
    for c, g in zip(chi[1:], sys.generators):
        out = out + 0.5 * c * g
    return out


@lru_cache(maxsize=None)
def _sym_projector(N: int, k: int) -> np.ndarray:
    d = N ** k
    P = np.zeros((d, d))
    for perm in itertools.permutations(range(k)):
        # operator permuting tensor factors
        T = np.eye(d).reshape([N] * k + [d])
        T = np.transpose(T, list(perm) + [k]).reshape(d, d)
        P += T
    P /= math.factorial(k)
    P.setflags(write=False)
    return P


def haar_moment(N: int, k: int) -> np.ndarray:
    """``E[(|psi><psi|)^{(x)k}]`` over Haar-random unit kets in C^N."""
    return _sym_projector(N, k) / math.comb(N + k - 1, k)


def moment_integral(N: int, ops: Sequence[np.ndarray]) -> complex:
    """``int prod_i Tr[X_i P(Omega)] dOmega`` with total measure N, exactly."""
    X = np.array([[1.0]])
    for op in ops:
        X = np.kron(X, op)
    return N * np.trace(X @ haar_moment(N, len(ops)))


def random_coherent_states(N: int, n: int, rng) -> np.ndarray:
    """``n`` Haar-distributed unit kets (rows), i.e. uniform points on CP^(N-1)."""
    rng = rng_from(rng)
    v = rng.normal(size=(n, N)) + 1j * rng.normal(size=(n, N))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sun_random_unitary(N: int, rng) -> np.ndarray:
    """Haar-random element of SU(N)."""
    from .linalg import random_unitary

    U = random_unitary(N, rng)
    return U / np.linalg.det(U) ** (1 / N)
