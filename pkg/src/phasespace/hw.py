"""Heisenberg-Weyl (continuous-variable) phase space on a truncated Fock basis.

Points are complex amplitudes ``alpha = (q + i p) / sqrt(2)``; integrals use
the measure ``d^2 alpha / pi = dq dp / (2 pi)``, under which the Wigner
function of any state integrates to one and the vacuum peaks at 2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .errors import TruncationWarning, ValidationError
from .linalg import as_operator, dag, rng_from
from .types import KernelSpec, SampledFunction

__all__ = [
    "FockSpace", "CVPoint", "fock_space", "displacement", "displacements", "parity",
    "wigner", "husimi_q", "glauber_p_char", "characteristic", "ancilla_weyl_protocol",
    "marginal", "kernel_block", "coherent_ket", "fock_dm", "qp_grid", "top_population",
]


class CVPoint(NamedTuple):
    alpha: complex

    @classmethod
    def from_qp(cls, q: float, p: float) -> "CVPoint":
        return cls(complex(q, p) / math.sqrt(2))


@dataclass(frozen=True, eq=False)
class FockSpace:
    n_max: int
    annihilation: np.ndarray
    creation: np.ndarray

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def number(self) -> np.ndarray:
        return np.arange(self.dim)

    def spec(self, s: float = 0.0) -> KernelSpec:
        return KernelSpec.hw(self.n_max, s)


@lru_cache(maxsize=None)
def fock_space(n_max: int = 40) -> FockSpace:
    """Truncated mode with ``n_max + 1`` levels (cached)."""
    n_max = int(n_max)
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)
    ad = a.conj().T.copy()
    a.setflags(write=False)
    ad.setflags(write=False)
    return FockSpace(n_max, a, ad)


def _soft_limit(space: FockSpace) -> float:
    return math.sqrt(space.n_max) / 3


def top_population(space: FockSpace, rho) -> float:
    """Population in the top quarter of the Fock basis."""
    d = space.dim
    return float(np.real(np.trace(np.asarray(rho)[d - d // 4:, d - d // 4:])))


def _check_state(space: FockSpace, rho, stacklevel=3) -> np.ndarray:
    rho = as_operator(rho, space.dim)
    if top_population(space, rho) > 1e-8:
        warnings.warn("state has more than 1e-8 population in the top quarter of the Fock basis",
                      TruncationWarning, stacklevel=stacklevel)
    return rho


def displacement(space: FockSpace, xi: complex, s: float = 0.0) -> np.ndarray:
    """s-ordered displacement ``D_s(xi) = exp(xi a^dag - xi* a) exp(s |xi|^2 / 2)``.

    Dense matrix exponential of the truncated generator. A
    :class:`TruncationWarning` is issued when ``|xi|`` exceeds
    ``sqrt(n_max)/3``.
    """
    xi = complex(xi)
    if abs(xi) > _soft_limit(space):
        warnings.warn(f"|xi|={abs(xi):.3g} exceeds sqrt(n_max)/3; truncation error likely",
                      TruncationWarning, stacklevel=2)
    G = xi * space.creation - np.conj(xi) * space.annihilation
    return expm(G) * math.exp(s * abs(xi) ** 2 / 2)


@lru_cache(maxsize=None)
def _quadrature_eig(n_max: int):
    sp = fock_space(n_max)
    # a^dag - a = i H with H Hermitian
    H = -1j * (sp.creation - sp.annihilation)
    w, v = np.linalg.eigh(H)
    return w, v


def displacements(space: FockSpace, alphas) -> np.ndarray:
    """Batch of ``D(alpha)`` (shape ``(n, d, d)``) from one eigendecomposition.

    ``D(r e^{i t}) = e^{i t N} exp(r (a^dag - a)) e^{-i t N}``.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    w, v = _quadrature_eig(space.n_max)
    r = np.abs(alphas)
    t = np.angle(alphas)
    E = (v[None] * np.exp(1j * r[:, None] * w[None, :])[:, None, :]) @ v.conj().T
    ph = np.exp(1j * t[:, None] * space.number[None, :])
    return ph[:, :, None] * E * ph.conj()[:, None, :]


def parity(space: FockSpace) -> np.ndarray:
    """Displaced-parity kernel at the origin, ``2 (-1)^{a^dag a}``."""
    return np.diag(2.0 * (-1.0) ** space.number).astype(complex)


def _wigner_displaced(space, rho, alphas):
    par = 2.0 * (-1.0) ** space.number
    out = np.empty(alphas.size)
    for start in range(0, alphas.size, 512):
        D = displacements(space, alphas[start:start + 512])
        M = dag(D) @ rho @ D
        out[start:start + 512] = np.real(np.einsum("nkk,k->n", M, par))
    return out


@lru_cache(maxsize=None)
def _log_fact_ratio(d: int) -> np.ndarray:
    n = np.arange(d)
    return 0.5 * (gammaln(n[:, None] + 1) - gammaln(n[None, :] + 1))


def _wigner_laguerre(space, rho, alphas):
    # Tr[|m><n| Pi(alpha)] = 2 (-1)^n sqrt(n!/m!) (2 alpha*)^(m-n) e^{-2|alpha|^2}
    #                        * L_n^{(m-n)}(4|alpha|^2)    for m >= n
    d = space.dim
    x = 4.0 * np.abs(alphas) ** 2
    g = np.exp(-x / 2)
    lr = _log_fact_ratio(d)
    out = np.zeros(alphas.size)
    a2 = 2.0 * np.conj(alphas)
    for k in range(d):  # k = m - n
        if k == 0:
            for n in range(d):
                if rho[n, n] == 0:
                    continue
                out += np.real(rho[n, n]) * 2.0 * (-1) ** n * eval_genlaguerre(n, 0, x) * g
            continue
        powk = a2 ** k
        acc = np.zeros(alphas.size, dtype=complex)
        for n in range(d - k):
            m = n + k
            c = rho[m, n]
            if c == 0:
                continue
            acc += c * (-1) ** n * np.exp(lr[n, m]) * eval_genlaguerre(n, k, x)
        # rho[n, m] terms are the complex conjugates for Hermitian rho
        out += 2.0 * 2.0 * np.real(acc * powk) * g
    return out


def kernel_block(alphas, block: int) -> np.ndarray:
    """Matrix elements ``<m|Pi(alpha)|n>`` for ``m, n < block`` (closed form).

    Uses the Laguerre expression of the displaced parity, which has no
    truncation error. Shape ``(len(alphas), block, block)``.
    """
    alphas = np.asarray(alphas, dtype=complex).ravel()
    x = 4 * np.abs(alphas) ** 2
    g = np.exp(-x / 2)
    out = np.zeros((alphas.size, block, block), dtype=complex)
    for n in range(block):
        for m in range(n, block):
            k = m - n
            val = (2 * (-1) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
                   * (2 * np.conj(alphas)) ** k * eval_genlaguerre(n, k, x) * g)
            # Tr[|m><n| Pi] = <n|Pi|m>
            out[:, n, m] = val
            out[:, m, n] = np.conj(val)
    return out


def wigner(space: FockSpace, rho, points, method: str = "auto") -> SampledFunction:
    """Wigner function ``W(alpha) = Tr[D(alpha)^dag rho D(alpha) Pi]``.

    Parameters
    ----------
    space : FockSpace
    rho : array_like
        Hermitian operator on the truncated space.
    points : array_like of complex
        Phase-space amplitudes ``alpha``.
    method : {"auto", "displaced-parity", "laguerre"}
        ``displaced-parity`` evaluates the defining trace with truncated
        displacements; ``laguerre`` sums the closed-form matrix elements of
        the displaced parity (exact for every Fock component and fast on
        large grids). ``auto`` picks the former up to 4096 points.
    """
    rho = _check_state(space, rho)
    if np.max(np.abs(rho - dag(rho))) > 1e-12:
        raise ValidationError("matrix not Hermitian")
    alphas = np.atleast_1d(np.asarray([complex(p) if not isinstance(p, CVPoint) else p.alpha
                                       for p in np.ravel(points)], dtype=complex))
    if method == "auto":
        method = "displaced-parity" if alphas.size <= 4096 else "laguerre"
    if method == "displaced-parity":
        vals = _wigner_displaced(space, rho, alphas)
    elif method == "laguerre":
        vals = _wigner_laguerre(space, rho, alphas)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SampledFunction(vals, space.spec(0.0), alphas, {"method": method})


def coherent_ket(space: FockSpace, alpha: complex) -> np.ndarray:
    """Coherent state from the analytic Poisson amplitudes (truncated, renormalized)."""
    n = space.number
    logc = -abs(alpha) ** 2 / 2 - 0.5 * gammaln(n + 1)
    with np.errstate(divide="ignore"):
        amp = np.exp(logc) * np.power(complex(alpha), n)
    return amp / np.linalg.norm(amp)


def fock_dm(space: FockSpace, n: int) -> np.ndarray:
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    rho[n, n] = 1
    return rho


def husimi_q(space: FockSpace, rho, alpha) -> float | np.ndarray:
    """Husimi function ``<alpha|rho|alpha>``, with ``|alpha> = D(alpha)|0>``."""
    rho = _check_state(space, rho)
    alphas = np.atleast_1d(np.asarray(alpha, dtype=complex))
    kets = displacements(space, alphas)[:, :, 0]
    vals = np.real(np.einsum("ni,ij,nj->n", kets.conj(), rho, kets))
    return vals if np.ndim(alpha) else float(vals[0])


def characteristic(space: FockSpace, rho, xi: complex, s: float = 0.0) -> complex:
    """s-ordered characteristic function ``Tr[rho D_s(xi)]``."""
    rho = _check_state(space, rho)
    return complex(np.trace(rho @ displacement(space, xi, s)))


def glauber_p_char(space: FockSpace, rho, xi: complex) -> complex:
    """Normally ordered characteristic function (the P-function's Fourier dual)."""
    return characteristic(space, rho, xi, 1.0)


def ancilla_weyl_protocol(space: FockSpace, rho, alpha: complex, shots: int | None = None,
                          seed=None) -> complex:
    """Simulated qubit-assisted measurement of the Weyl function at ``alpha``.

    The ancilla starts in ``|+>``, the joint state evolves under
    ``exp(sigma_z (x) (alpha a^dag - alpha* a) / 2)`` and the ancilla is
    read out in the x and y bases. Returns ``<sigma_x> - i <sigma_y>``,
    which equals ``Tr[rho D(alpha)]``. The other combination,
    ``<sigma_x> + i <sigma_y>``, is its complex conjugate ``Tr[rho D(-alpha)]``.

    With ``shots`` the two expectation values are estimated from that many
    single-shot outcomes each (``seed`` required).
    """
    rho = _check_state(space, rho)
    alpha = complex(alpha)
    sz = np.diag([1.0, -1.0])
    gen = 0.5 * np.kron(sz, alpha * space.creation - np.conj(alpha) * space.annihilation)
    R = expm(gen)
    plus = np.full((2, 2), 0.5)
    tot = R @ np.kron(plus, rho) @ dag(R)
    d = space.dim
    anc = np.array([[np.trace(tot[i * d:(i + 1) * d, k * d:(k + 1) * d]) for k in range(2)]
                    for i in range(2)])
    ex = 2 * np.real(anc[0, 1])
    ey = -2 * np.imag(anc[0, 1])
    if shots is not None:
        if seed is None:
            raise ValidationError("shots mode requires a seed")
        rng = rng_from(seed)
        px = np.clip((1 + ex) / 2, 0, 1)
        py = np.clip((1 + ey) / 2, 0, 1)
        ex = 2 * rng.binomial(int(shots), px) / shots - 1
        ey = 2 * rng.binomial(int(shots), py) / shots - 1
    return complex(ex, -ey)


def qp_grid(n: int = 121, extent: float = 6.0):
    """Uniform square grid; returns ``(q, p, alpha)`` with ``alpha`` shaped ``(n, n)``.

    ``alpha[i, k]`` corresponds to ``(q[i], p[k])``.
    """
    q = np.linspace(-extent, extent, n)
    p = np.linspace(-extent, extent, n)
    Q, P = np.meshgrid(q, p, indexing="ij")
    return q, p, (Q + 1j * P) / math.sqrt(2)


def marginal(W: np.ndarray, q: np.ndarray, p: np.ndarray, axis: str = "q",
             tol: float = 1e-6) -> np.ndarray:
    """Trapezoid marginal of a Wigner function sampled on ``W[i, k] = W(q_i, p_k)``.

    ``axis="q"`` integrates out ``p`` and returns the position density at
    the ``q`` nodes (``|psi(q)|^2`` for pure states); ``axis="p"`` the
    converse. Raises if the function has not decayed at the grid edge.
    """
    W = np.asarray(W, dtype=float)
    if W.shape != (len(q), len(p)):
        raise ValidationError("W must have shape (len(q), len(p))")
    edge = max(np.abs(W[0]).max(), np.abs(W[-1]).max(), np.abs(W[:, 0]).max(), np.abs(W[:, -1]).max())
    if edge > tol * max(np.abs(W).max(), 1e-300):
        raise ValidationError("grid does not cover the support of the state")
    if axis == "q":
        return np.trapezoid(W, p, axis=1) / (2 * math.pi)
    if axis == "p":
        return np.trapezoid(W, q, axis=0) / (2 * math.pi)
    raise ValueError("axis must be 'q' or 'p'")
