"""Dense operator helpers: validation, random states, partial traces."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .errors import ValidationError

__all__ = [
    "as_operator", "validate_hermitian", "validate_density", "dag",
    "random_hermitian", "random_density", "random_pure", "random_unitary",
    "ket_to_dm", "partial_trace", "trace_norm", "rng_from",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_TOL = 1e-10


def rng_from(seed) -> np.random.Generator:
    """Counter-based generator (Philox) seeded deterministically."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def as_operator(matrix, dim: int | None = None) -> np.ndarray:
    """Convert to a square complex array, checking the shape."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError("matrix not square")
    if dim is not None and a.shape[0] != dim:
        raise ValidationError(f"dimension mismatch: expected {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def validate_hermitian(matrix, dim: int | None = None, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_operator(matrix, dim)
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise ValidationError("matrix not Hermitian")
    return a


def validate_density(matrix, dim: int | None = None) -> np.ndarray:
    """Check that ``matrix`` is a density operator and return it as an array.

    Raises
    ------
    ValidationError
        Message names the first violated invariant: ``matrix not square``,
        ``matrix not Hermitian``, ``trace not 1`` or
        ``matrix not positive semidefinite``.
    """
    a = validate_hermitian(matrix, dim)
    if abs(np.trace(a) - 1.0) > TRACE_TOL:
        raise ValidationError("trace not 1")
    if np.linalg.eigvalsh(a).min() < -EIG_TOL:
        raise ValidationError("matrix not positive semidefinite")
    return a


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def random_hermitian(dim: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def random_pure(dim: int, rng) -> np.ndarray:
    """Haar-random normalized ket."""
    rng = rng_from(rng)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Ginibre) measure."""
    rng = rng_from(rng)
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(dim, random_state=rng)


def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists subsystem dimensions in Kronecker order.
    """
    dims = list(dims)
    keep = sorted([keep] if np.isscalar(keep) else keep)
    n = len(dims)
    t = np.asarray(rho).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep]))
    return res.reshape(d, d)


def trace_norm(a: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh((a + dag(a)) / 2)).sum())
