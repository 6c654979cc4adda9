"""Library of named states used by the command line and the test suite.

Every builder returns a density matrix. Qubit registers use the ordering
``|0> = |up>`` (``m = +1/2``) and ``|1> = |down>``, matching the spin basis.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from . import hw, spin
from .errors import ValidationError
from .linalg import ket_to_dm

__all__ = ["fock", "coherent", "spin_up", "spin_down", "spin_coherent", "ghz", "w_state",
           "bell", "dicke", "maximally_mixed", "werner", "hybrid_bell", "named_state",
           "BUILTINS"]


def fock(n: int = 0, n_max: int = 40) -> np.ndarray:
    return hw.fock_dm(hw.fock_space(n_max), int(n))


def coherent(alpha=0.0, n_max: int = 40) -> np.ndarray:
    if isinstance(alpha, (list, tuple)):
        alpha = complex(*alpha)
    return ket_to_dm(hw.coherent_ket(hw.fock_space(n_max), complex(alpha)))


def spin_up(j=0.5) -> np.ndarray:
    """``|j, j>``."""
    d = spin.spin_system(j).dim
    out = np.zeros((d, d), dtype=complex)
    out[0, 0] = 1
    return out


def spin_down(j=0.5) -> np.ndarray:
    d = spin.spin_system(j).dim
    out = np.zeros((d, d), dtype=complex)
    out[-1, -1] = 1
    return out


def spin_coherent(j=0.5, theta: float = 0.0, phi: float = 0.0) -> np.ndarray:
    sys = spin.spin_system(j)
    return ket_to_dm(spin.coherent_state(sys, theta, phi))


def _qubits(n) -> int:
    n = int(n)
    if n < 1:
        raise ValidationError("qubit count must be positive")
    return n


def ghz(n: int = 3) -> np.ndarray:
    n = _qubits(n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return ket_to_dm(psi)


def dicke(n: int = 2, k: int = 1) -> np.ndarray:
    """Symmetric state with ``k`` excitations (``|1>`` entries) among ``n`` qubits."""
    n = _qubits(n)
    if not 0 <= int(k) <= n:
        raise ValidationError("excitation number must lie in [0, n]")
    psi = np.zeros(2 ** n, dtype=complex)
    for pos in combinations(range(n), int(k)):
        psi[sum(1 << (n - 1 - p) for p in pos)] = 1
    return ket_to_dm(psi / np.linalg.norm(psi))


def w_state(n: int = 3) -> np.ndarray:
    return dicke(n, 1)


_BELL = {
    "phi+": (0, 3, 1), "phi-": (0, 3, -1),
    "psi+": (1, 2, 1), "psi-": (1, 2, -1),
}


def bell(which: str = "phi+") -> np.ndarray:
    try:
        a, b, sign = _BELL[which]
    except KeyError:
        raise ValidationError(f"unknown Bell state {which!r}; use one of {sorted(_BELL)}") from None
    psi = np.zeros(4, dtype=complex)
    psi[a], psi[b] = 1, sign
    return ket_to_dm(psi / math.sqrt(2))


def maximally_mixed(dim: int = 2) -> np.ndarray:
    return np.eye(int(dim), dtype=complex) / int(dim)


def werner(p: float = 0.5, which: str = "phi+") -> np.ndarray:
    """``p |Bell><Bell| + (1 - p) I/4``."""
    return p * bell(which) + (1 - p) * maximally_mixed(4)


def hybrid_bell(n_max: int = 7) -> np.ndarray:
    """``(|0>|down> + |1>|up>)/sqrt(2)`` on Fock (x) qubit."""
    d = int(n_max) + 1
    psi = np.zeros(2 * d, dtype=complex)
    psi[0 * 2 + 1] = psi[1 * 2 + 0] = 1 / math.sqrt(2)
    return ket_to_dm(psi)


BUILTINS = {
    "fock": fock, "coherent": coherent, "spin_up": spin_up, "spin_down": spin_down,
    "spin_coherent": spin_coherent, "ghz": ghz, "w_state": w_state, "bell": bell,
    "dicke": dicke, "maximally_mixed": maximally_mixed, "werner": werner,
    "hybrid_bell": hybrid_bell,
}


def named_state(kind: str, **params) -> np.ndarray:
    """Build a state from the library by name.

    >>> named_state("bell", which="phi-").shape
    (4, 4)
    """
    try:
        fn = BUILTINS[kind]
    except KeyError:
        raise ValidationError(f"unknown state {kind!r}; known: {sorted(BUILTINS)}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {kind!r}: {exc}") from None
