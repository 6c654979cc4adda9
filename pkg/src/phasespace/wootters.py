"""Discrete (Wootters) phase space of a single qubit.

Lattice points are pairs ``(z, x)`` with ``z, x in {0, 1}``. Serialized
2x2 arrays are indexed ``[z, x]``. The measure gives each point weight 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .linalg import as_operator
from . import spin

__all__ = [
    "LatticePoint", "DiscreteFunction", "LATTICE", "SIGMA_X", "SIGMA_Y", "SIGMA_Z",
    "phase_point_operator", "feynman_probabilities", "discrete_displacement",
    "discrete_wigner", "discrete_weyl", "weyl_inverse", "wigner_inverse",
    "dft_wigner_weyl", "stratonovich_embedding", "transform_kernel",
    "pauli_eigenstates", "phase_point_operator_from_sphere", "continuous_weyl_angles",
    "VARTHETA", "VARPHI",
]

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _a in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _a.setflags(write=False)

VARTHETA = math.acos(1 / math.sqrt(3))
VARPHI = -math.pi / 4
WEIGHT = 0.5


class LatticePoint(NamedTuple):
    z: int
    x: int


LATTICE = tuple(LatticePoint(z, x) for z in (0, 1) for x in (0, 1))


def _point(p) -> LatticePoint:
    z, x = p
    if z not in (0, 1) or x not in (0, 1):
        raise ValidationError("lattice coordinates must be 0 or 1")
    return LatticePoint(int(z), int(x))


@dataclass(frozen=True, eq=False)
class DiscreteFunction:
    """A function on the 2x2 lattice, ``values[z, x]``.

    ``kind`` is ``"wigner"`` (real, carries ``s``) or ``"weyl"`` (complex in
    general, indexed by the displacement labels).
    """

    values: np.ndarray
    kind: str = "wigner"
    s: float = 0.0

    def __post_init__(self):
        v = np.array(self.values)
        if v.shape != (2, 2):
            raise ValidationError("discrete functions are 2x2 arrays")
        if self.kind not in ("wigner", "weyl"):
            raise ValidationError("kind must be 'wigner' or 'weyl'")
        if self.kind == "wigner":
            if np.max(np.abs(np.imag(v))) > 1e-12:
                raise ValidationError("Wigner values must be real")
            v = np.real(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, p):
        z, x = p
        return self.values[z, x]

    def as_sequence(self):
        """Values in lattice order ``(0,0), (0,1), (1,0), (1,1)``."""
        return [self.values[p] for p in LATTICE]


def phase_point_operator(point, s: float = 0.0) -> np.ndarray:
    """Wootters phase-point operator ``A^(s)(z, x)``.

    ``A^(0)(z,x) = (I + (-1)^z sz + (-1)^x sx + (-1)^(z+x) sy) / 2``; other
    ``s`` scale the traceless part by ``3^(s/2)``.
    """
    z, x = _point(point)
    c = 3.0 ** (s / 2)
    traceless = (-1) ** z * SIGMA_Z + (-1) ** x * SIGMA_X + (-1) ** (z + x) * SIGMA_Y
    return 0.5 * I2 + 0.5 * c * traceless


def transform_kernel(A: np.ndarray, s1: float, s2: float) -> np.ndarray:
    """Move a qubit kernel from ordering ``s1`` to ``s2``.

    ``Pi^(s2) = 3^((s2-s1)/2) Pi^(s1) + (1 - 3^((s2-s1)/2)) I / 2``.
    """
    f = 3.0 ** ((s2 - s1) / 2)
    return f * np.asarray(A) + (1 - f) / 2 * I2


def feynman_probabilities(rho) -> np.ndarray:
    """Joint "probabilities" ``(p++, p+-, p-+, p--)``.

    The first sign refers to sigma_z, the second to sigma_x and sigma_y
    carries their product: ``p_ab = (1 + a<sz> + b<sx> + ab<sy>) / 2``.
    """
    rho = as_operator(rho, 2)
    ez, ex, ey = (np.trace(rho @ P).real for P in (SIGMA_Z, SIGMA_X, SIGMA_Y))
    return np.array([0.5 * (1 + a * ez + b * ex + a * b * ey)
                     for a in (1, -1) for b in (1, -1)])


def discrete_displacement(point) -> np.ndarray:
    """``D2(z, x) = exp(i pi x z / 2) sx^x sz^z``."""
    z, x = _point(point)
    D = np.linalg.matrix_power(SIGMA_X, x) @ np.linalg.matrix_power(SIGMA_Z, z)
    return np.exp(1j * math.pi * x * z / 2) * D


def discrete_wigner(rho, s: float = 0.0) -> DiscreteFunction:
    rho = as_operator(rho, 2)
    vals = np.array([[np.trace(rho @ phase_point_operator((z, x), s)) for x in (0, 1)]
                     for z in (0, 1)])
    return DiscreteFunction(vals.real, "wigner", s)


def wigner_inverse(W: DiscreteFunction) -> np.ndarray:
    """Reverse transform ``rho = (1/2) sum W^(s) A^(-s)``."""
    return sum(WEIGHT * W[p] * phase_point_operator(p, -W.s) for p in LATTICE)


def discrete_weyl(rho) -> DiscreteFunction:
    """Weyl function ``X(z~, x~) = Tr[rho D2(z~, x~)]``."""
    rho = as_operator(rho, 2)
    vals = np.array([[np.trace(rho @ discrete_displacement((z, x))) for x in (0, 1)]
                     for z in (0, 1)])
    return DiscreteFunction(vals, "weyl")


def weyl_inverse(X: DiscreteFunction) -> np.ndarray:
    """``rho = (1/2) sum X(z~, x~) D2(z~, x~)^dagger``.

    Every ``D2`` here is Hermitian, so the adjoint is cosmetic.
    """
    return sum(WEIGHT * X[p] * discrete_displacement(p).conj().T for p in LATTICE)


_SIGNS = np.array([[(-1) ** (z * zt + x * xt) for zt in (0, 1) for xt in (0, 1)]
                   for z in (0, 1) for x in (0, 1)], dtype=float)


def dft_wigner_weyl(f: DiscreteFunction) -> DiscreteFunction:
    """Discrete Fourier transform between the s=0 Wigner and Weyl functions.

    ``W(z, x) = (1/2) sum X(z~, x~) (-1)^(z z~ + x x~)`` and the same
    kernel maps back. Direction follows ``f.kind``.
    """
    v = np.asarray(f.values).reshape(4)
    out = 0.5 * _SIGNS @ v
    if f.kind == "weyl":
        return DiscreteFunction(out.reshape(2, 2), "wigner", 0.0)
    if f.s != 0:
        raise ValidationError("the Fourier pair is defined for the s=0 Wigner function")
    return DiscreteFunction(out.reshape(2, 2).astype(complex), "weyl")


def stratonovich_embedding(point) -> tuple[float, float]:
    """Sphere angles ``(theta, phi)`` at which the SU(2) kernel equals ``A(z, x)``.

    ``theta = vartheta + z pi`` and ``phi = varphi + pi + (2x - z) pi / 2``
    with ``vartheta = arccos(1/sqrt 3)`` and ``varphi = -pi/4``, reduced to
    ``theta in [0, pi]``, ``phi in [0, 2 pi)``.
    """
    z, x = _point(point)
    theta = VARTHETA + z * math.pi
    phi = VARPHI + math.pi + (2 * x - z) * math.pi / 2
    if theta > math.pi:
        theta = 2 * math.pi - theta
        phi += math.pi
    return theta, phi % (2 * math.pi)


def phase_point_operator_from_sphere(point, s: float = 0.0) -> np.ndarray:
    """Second construction: the spin-1/2 kernel at the embedded angles."""
    theta, phi = stratonovich_embedding(point)
    return spin.kernel_at(spin.spin_system(0.5), s, (phi, theta, 0.0))


def pauli_eigenstates() -> dict[str, np.ndarray]:
    """Density matrices of the six Pauli eigenstates."""
    out = {}
    for name, P in (("x", SIGMA_X), ("y", SIGMA_Y), ("z", SIGMA_Z)):
        for sign, tag in ((1, "+"), (-1, "-")):
            out[tag + name] = (I2 + sign * P) / 2
    return out


def continuous_weyl_angles(point) -> tuple[float, float, float]:
    """Euler angles at which ``|X(z~, x~)|^2`` equals the spin-1/2 ``|chi|^2``.

    With the rotation convention of :mod:`phasespace.spin` the Pauli
    operators appear (up to phase) at ``(phi, theta) = (pi, 0)`` for sigma_z,
    ``(pi, pi)`` for sigma_x and ``(0, pi)`` for sigma_y.
    """
    zt, xt = _point(point)
    return ((zt + xt) * math.pi, xt * math.pi, 0.0)
