"""Product quadrature on the two-sphere."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SphereGrid", "sphere_quadrature"]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Nodes and weights on the sphere.

    Attributes
    ----------
    theta, phi, weights : ndarray
        Flat arrays of equal length. Nodes are ordered theta-major.
    exact_degree : int
        Largest ``L`` such that every ``Y_lm`` with ``l <= L`` is integrated
        exactly.
    shape : tuple of int or None
        ``(n_theta, n_phi)`` for product grids, used to reshape values.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    exact_degree: int
    shape: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen(self.theta))
        object.__setattr__(self, "phi", _frozen(self.phi))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if not (self.theta.shape == self.phi.shape == self.weights.shape):
            raise ValueError("theta, phi and weights must have equal length")

    def __len__(self) -> int:
        return self.theta.size

    @property
    def total_measure(self) -> float:
        return float(self.weights.sum())

    def scaled(self, total: float) -> "SphereGrid":
        """Return the same nodes with weights rescaled to sum to ``total``."""
        w = self.weights * (total / self.weights.sum())
        return SphereGrid(self.theta, self.phi, w, self.exact_degree, self.shape)

    def integrate(self, values) -> complex | float | np.ndarray:
        """Quadrature sum over the leading axis of ``values``."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))


def sphere_quadrature(L: int, total_measure: float = 4.0 * math.pi,
                      n_theta: int | None = None, n_phi: int | None = None) -> SphereGrid:
    """Gauss-Legendre (in cos theta) times uniform-phi product rule.

    Parameters
    ----------
    L : int
        Required exactness degree in spherical harmonics.
    total_measure : float, optional
        Sum of the weights. The default ``4*pi`` is the area of the unit
        sphere; spin-j families use ``2j + 1``.
    n_theta, n_phi : int, optional
        Override the minimal node counts (values below the minimum are
        raised to it).
    """
    L = int(L)
    if L < 0:
        raise ValueError("L must be non-negative")
    nt = max((L + 2) // 2, 1, n_theta or 0)
    nphi = max(L + 1, 1, n_phi or 0)
    x, wx = np.polynomial.legendre.leggauss(nt)
    order = np.argsort(-x)  # ascending theta
    x, wx = x[order], wx[order]
    theta = np.arccos(x)
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(wx, np.full(nphi, 2.0 * math.pi / nphi))
    W *= total_measure / (4.0 * math.pi)
    exact = min(2 * nt - 1, nphi - 1)
    return SphereGrid(T.ravel(), P.ravel(), W.ravel(), exact, (nt, nphi))
