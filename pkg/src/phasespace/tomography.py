"""Spin-state reconstruction from projective measurements and sampled functions.

Two pipelines live here. The first turns the outcome distribution of a
rotated ``J_z`` measurement into a phase-space value at the rotation
angles. The second fits spherical harmonics with ``l <= 2j`` to samples of
an s-ordered function on a finite net and rebuilds the density operator
with the dual kernel.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import spin
from .errors import DomainError, RankDeficiencyError, ValidationError
from .linalg import as_operator, dag, rng_from
from .quadrature import SphereGrid
from .special import spherical_harmonic, twice

__all__ = ["ProjectionRecord", "HarmonicCoefficients", "ReconstructionReport",
           "simulate_projections", "wigner_from_projections", "reconstruction_net",
           "fit_harmonics", "reconstruct_from_grid"]

log = logging.getLogger(__name__)

RIDGE = 1e-12
COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class ProjectionRecord:
    """Outcome probabilities of a ``J_z`` measurement after a rotation.

    ``probabilities[k]`` belongs to ``m = j - k``. With ``shots`` the
    probabilities are relative frequencies.
    """

    setting: spin.EulerPoint
    probabilities: np.ndarray
    shots: int | None = None

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValidationError("probabilities must be a vector of length 2j+1 >= 2")
        if np.any(p < -1e-12):
            raise ValidationError("probabilities must be non-negative")
        if self.shots is None:
            tol = 1e-9
        else:
            tol = max(3.0 / math.sqrt(self.shots), 1e-9)
        if abs(p.sum() - 1) > tol:
            raise ValidationError(f"probabilities sum to {p.sum():.12g}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "setting", spin.EulerPoint(*self.setting))

    @property
    def j(self) -> float:
        return (self.probabilities.size - 1) / 2


def simulate_projections(rho, setting, shots: int | None = None, seed=None) -> ProjectionRecord:
    """Probabilities ``diag(U^dagger rho U)`` for the rotation ``U(setting)``.

    In shot mode the record holds multinomial frequencies drawn from the
    exact distribution with a seeded generator.
    """
    rho = as_operator(rho)
    d = rho.shape[0]
    sys = spin.spin_system((d - 1) / 2)
    U = spin.euler_rotation(sys, setting)
    p = np.clip(np.real(np.diag(dag(U) @ rho @ U)), 0.0, None)
    p /= p.sum()
    if shots is None:
        return ProjectionRecord(setting, p)
    if seed is None:
        raise ValidationError("a seed is required in shot mode")
    counts = rng_from(seed).multinomial(int(shots), p)
    return ProjectionRecord(setting, counts / int(shots), int(shots))


def wigner_from_projections(rec: ProjectionRecord, parity_diag=None) -> float:
    """Phase-space value ``sum_m p_m [Pi]_mm`` at the record's rotation.

    ``parity_diag`` defaults to the s=0 parity of the matching spin; any
    other generalized parity diagonal may be supplied.

    Examples
    --------
    >>> rec = ProjectionRecord((0, 0), [1.0, 0.0])
    >>> round(wigner_from_projections(rec), 5)
    1.36603
    """
    if parity_diag is None:
        parity_diag = np.real(np.diag(spin.parity_s(spin.spin_system(rec.j), 0.0)))
    parity_diag = np.asarray(parity_diag, dtype=float)
    if parity_diag.shape != rec.probabilities.shape:
        raise ValidationError(
            f"parity has {parity_diag.size} entries, record has {rec.probabilities.size}")
    return float(rec.probabilities @ parity_diag)


@dataclass(frozen=True, eq=False)
class HarmonicCoefficients:
    """Coefficients ``c_lm`` of ``F = sum c_lm Y_lm`` for ``l <= 2j``."""

    j: float
    values: np.ndarray  # ordered (0,0), (1,-1), (1,0), (1,1), ...

    @staticmethod
    def index(j) -> list[tuple[int, int]]:
        d = twice(j)
        return [(l, m) for l in range(d + 1) for m in range(-l, l + 1)]

    def __getitem__(self, lm) -> complex:
        l, m = lm
        return complex(self.values[l * l + l + m])

    def as_dict(self) -> dict:
        return {lm: complex(c) for lm, c in zip(self.index(self.j), self.values)}

    def reality_defect(self) -> float:
        """``max |c_{l,-m} - (-1)^m conj(c_lm)|``; zero for real functions."""
        worst = 0.0
        for l, m in self.index(self.j):
            worst = max(worst, float(abs(self[l, -m] - (-1) ** m * np.conj(self[l, m]))))
        return worst

    def evaluate(self, theta, phi) -> np.ndarray:
        Y = _design(self.j, theta, phi)
        return Y @ self.values


@dataclass(frozen=True)
class ReconstructionReport:
    n_points: int
    condition_number: float
    fit_residual: float
    hermiticity_residual: float
    trace_correction: float
    reality_defect: float
    s: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("n_points", "condition_number", "fit_residual",
                                             "hermiticity_residual", "trace_correction",
                                             "reality_defect", "s")}
        out.update(self.extra)
        return out


def reconstruction_net(j) -> SphereGrid:
    """The uniform ``(4j+2)^2`` net.

    ``theta_a = a pi/(4j+2)`` for ``a = 1..4j+2`` and
    ``phi_b = 2 b pi/(4j+2)`` for ``b = 0..4j+1``. The weights are uniform
    and only integrate constants exactly; the net is meant for fitting.
    """
    n = 2 * twice(j, "j") + 2
    a = np.arange(1, n + 1)
    b = np.arange(n)
    T, P = np.meshgrid(a * math.pi / n, 2 * b * math.pi / n, indexing="ij")
    total = twice(j) + 1.0
    return SphereGrid(T.ravel(), P.ravel(), np.full(n * n, total / (n * n)), 0, (n, n))


def _design(j, theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    return np.stack([spherical_harmonic(l, m, theta, phi)
                     for l, m in HarmonicCoefficients.index(j)], axis=1)


def fit_harmonics(j, theta, phi, values, ridge: float = RIDGE):
    """Least-squares ``c_lm`` through normal equations with a small ridge.

    Returns
    -------
    coefficients : HarmonicCoefficients
    condition_number : float
        Of the design matrix.
    residual : float
        Root-mean-square fit residual.
    """
    Y = _design(j, theta, phi)
    v = np.asarray(values, dtype=complex).ravel()
    if v.size != Y.shape[0]:
        raise ValidationError("one sample value per net point is required")
    sv = np.linalg.svd(Y, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if Y.shape[0] < Y.shape[1] or cond > COND_LIMIT:
        raise RankDeficiencyError(
            f"net of {Y.shape[0]} points cannot determine {Y.shape[1]} coefficients "
            f"(condition number {cond:.3g})")
    A = dag(Y) @ Y
    A += ridge * np.eye(A.shape[0])
    c = np.linalg.solve(A, dag(Y) @ v)
    res = float(np.sqrt(np.mean(np.abs(Y @ c - v) ** 2)))
    return HarmonicCoefficients(twice(j) / 2, c), cond, res


def reconstruct_from_grid(j, samples, s: float = 0.0, net: SphereGrid | None = None):
    """Density operator from samples of its s-ordered function on a net.

    Parameters
    ----------
    j : float
        Spin.
    samples : array_like
        Function values at the net points (net order).
    s : float
        Ordering of the sampled function; the dual kernel ``Pi^(-s)``
        rebuilds the operator.
    net : SphereGrid, optional
        Sample locations; defaults to :func:`reconstruction_net`.

    Returns
    -------
    coefficients : HarmonicCoefficients
    rho : ndarray
        Hermitized, unit-trace estimate.
    report : ReconstructionReport
    """
    if not -1 <= s <= 1:
        raise DomainError("s must lie in [-1, 1]")
    sys = spin.spin_system(j)
    net = reconstruction_net(j) if net is None else net
    coeffs, cond, res = fit_harmonics(sys.j, net.theta, net.phi, samples)
    exact = spin.spin_grid(sys.j)
    F = coeffs.evaluate(exact.theta, exact.phi)
    K = spin.kernels_on_grid(sys, -s, exact.theta, exact.phi)
    rho = np.einsum("n,n,nij->ij", exact.weights, F, K)
    herm = float(np.max(np.abs(rho - dag(rho))))
    rho = 0.5 * (rho + dag(rho))
    tr = float(np.real(np.trace(rho)))
    if tr == 0:
        raise ValidationError("reconstructed operator has zero trace")
    correction = abs(tr - 1.0)
    if correction > 1e-10:
        log.info("trace renormalized by %.3g", correction)
    rho = rho / tr
    report = ReconstructionReport(int(net.theta.size), cond, res, herm, correction,
                                  coeffs.reality_defect(), float(s))
    return coeffs, rho, report
