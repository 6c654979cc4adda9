"""Kernels and phase-space functions of multi-partite systems.

A composite kernel is the Kronecker product of factor kernels. Values of
the joint function are computed by contracting the density operator with
one stack of factor kernels per subsystem, which never materializes the
full Kronecker product.

Two contraction layouts are used:

* product layout, where every factor keeps its own point axis (the joint
  function lives on the Cartesian product of factor grids), and
* shared layout, where all factors are sampled at the same point index
  (slices and hand-picked point lists).
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence, Union

import numpy as np

from . import hw, spin, sun, wootters
from .errors import DomainError, FamilyMismatchError, ValidationError
from .linalg import as_operator, partial_trace, rng_from
from .quadrature import SphereGrid
from .types import Family, KernelSpec, SampledFunction

__all__ = [
    "CompositePoint", "CompositeGrid", "SliceSpec", "tensor_kernel", "factor_kernel",
    "factor_kernels", "composite_grid", "composite_evaluate", "composite_reconstruct",
    "composite_integrate", "hybrid_multiqubit_kernel", "hybrid_dof",
    "hybrid_standardization", "slice_evaluate", "marginal_wigner", "hybrid_cv_dv_point",
    "hybrid_cv_dv_grid",
]

FactorPoint = Union[spin.EulerPoint, hw.CVPoint, wootters.LatticePoint, sun.SUNPoint]
CompositePoint = tuple

_POINT_KIND = {
    Family.SU2: spin.EulerPoint,
    Family.HW: hw.CVPoint,
    Family.WOOTTERS: wootters.LatticePoint,
    Family.SUN: sun.SUNPoint,
}


def _check_specs(specs) -> tuple[KernelSpec, ...]:
    specs = tuple(specs)
    if not specs:
        raise ValidationError("at least one factor is required")
    for sp in specs:
        if not isinstance(sp, KernelSpec) or sp.family is Family.COMPOSITE:
            raise FamilyMismatchError("factors must be non-composite KernelSpecs")
    return specs


def _factor_s(specs, s) -> list[float]:
    if s is None:
        return [sp.s for sp in specs]
    if np.ndim(s) == 0:
        return [float(s)] * len(specs)
    s = [float(v) for v in s]
    if len(s) != len(specs):
        raise ValidationError("one ordering parameter per factor is required")
    return s


def _coerce_point(spec: KernelSpec, p):
    kind = _POINT_KIND[spec.family]
    if isinstance(p, kind):
        return p
    known = tuple(k for k in _POINT_KIND.values() if k is not kind)
    if isinstance(p, known):
        raise FamilyMismatchError(
            f"{type(p).__name__} given for a {spec.family.value} factor")
    if spec.family is Family.HW:
        return hw.CVPoint(complex(p))
    return kind(*p)


def _hw_kernel(spec: KernelSpec, alphas, s: float) -> np.ndarray:
    """Stack of truncated HW kernels at complex points, shape ``(n, d, d)``."""
    d = spec.dim
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if s == 0.0:
        return hw.kernel_block(alphas, d)
    if s >= 1.0:
        raise DomainError("the HW P kernel (s = 1) is not a bounded operator")
    # displace a diagonal kernel in a padded space and crop; the pad keeps
    # truncation error of the displacement away from the retained block
    pad = hw.fock_space(d - 1 + 40)
    diag = 2.0 / (1.0 - s) * ((s + 1.0) / (s - 1.0)) ** pad.number
    D = hw.displacements(pad, alphas)
    K = (D * diag[None, None, :]) @ np.conj(np.swapaxes(D, 1, 2))
    return K[:, :d, :d]


def factor_kernels(spec: KernelSpec, points: Sequence, s: float | None = None) -> np.ndarray:
    """Kernels of one factor at a list of points, shape ``(npoints, d, d)``."""
    s = spec.s if s is None else float(s)
    points = [_coerce_point(spec, p) for p in points]
    fam = spec.family
    if fam is Family.SU2:
        sys = spin.spin_system(spec.j)
        return spin.kernels_on_grid(sys, s, [p.theta for p in points], [p.phi for p in points])
    if fam is Family.WOOTTERS:
        return np.stack([wootters.phase_point_operator(p, s) for p in points])
    if fam is Family.SUN:
        sys = sun.generators(spec.N)
        return np.stack([sun.kernel_sun(sys, s, p.phi, p.theta) for p in points])
    return _hw_kernel(spec, [p.alpha for p in points], s)


def factor_kernel(spec: KernelSpec, point, s: float | None = None) -> np.ndarray:
    """Kernel of a single factor at a single point."""
    return factor_kernels(spec, [point], s)[0]


def tensor_kernel(specs, point: CompositePoint, s=None) -> np.ndarray:
    """Kronecker product of factor kernels at a composite point.

    Parameters
    ----------
    specs : sequence of KernelSpec
        One per subsystem, in the tensor order of the Hilbert space.
    point : sequence
        One factor point per subsystem.
    s : float or sequence, optional
        Ordering parameter(s); defaults to each spec's own ``s``.

    Examples
    --------
    >>> K = tensor_kernel([KernelSpec.su2(0.5)] * 2, [(0, 0), (0, 0)])
    >>> round(float(np.trace(K).real), 12)
    1.0
    """
    specs = _check_specs(specs)
    point = tuple(point)
    if len(point) != len(specs):
        raise ValidationError(f"point has {len(point)} factors, specs have {len(specs)}")
    out = np.ones((1, 1), dtype=complex)
    for sp, p, si in zip(specs, point, _factor_s(specs, s)):
        out = np.kron(out, factor_kernel(sp, p, si))
    return out


def _contract(rho: np.ndarray, dims, stacks, shared: bool) -> np.ndarray:
    """``Tr[rho (K_1 x ... x K_n)]`` for stacks of factor kernels.

    With ``shared`` every stack must have the same length and the result
    is one value per index; otherwise the result has one axis per factor.
    """
    n = len(dims)
    if 3 * n + 1 > len(string.ascii_letters):
        raise ValidationError("too many factors for contraction")
    letters = iter(string.ascii_letters)
    rows = [next(letters) for _ in range(n)]
    cols = [next(letters) for _ in range(n)]
    if shared:
        pts = [next(letters)] * n
        out = pts[0]
    else:
        pts = [next(letters) for _ in range(n)]
        out = "".join(pts)
    terms = ["".join(rows) + "".join(cols)]
    terms += [pts[k] + cols[k] + rows[k] for k in range(n)]
    expr = ",".join(terms) + "->" + out
    r = rho.reshape(tuple(dims) * 2)
    return np.einsum(expr, r, *stacks, optimize=True)


def _real_if_hermitian(rho, vals):
    if np.allclose(rho, np.conj(rho.T), atol=1e-12):
        return np.real(vals)
    return vals


def _composite_spec(specs, s) -> KernelSpec:
    svals = _factor_s(specs, s)
    facs = tuple(sp.with_s(si) for sp, si in zip(specs, svals))
    common = svals[0] if all(v == svals[0] for v in svals) else 0.0
    return KernelSpec.composite(facs, common)


@dataclass(frozen=True, eq=False)
class CompositeGrid:
    """Cartesian product of factor grids.

    Attributes
    ----------
    points : tuple of tuples
        Factor points for each subsystem.
    weights : tuple of ndarray
        Factor quadrature weights; the joint weight is their outer product.
    """

    points: tuple
    weights: tuple

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.points)

    def joint_weights(self) -> np.ndarray:
        w = np.ones(())
        for wk in self.weights:
            w = np.multiply.outer(w, wk)
        return w


def _factor_grid(spec: KernelSpec, L: int | None = None):
    if spec.family is Family.SU2:
        g = spin.spin_grid(spec.j, L)
        pts = tuple(spin.EulerPoint(ph, th) for th, ph in zip(g.theta, g.phi))
        return pts, np.asarray(g.weights)
    if spec.family is Family.WOOTTERS:
        return wootters.LATTICE, np.full(4, wootters.WEIGHT)
    raise FamilyMismatchError(
        f"no finite exact quadrature for a {spec.family.value} factor")


def composite_grid(specs) -> CompositeGrid:
    """Product of exact factor grids (spin factors: degree 4j; qubits: lattice)."""
    specs = _check_specs(specs)
    parts = [_factor_grid(sp) for sp in specs]
    return CompositeGrid(tuple(p for p, _ in parts), tuple(w for _, w in parts))


def composite_evaluate(rho, specs, grid: CompositeGrid, s=None) -> SampledFunction:
    """Joint phase-space function on a product grid, one axis per factor."""
    specs = _check_specs(specs)
    dims = [sp.dim for sp in specs]
    rho = as_operator(rho, int(np.prod(dims)))
    svals = _factor_s(specs, s)
    stacks = [factor_kernels(sp, pts, si) for sp, pts, si in zip(specs, grid.points, svals)]
    vals = _real_if_hermitian(rho, _contract(rho, dims, stacks, shared=False))
    return SampledFunction(vals, _composite_spec(specs, s), grid)


def composite_integrate(values, grid: CompositeGrid):
    """Integral of a function sampled on a product grid."""
    return np.sum(np.asarray(values) * grid.joint_weights())


def composite_reconstruct(F: SampledFunction) -> np.ndarray:
    """Operator ``int F(Omega) (x) Pi^(-s_i)(Omega_i) dOmega`` from product-grid samples."""
    if F.spec.family is not Family.COMPOSITE or not isinstance(F.grid, CompositeGrid):
        raise FamilyMismatchError("composite_reconstruct needs a product-grid composite function")
    specs = F.spec.factors
    grid = F.grid
    n = len(specs)
    dims = [sp.dim for sp in specs]
    stacks = [factor_kernels(sp, pts, -sp.s) for sp, pts in zip(specs, grid.points)]
    letters = iter(string.ascii_letters)
    pts = [next(letters) for _ in range(n)]
    rows = [next(letters) for _ in range(n)]
    cols = [next(letters) for _ in range(n)]
    terms = ["".join(pts)] + [pts[k] + rows[k] + cols[k] for k in range(n)]
    expr = ",".join(terms) + "->" + "".join(rows) + "".join(cols)
    weighted = np.asarray(F.values) * grid.joint_weights()
    D = int(np.prod(dims))
    return np.einsum(expr, weighted, *stacks, optimize=True).reshape(D, D)


# ---------------------------------------------------------------------------
# hybrid multi-qubit kernel


def _qubit_lowest(phi, theta, Phi=0.0) -> np.ndarray:
    # second column of the spin-1/2 rotation, i.e. U |down>
    c, s_ = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([np.exp(0.5j * (phi - Phi)) * s_, np.exp(-0.5j * (phi + Phi)) * c])


def hybrid_dof(n: int) -> dict[str, int]:
    """Phase-space dimensions of the hybrid and of the plain SU(2^n) construction."""
    return {"hybrid": 2 * int(n), "sun": 2 * (2 ** int(n) - 1)}


def hybrid_multiqubit_kernel(n: int, points: Sequence, s: float = 0.0) -> np.ndarray:
    """Local qubit rotations conjugating the SU(2^n) generalized parity.

    The kernel is ``D Pi D^dagger`` with ``D`` the tensor product of the
    ``n`` spin-1/2 rotations and ``Pi = I/N + c_s (|N><N| - I/N)`` the
    parity built on the lowest-weight state of SU(N), ``N = 2^n``. Because
    ``D`` maps ``|N> = |down...down>`` to a product ket the kernel is
    assembled without forming ``D``.

    Parameters
    ----------
    n : int
        Number of qubits, ``1 <= n <= 10``.
    points : sequence of EulerPoint
        One rotation per qubit.
    s : float
        Ordering parameter.
    """
    n = int(n)
    if not 1 <= n <= 10:
        raise ValidationError("hybrid kernel supports 1 <= n <= 10 qubits")
    points = [spin.EulerPoint(*p) for p in points]
    if len(points) != n:
        raise ValidationError(f"expected {n} rotations, got {len(points)}")
    N = 2 ** n
    psi = np.ones(1, dtype=complex)
    for p in points:
        psi = np.kron(psi, _qubit_lowest(*p))
    c = sun._kernel_coeff(N, s)
    return np.eye(N) * (1 - c) / N + c * np.outer(psi, psi.conj())


def hybrid_standardization(n: int, samples: int = 100_000, seed=0, s: float = 0.0,
                           chunk: int = 20_000):
    """Monte Carlo estimate of the kernel integral over the 2n-angle product measure.

    Each qubit carries the measure ``(2 / 4 pi) sin(theta) dtheta dphi``, so
    the total measure is ``2^n`` and the integral should be the identity.

    Returns
    -------
    estimate : ndarray
        ``2^n`` times the sample mean of the kernel.
    stderr : ndarray
        Entrywise standard error of ``estimate`` (real and imaginary parts
        combined in quadrature).
    """
    n = int(n)
    N = 2 ** n
    rng = rng_from(seed)
    c = sun._kernel_coeff(N, s)
    acc = np.zeros((N, N), dtype=complex)
    acc2 = np.zeros((N, N))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        # uniform directions: cos(theta) uniform, phi uniform
        th = np.arccos(rng.uniform(-1, 1, size=(m, n)))
        ph = rng.uniform(0, 2 * math.pi, size=(m, n))
        psi = np.ones((m, 1), dtype=complex)
        for k in range(n):
            q = np.stack([np.exp(0.5j * ph[:, k]) * np.sin(th[:, k] / 2),
                          np.exp(-0.5j * ph[:, k]) * np.cos(th[:, k] / 2)], axis=1)
            psi = (psi[:, :, None] * q[:, None, :]).reshape(m, -1)
        K = (1 - c) / N * np.eye(N)[None] + c * psi[:, :, None] * psi.conj()[:, None, :]
        acc += K.sum(axis=0)
        acc2 += (np.abs(K) ** 2).sum(axis=0)
        done += m
    mean = acc / samples
    var = np.maximum(acc2 / samples - np.abs(mean) ** 2, 0.0)
    return N * mean, N * np.sqrt(var / samples)


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class SliceSpec:
    """Declarative binding of factor angles to shared slice variables.

    ``bindings`` maps each factor index to a ``(theta, phi)`` pair whose
    entries are either a variable name looked up in the evaluation grid or
    a fixed angle.

    Examples
    --------
    >>> SliceSpec.axis_pair().bindings[1]
    ('theta2', 0.0)
    """

    kind: str
    bindings: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("equal_angle", "equatorial", "axis_pair", "custom_binding"):
            raise ValidationError(f"unknown slice kind {self.kind!r}")
        object.__setattr__(self, "bindings", {int(k): tuple(v) for k, v in self.bindings.items()})

    @classmethod
    def equal_angle(cls, n: int) -> "SliceSpec":
        return cls("equal_angle", {i: ("theta", "phi") for i in range(n)})

    @classmethod
    def equatorial(cls, n: int) -> "SliceSpec":
        return cls("equatorial", {i: (math.pi / 2, "phi") for i in range(n)})

    @classmethod
    def axis_pair(cls, phi1: float = 0.0, phi2: float = 0.0) -> "SliceSpec":
        return cls("axis_pair", {0: ("theta1", float(phi1)), 1: ("theta2", float(phi2))})

    @classmethod
    def custom(cls, bindings) -> "SliceSpec":
        return cls("custom_binding", bindings)

    @property
    def variables(self) -> set[str]:
        return {b for pair in self.bindings.values() for b in pair if isinstance(b, str)}


def _slice_grid(slc: SliceSpec, grid) -> dict[str, np.ndarray]:
    if isinstance(grid, SphereGrid):
        grid = {"theta": grid.theta, "phi": grid.phi}
    elif not isinstance(grid, Mapping):
        arr = np.asarray(grid, dtype=float)
        names = slc.variables
        if len(names) != 1:
            raise ValidationError("a bare array grid only fits a one-variable slice")
        grid = {names.pop(): arr}
    out = {k: np.atleast_1d(np.asarray(v, dtype=float)).ravel() for k, v in grid.items()}
    missing = slc.variables - set(out)
    if missing:
        raise ValidationError(f"grid lacks slice variables {sorted(missing)}")
    sizes = {out[v].size for v in slc.variables}
    if len(sizes) > 1:
        raise ValidationError("slice variables must have equal lengths")
    return out


def slice_evaluate(rho, specs, slc: SliceSpec, grid, s=None) -> SampledFunction:
    """Joint function of spin factors along a slice of the product manifold.

    Parameters
    ----------
    rho : array_like
        Operator on the product space.
    specs : sequence of KernelSpec
        Spin (SU2) factor specs.
    slc : SliceSpec
        Binding of each factor's ``(theta, phi)`` to slice variables.
    grid : SphereGrid, mapping or array
        Values of the slice variables. A ``SphereGrid`` supplies ``theta``
        and ``phi``; a bare array is used for a one-variable slice.
    """
    specs = _check_specs(specs)
    if any(sp.family is not Family.SU2 for sp in specs):
        raise FamilyMismatchError("slices are defined for spin factors")
    if set(slc.bindings) != set(range(len(specs))):
        raise ValidationError("slice bindings must cover every factor exactly")
    dims = [sp.dim for sp in specs]
    rho = as_operator(rho, int(np.prod(dims)))
    g = _slice_grid(slc, grid)
    npts = max([g[v].size for v in slc.variables], default=1)

    def resolve(b):
        return g[b] if isinstance(b, str) else np.full(npts, float(b))

    stacks = []
    for i, (sp, si) in enumerate(zip(specs, _factor_s(specs, s))):
        th, ph = (resolve(b) for b in slc.bindings[i])
        stacks.append(spin.kernels_on_grid(spin.spin_system(sp.j), si, th, ph))
    vals = _real_if_hermitian(rho, _contract(rho, dims, stacks, shared=True))
    return SampledFunction(vals, _composite_spec(specs, s), g, {"slice": slc.kind})


# ---------------------------------------------------------------------------
# marginals and hybrid CV x qubit points


def _single_factor_values(spec: KernelSpec, rho, grid, s: float) -> np.ndarray:
    if spec.family is Family.SU2:
        sys = spin.spin_system(spec.j)
        return np.asarray(spin.evaluate(sys, rho, s, grid, check_degree=False).values)
    if spec.family is Family.HW:
        alphas = np.atleast_1d(np.asarray(grid, dtype=complex))
        K = _hw_kernel(spec, alphas, s)
        return _real_if_hermitian(rho, np.einsum("ij,nji->n", rho, K))
    K = factor_kernels(spec, list(grid), s)
    return _real_if_hermitian(rho, np.einsum("ij,nji->n", rho, K))


def _kept_stack(spec, grid, s):
    if spec.family is Family.SU2:
        return spin.kernels_on_grid(spin.spin_system(spec.j), s, grid.theta, grid.phi)
    if spec.family is Family.HW:
        return _hw_kernel(spec, grid, s)
    return factor_kernels(spec, list(grid), s)


def marginal_wigner(rho, specs, keep: int, grid, s: float = 0.0) -> SampledFunction:
    """Phase-space function of one factor with the others integrated out.

    Two constructions are computed: the factor function of the partial
    trace, and the quadrature integral of the joint function over the
    discarded factors (available when those are spin or lattice factors).
    Their largest difference is stored as ``meta["path_difference"]``.

    Parameters
    ----------
    keep : int
        Index of the retained factor.
    grid
        Points for the retained factor: a ``SphereGrid`` for spin factors,
        complex amplitudes for an HW factor, a list of points otherwise.
    """
    specs = _check_specs(specs)
    n = len(specs)
    if not 0 <= int(keep) < n:
        raise IndexError(f"factor index {keep} out of range for {n} factors")
    keep = int(keep)
    dims = [sp.dim for sp in specs]
    rho = as_operator(rho, int(np.prod(dims)))
    red = partial_trace(rho, dims, [keep])
    vals = _single_factor_values(specs[keep], red, grid, s)

    diff = None
    others = [i for i in range(n) if i != keep]
    if all(specs[i].family in (Family.SU2, Family.WOOTTERS) for i in others):
        stacks, weights = [], []
        for i in range(n):
            if i == keep:
                stacks.append(_kept_stack(specs[i], grid, s))
                weights.append(None)
            else:
                pts, w = _factor_grid(specs[i])
                stacks.append(factor_kernels(specs[i], pts, s))
                weights.append(w)
        joint = _contract(rho, dims, stacks, shared=False)
        for i in reversed(others):
            joint = np.tensordot(joint, weights[i], axes=([i], [0]))
        diff = float(np.max(np.abs(joint - vals))) if np.size(vals) else 0.0
    spec = specs[keep].with_s(s)
    return SampledFunction(vals, spec, grid, {"path_difference": diff, "keep": keep})


def _split_cv(rho, j):
    d_spin = int(round(2 * j)) + 1
    D = rho.shape[0]
    if D % d_spin:
        raise ValidationError("dimension is not a multiple of the spin dimension")
    return D // d_spin, d_spin


def hybrid_cv_dv_point(rho, alpha, p, j: float = 0.5) -> float:
    """Wigner value ``Tr[(Pi(alpha) x Pi(theta, phi)) rho]`` on Fock (x) spin.

    The continuous-variable kernel uses exact displaced-parity matrix
    elements on the truncated Fock block. A truncation warning is issued
    when the reduced mode state populates the top quarter of the block.

    Examples
    --------
    >>> from phasespace.hw import fock_dm
    >>> rho = np.kron(fock_dm(hw.fock_space(7), 0), np.diag([1.0, 0.0]))
    >>> round(hybrid_cv_dv_point(rho, 0.0, (0.0, 0.0)), 5)
    2.73205
    """
    rho = as_operator(rho)
    n_cv, d_spin = _split_cv(rho, j)
    space = hw.fock_space(n_cv - 1)
    hw._check_state(space, partial_trace(rho, [n_cv, d_spin], [0]))
    alpha = alpha.alpha if isinstance(alpha, hw.CVPoint) else complex(alpha)
    K_cv = hw.kernel_block(np.array([alpha]), n_cv)
    p = spin.EulerPoint(*p)
    K_s = spin.kernels_on_grid(spin.spin_system(j), 0.0, [p.theta], [p.phi])
    return float(np.real(_contract(rho, [n_cv, d_spin], [K_cv, K_s], shared=True)[0]))


def hybrid_cv_dv_grid(rho, alphas, grid: SphereGrid, j: float = 0.5) -> SampledFunction:
    """Hybrid Wigner values on ``alphas`` x ``grid``, with per-alpha maxima.

    Values have shape ``(len(alphas), len(grid))``; ``meta["alpha_max"]``
    holds the maximum over the sphere for each amplitude.
    """
    rho = as_operator(rho)
    n_cv, d_spin = _split_cv(rho, j)
    space = hw.fock_space(n_cv - 1)
    hw._check_state(space, partial_trace(rho, [n_cv, d_spin], [0]))
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex)).ravel()
    K_cv = hw.kernel_block(alphas, n_cv)
    K_s = spin.kernels_on_grid(spin.spin_system(j), 0.0, grid.theta, grid.phi)
    vals = np.real(_contract(rho, [n_cv, d_spin], [K_cv, K_s], shared=False))
    spec = KernelSpec.composite((KernelSpec.hw(n_cv - 1), KernelSpec.su2(j)))
    return SampledFunction(vals, spec, (alphas, grid), {"alpha_max": vals.max(axis=1)})
