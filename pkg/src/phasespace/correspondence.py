"""Stratonovich-Weyl machinery shared by the finite kernel families.

``verify_stratonovich_weyl`` checks the five correspondence axioms
numerically: linearity (round trip through the dual kernel), reality,
standardization, traciality and covariance. ``generalized_fourier`` moves a
sampled function between orderings and ``kernel_convolution`` builds the
function of an operator product from the functions of its factors.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import hw, spin, sun, wootters
from .errors import FamilyMismatchError, GridDegreeError, ValidationError
from .linalg import dag, random_hermitian, rng_from
from .quadrature import SphereGrid
from .special import twice
from .types import Family, KernelSpec, SampledFunction

__all__ = ["AxiomReport", "verify_stratonovich_weyl", "generalized_fourier",
           "kernel_convolution", "reconstruct"]

AXIOMS = ("linearity", "reality", "standardization", "traciality", "covariance")


@dataclass
class AxiomReport:
    """Residuals of the five Stratonovich-Weyl axioms.

    Every residual is a non-negative float; ``passed`` compares them with
    ``tolerance``. ``mode`` records how manifold integrals were done.
    """

    family: str
    params: dict
    s: float
    trials: int
    seed: int
    mode: str
    linearity: float
    reality: float
    standardization: float
    traciality: float
    covariance: float
    tolerance: float = 1e-9
    notes: list = field(default_factory=list)

    @property
    def residuals(self) -> dict:
        return {k: getattr(self, k) for k in AXIOMS}

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return all(np.isfinite(v) and v < self.tolerance for v in self.residuals.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _opnorm(a) -> float:
    return float(np.linalg.norm(a, 2))


def _unit_hermitians(dim, n, rng):
    out = []
    for _ in range(n):
        h = random_hermitian(dim, rng)
        out.append(h / _opnorm(h))
    return out


# ----------------------------------------------------------------- SU(2)

def _rotation_so3(angles) -> np.ndarray:
    """SO(3) matrix of the rotation with the given Euler angles (spin-1/2 rep)."""
    U = spin.euler_rotation(spin.spin_system(0.5), angles)
    sig = (wootters.SIGMA_X, wootters.SIGMA_Y, wootters.SIGMA_Z)
    return np.array([[0.5 * np.trace(si @ U @ sj @ dag(U)).real for sj in sig] for si in sig])


def _direction_to_angles(n):
    n = np.asarray(n, dtype=float)
    theta = np.arccos(np.clip(n[..., 2], -1, 1))
    phi = np.mod(np.arctan2(n[..., 1], -n[..., 0]), 2 * math.pi)
    return theta, phi


def _verify_su2(spec, trials, seed, parity):
    sysm = spin.spin_system(spec.j)
    d = sysm.dim
    rng = rng_from(seed)
    grid = spin.spin_grid(spec.j)
    s = spec.s

    def kernels(sv, theta=grid.theta, phi=grid.phi):
        if parity is None:
            return spin.kernels_on_grid(sysm, sv, theta, phi)
        U = spin._small_d(sysm, theta) * 1.0
        U = np.exp(1j * np.asarray(phi)[:, None] * sysm.m[None, :])[:, :, None] * U
        return U @ np.asarray(parity, dtype=complex) @ dag(U)

    K = kernels(s)
    Kd = kernels(-s)
    ops = _unit_hermitians(d, 2 * trials, rng)
    W = [np.real(np.einsum("ij,nji->n", A, K)) for A in ops]
    Wd = [np.real(np.einsum("ij,nji->n", A, Kd)) for A in ops]

    lin = 0.0
    for A, w in zip(ops[:trials], W[:trials]):
        back = np.einsum("n,nij->ij", grid.weights * w, Kd)
        lin = max(lin, _opnorm(back - A))
    # linearity proper: W of a combination is the combination of Ws
    a, b = rng.normal(size=2)
    comb = np.real(np.einsum("ij,nji->n", a * ops[0] + b * ops[1], K))
    lin = max(lin, float(np.abs(comb - a * W[0] - b * W[1]).max()))

    real = float(np.abs(K - dag(K)).max())
    std = _opnorm(np.einsum("n,nij->ij", grid.weights, K) - np.eye(d))
    trac = 0.0
    for i in range(trials):
        A, B = ops[i], ops[trials + i]
        val = grid.weights @ (W[i] * Wd[trials + i])
        trac = max(trac, abs(val - np.trace(A @ B).real))

    cov = 0.0
    for i in range(trials):
        ang = (rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        g = spin.euler_rotation(sysm, ang)
        R = _rotation_so3(ang)
        A = ops[i]
        lhs = np.real(np.einsum("ij,nji->n", g @ A @ dag(g), K))
        n = spin.kernel_direction(grid.theta, grid.phi)
        th2, ph2 = _direction_to_angles(n @ R)  # R^T n, the pulled-back direction
        rhs = np.real(np.einsum("ij,nji->n", A, kernels(s, th2, ph2)))
        cov = max(cov, float(np.abs(lhs - rhs).max()))
    notes = [f"product grid exact to degree {grid.exact_degree}, {len(grid)} nodes, measure {d}"]
    if parity is not None:
        notes.append("diagnostic mode: user-supplied parity")
    return "quadrature", lin, real, std, trac, cov, notes


# ----------------------------------------------------------------- Wootters

def _verify_wootters(spec, trials, seed):
    rng = rng_from(seed)
    s = spec.s
    A = {p: wootters.phase_point_operator(p, s) for p in wootters.LATTICE}
    Ad = {p: wootters.phase_point_operator(p, -s) for p in wootters.LATTICE}
    w = wootters.WEIGHT
    ops = _unit_hermitians(2, 2 * trials, rng)

    def W(op, ker):
        return {p: np.trace(op @ ker[p]).real for p in wootters.LATTICE}

    lin = max(_opnorm(sum(w * W(op, A)[p] * Ad[p] for p in wootters.LATTICE) - op)
              for op in ops[:trials])
    real = max(float(np.abs(k - dag(k)).max()) for k in A.values())
    std = _opnorm(sum(w * k for k in A.values()) - np.eye(2))
    trac = max(abs(sum(w * W(ops[i], A)[p] * W(ops[trials + i], Ad)[p] for p in wootters.LATTICE)
                   - np.trace(ops[i] @ ops[trials + i]).real) for i in range(trials))
    cov = 0.0
    for op in ops[:trials]:
        base = W(op, A)
        for a, b in wootters.LATTICE:
            D = wootters.discrete_displacement((a, b))
            moved = W(D @ op @ dag(D), A)
            for z, x in wootters.LATTICE:
                cov = max(cov, abs(moved[(z, x)] - base[(z ^ b, x ^ a)]))
    return "lattice", lin, real, std, trac, cov, ["four points, weight 1/2; covariance under all D2 displacements"]


# ----------------------------------------------------------------- SU(N)

def _affine_integral(N, terms):
    """Integrate a product of functions ``c + Tr[X P(Omega)]`` exactly."""
    # expand the product into monomials in Tr[X P]
    total = 0.0
    k = len(terms)
    for mask in range(1 << k):
        const = 1.0
        ops = []
        for i, (c, X) in enumerate(terms):
            if mask >> i & 1:
                ops.append(X)
            else:
                const *= c
        if const == 0:
            continue
        total += const * (sun.moment_integral(N, ops) if ops else N)
    return total


def _sun_affine(sysn, s, A):
    """``W_A^(s)(Omega) = c + Tr[X P]`` with ``P`` the coherent projector."""
    N = sysn.N
    cs = sun._kernel_coeff(N, s)
    # Pi = I/N + cs (P - I/N), so Tr[A Pi] = (1 - cs) TrA / N + cs Tr[A P]
    return (1 - cs) * np.trace(A) / N, cs * A


def _verify_sun(spec, trials, seed, mode, samples):
    N = spec.N
    sysn = sun.generators(N)
    rng = rng_from(seed)
    s = spec.s
    ops = _unit_hermitians(N, 2 * trials, rng)
    kets = sun.random_coherent_states(N, max(trials, 8), rng)
    K = [sun.kernel_from_state(sysn, s, k) for k in kets]
    real = max(float(np.abs(k - dag(k)).max()) for k in K)
    real = max(real, max(abs(np.trace(k) - 1) for k in K))
    cov = 0.0
    for i in range(trials):
        U = sun.sun_random_unitary(N, rng)
        A = ops[i]
        for ket in kets[:4]:
            lhs = np.trace(U @ A @ dag(U) @ sun.kernel_from_state(sysn, s, ket)).real
            rhs = np.trace(A @ sun.kernel_from_state(sysn, s, dag(U) @ ket)).real
            cov = max(cov, abs(lhs - rhs))
    E = np.eye(N)
    if mode == "moment":
        std_mat = np.zeros((N, N), dtype=complex)
        for i in range(N):
            for j in range(N):
                Eji = np.outer(E[j], E[i])  # Tr[E_ji P] = P_ij
                cs = sun._kernel_coeff(N, s)
                std_mat[i, j] = _affine_integral(N, [((1 - cs) * (i == j) / N, cs * Eji)])
        std = _opnorm(std_mat - np.eye(N))
        trac = 0.0
        lin = 0.0
        for t in range(trials):
            A, B = ops[t], ops[trials + t]
            fa, fb = _sun_affine(sysn, s, A), _sun_affine(sysn, -s, B)
            trac = max(trac, abs(_affine_integral(N, [fa, fb]) - np.trace(A @ B)))
            csd = sun._kernel_coeff(N, -s)
            back = np.zeros((N, N), dtype=complex)
            for i in range(N):
                for j in range(N):
                    kij = ((1 - csd) * (i == j) / N, csd * np.outer(E[j], E[i]))
                    back[i, j] = _affine_integral(N, [fa, kij])
            lin = max(lin, _opnorm(back - A))
        notes = ["exact Haar moment calculus on CP^(N-1), total measure N"]
    else:
        cs, csd = sun._kernel_coeff(N, s), sun._kernel_coeff(N, -s)
        pairs = [(ops[t], ops[trials + t]) for t in range(trials)]
        sum_pi = np.zeros((N, N), dtype=complex)
        sum_ab = np.zeros(trials)
        sum_back = np.zeros((trials, N, N), dtype=complex)
        done = 0
        while done < samples:
            n = min(100_000, samples - done)
            kets_mc = sun.random_coherent_states(N, n, rng)
            P = np.einsum("ni,nj->nij", kets_mc, kets_mc.conj())
            Pi = np.eye(N) / N + cs * (P - np.eye(N) / N)
            Pid = np.eye(N) / N + csd * (P - np.eye(N) / N)
            sum_pi += Pi.sum(axis=0)
            for t, (A, B) in enumerate(pairs):
                WA = np.real(np.einsum("ij,nji->n", A, Pi))
                WB = np.real(np.einsum("ij,nji->n", B, Pid))
                sum_ab[t] += WA @ WB
                sum_back[t] += np.einsum("n,nij->ij", WA, Pid)
            done += n
        w = N / samples
        std = _opnorm(w * sum_pi - np.eye(N))
        trac = max(abs(w * sum_ab[t] - np.trace(A @ B).real) for t, (A, B) in enumerate(pairs))
        lin = max(_opnorm(w * sum_back[t] - A) for t, (A, _) in enumerate(pairs))
        notes = [f"Monte Carlo over {samples} Haar-random coherent states; residuals are statistical"]
    return mode, lin, real, std, float(np.real(trac)), cov, notes


# ----------------------------------------------------------------- HW

def _verify_hw(spec, trials, seed, block=5, extent=7.0, npts=141):
    if spec.s != 0:
        raise ValidationError("the HW axiom check is implemented for s = 0 only")
    rng = rng_from(seed)
    q = np.linspace(-extent, extent, npts)
    h = q[1] - q[0]
    Q, P = np.meshgrid(q, q, indexing="ij")
    alphas = ((Q + 1j * P) / math.sqrt(2)).ravel()
    w = np.full(alphas.size, h * h / (2 * math.pi))
    K = hw.kernel_block(alphas, block)
    ops = _unit_hermitians(block, 2 * trials, rng)
    W = [np.real(np.einsum("ij,nji->n", A, K)) for A in ops]
    lin = max(_opnorm(np.einsum("n,nij->ij", w * W[i], K) - ops[i]) for i in range(trials))
    real = float(np.abs(K - dag(K)).max())
    std = _opnorm(np.einsum("n,nij->ij", w, K) - np.eye(block))
    trac = max(abs(w @ (W[i] * W[trials + i]) - np.trace(ops[i] @ ops[trials + i]).real)
               for i in range(trials))
    space = hw.fock_space(spec.cutoff)
    cov = 0.0
    sample = alphas[rng.choice(alphas.size, 32, replace=False)]
    sample = sample[np.abs(sample) < 2]
    for i in range(trials):
        beta = complex(*rng.normal(scale=0.3, size=2))
        A = np.zeros((space.dim, space.dim), dtype=complex)
        A[:block, :block] = ops[i]
        D = hw.displacement(space, beta)
        moved = D @ A @ dag(D)
        moved = (moved + dag(moved)) / 2
        lhs = hw._wigner_laguerre(space, moved, sample)
        rhs = np.real(np.einsum("ij,nji->n", ops[i], hw.kernel_block(sample - beta, block)))
        cov = max(cov, float(np.abs(lhs - rhs).max()))
    notes = [
        f"truncated check: operators supported on Fock levels < {block}",
        f"kernel block from closed-form displaced-parity elements; trapezoid grid {npts}^2 on |q|,|p| <= {extent}",
        f"covariance uses truncated displacements at n_max={spec.cutoff}",
    ]
    return "truncated", lin, real, std, trac, cov, notes


def verify_stratonovich_weyl(spec: KernelSpec, trials: int = 10, seed: int = 0, *,
                             mode: str = "moment", samples: int = 100_000,
                             parity=None) -> AxiomReport:
    """Numerically check the Stratonovich-Weyl axioms for a kernel family.

    Parameters
    ----------
    spec : KernelSpec
        Family and ordering parameter. Traciality and the round trip pair
        ``s`` with ``-s``.
    trials : int
        Number of random Hermitian operators (and operator pairs).
    seed : int
        Seed for every random draw; the report is deterministic given it.
    mode : {"moment", "monte-carlo"}
        SU(N) only: exact Haar moments or a Monte Carlo estimate.
    samples : int
        Monte Carlo sample count.
    parity : array_like, optional
        SU(2) only: replace the generalized parity (diagnostic mode).

    Returns
    -------
    AxiomReport
    """
    if not isinstance(spec, KernelSpec):
        raise ValidationError("spec must be a KernelSpec")
    if trials < 1:
        raise ValidationError("trials must be positive")
    fam = spec.family
    tol = 1e-9
    if fam is Family.SU2:
        res = _verify_su2(spec, trials, seed, parity)
        params = {"j": spec.j}
    elif fam is Family.WOOTTERS:
        res = _verify_wootters(spec, trials, seed)
        params = {"d": 2}
    elif fam is Family.SUN:
        if mode not in ("moment", "monte-carlo"):
            raise ValidationError("mode must be 'moment' or 'monte-carlo'")
        res = _verify_sun(spec, trials, seed, mode, samples)
        params = {"N": spec.N}
        if mode == "monte-carlo":
            tol = 1e-2
    elif fam is Family.HW:
        res = _verify_hw(spec, trials, seed)
        params = {"cutoff": spec.cutoff}
        tol = 1e-6
    else:
        raise ValidationError(f"axiom check not available for family {fam.value}")
    mode_used, lin, real, std, trac, cov, notes = res
    return AxiomReport(fam.value, params, spec.s, trials, seed, mode_used,
                       float(lin), float(real), float(std), float(trac), float(cov), tol, notes)


# ----------------------------------------------------------------- transforms

def _su2_reconstruct(F: SampledFunction) -> np.ndarray:
    sysm = spin.spin_system(F.spec.j)
    grid = F.grid
    if not isinstance(grid, SphereGrid):
        raise ValidationError("SU2 functions must be sampled on a SphereGrid")
    need = 2 * twice(F.spec.j)
    if grid.exact_degree < need:
        raise GridDegreeError(f"grid exact to degree {grid.exact_degree}; {need} needed")
    Kd = spin.kernels_on_grid(sysm, -F.s, grid.theta, grid.phi)
    return np.einsum("n,nij->ij", grid.weights * np.asarray(F.values), Kd)


def _su2_sample(spec, A, grid) -> np.ndarray:
    sysm = spin.spin_system(spec.j)
    K = spin.kernels_on_grid(sysm, spec.s, grid.theta, grid.phi)
    vals = np.einsum("ij,nji->n", A, K)
    return vals.real if np.allclose(A, dag(A), atol=1e-12) else vals


def _lattice_values(F):
    v = np.asarray(F.values)
    return v.reshape(2, 2) if v.size == 4 else None


def _wootters_reconstruct(F):
    v = _lattice_values(F)
    return sum(wootters.WEIGHT * v[p] * wootters.phase_point_operator(p, -F.s) for p in wootters.LATTICE)


def _wootters_sample(spec, A):
    vals = np.array([[np.trace(A @ wootters.phase_point_operator((z, x), spec.s)) for x in (0, 1)]
                     for z in (0, 1)])
    return vals.real if np.allclose(A, dag(A), atol=1e-12) else vals


def reconstruct(F: SampledFunction) -> np.ndarray:
    """Operator represented by ``F``: ``int F^(s) Pi^(-s) dOmega``."""
    fam = F.spec.family
    if fam is Family.SU2:
        return _su2_reconstruct(F)
    if fam is Family.WOOTTERS:
        return _wootters_reconstruct(F)
    raise FamilyMismatchError(f"reconstruction not available for {fam.value}")


def generalized_fourier(F: SampledFunction, spec_to: KernelSpec) -> SampledFunction:
    """Transform ``F`` (ordering ``s1``) to ordering ``spec_to.s`` on the same points.

    Finite families use reconstruct-then-reevaluate, which equals the pairing
    with the trace kernel ``Tr[Pi^(s2)(Omega') Pi^(-s1)(Omega)]``. SU(N)
    functions use the closed-form pointwise law.
    """
    if not F.spec.same_family(spec_to):
        raise FamilyMismatchError("source and target kernels belong to different families")
    fam = F.spec.family
    if fam is Family.SUN:
        return sun.s_transform_sun(F, spec_to.s)
    if fam is Family.SU2:
        A = _su2_reconstruct(F)
        return SampledFunction(_su2_sample(spec_to, A, F.grid), spec_to, F.grid, dict(F.meta))
    if fam is Family.WOOTTERS:
        A = _wootters_reconstruct(F)
        return SampledFunction(_wootters_sample(spec_to, A), spec_to, F.grid, dict(F.meta))
    raise FamilyMismatchError(f"generalized_fourier not available for {fam.value}")


def kernel_convolution(F: SampledFunction, G: SampledFunction, s: float) -> SampledFunction:
    """Function of the operator product ``AB`` at ordering ``s``.

    Evaluates ``int int F(O') G(O'') Tr[Pi^(s)(O) Pi^(-s1)(O') Pi^(-s2)(O'')] dO' dO''``.
    The double integral factorizes: the inner sums are the reconstructions
    of ``A`` and ``B``, so the triple-kernel trace is contracted as
    ``Tr[Pi^(s)(O) A B]``.
    """
    if not F.spec.same_family(G.spec):
        raise FamilyMismatchError("F and G belong to different kernel families")
    fam = F.spec.family
    spec_out = F.spec.with_s(s)
    if fam is Family.SU2:
        A, B = _su2_reconstruct(F), _su2_reconstruct(G)
        return SampledFunction(_su2_sample(spec_out, A @ B, F.grid), spec_out, F.grid)
    if fam is Family.WOOTTERS:
        A, B = _wootters_reconstruct(F), _wootters_reconstruct(G)
        return SampledFunction(_wootters_sample(spec_out, A @ B), spec_out, F.grid)
    raise FamilyMismatchError(f"kernel_convolution not available for {fam.value}")
