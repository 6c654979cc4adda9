"""Star products and Moyal dynamics on a uniform periodic (q, p) grid.

Grid functions are sampled at ``q_k = q_min + k dq`` (``k < n_q``, right
end excluded) and likewise in ``p``; spectral operations treat them as
periodic, so states must have decayed to (near) zero at the edges.
Normalization follows the continuous-variable convention of
:mod:`phasespace.hw`: ``int W dq dp / (2 pi hbar) = 1`` and the Wigner
function coincides with the Weyl symbol of the density operator.

A :class:`GridFunction` may also carry an exact polynomial
representation. Star products involving a polynomial terminate after
finitely many Moyal terms, which is how Hamiltonians act on states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import AliasingError, StepBoundError, ValidationError

__all__ = [
    "PhaseGrid", "GridFunction", "star_product", "star_product_convolution",
    "moyal_bracket", "step_bound", "evolve", "spectral_tail", "boundary_level", "padding_fraction",
    "harmonic", "linear", "quartic", "coherent_wigner", "wigner_from_operator", "mass", "purity",
]

TAIL_TOL = 1e-8
BOUNDARY_TOL = 1e-8
MIN_PADDING = 0.25
RK4_LIMIT = 2.0 * math.sqrt(2.0)  # imaginary-axis stability of classical RK4


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform periodic grid on ``[q_min, q_max) x [p_min, p_max)``."""

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    n_q: int
    n_p: int
    hbar: float = 1.0

    def __post_init__(self):
        if self.q_max <= self.q_min or self.p_max <= self.p_min:
            raise ValidationError("grid ranges must be increasing")
        if self.n_q < 4 or self.n_p < 4:
            raise ValidationError("at least 4 nodes per axis are required")
        if self.hbar <= 0:
            raise ValidationError("hbar must be positive")

    @classmethod
    def square(cls, extent: float, n: int, hbar: float = 1.0) -> "PhaseGrid":
        return cls(-extent, extent, -extent, extent, n, n, hbar)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_q

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n_q)

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n_p)

    def mesh(self):
        return np.meshgrid(self.q, self.p, indexing="ij")

    @property
    def kq(self) -> np.ndarray:
        return 2 * math.pi * np.fft.fftfreq(self.n_q, self.dq)

    @property
    def kp(self) -> np.ndarray:
        return 2 * math.pi * np.fft.fftfreq(self.n_p, self.dp)

    @property
    def cell(self) -> float:
        """Area element of ``dq dp / (2 pi hbar)``."""
        return self.dq * self.dp / (2 * math.pi * self.hbar)


# ---------------------------------------------------------------------------
# polynomial helpers; a polynomial is {(a, b): c} meaning sum c q^a p^b

Poly = Mapping[tuple, complex]


def _poly_clean(P) -> dict:
    return {(int(a), int(b)): c for (a, b), c in P.items() if c != 0}


def _poly_deriv(P: Poly, da: int, db: int) -> dict:
    out = {}
    for (a, b), c in P.items():
        if a >= da and b >= db:
            f = math.perm(a, da) * math.perm(b, db)
            out[(a - da, b - db)] = out.get((a - da, b - db), 0) + c * f
    return out


def _poly_mul(P: Poly, Q: Poly) -> dict:
    out = {}
    for (a, b), c in P.items():
        for (a2, b2), c2 in Q.items():
            k = (a + a2, b + b2)
            out[k] = out.get(k, 0) + c * c2
    return out


def _poly_add(P: Poly, Q: Poly, scale: complex = 1.0) -> dict:
    out = dict(P)
    for k, c in Q.items():
        out[k] = out.get(k, 0) + scale * c
    return out


def _poly_degree(P: Poly) -> int:
    return max((a + b for a, b in P), default=0)


def _poly_eval(P: Poly, grid: PhaseGrid) -> np.ndarray:
    Q, Pm = grid.mesh()
    out = np.zeros(Q.shape, dtype=complex)
    for (a, b), c in P.items():
        out += c * Q ** a * Pm ** b
    if all(np.isreal(c) for c in P.values()):
        out = out.real
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on a :class:`PhaseGrid`, optionally with an exact polynomial form.

    Attributes
    ----------
    values : ndarray
        Shape ``(n_q, n_p)``, indexed ``[q, p]``.
    grid : PhaseGrid
    kind : str
        ``"state"``, ``"hamiltonian"`` or ``"function"``.
    poly : dict or None
        ``{(a, b): c}`` for ``sum c q^a p^b`` when the function is a polynomial.
    meta : dict
        Provenance and diagnostics.
    """

    values: np.ndarray
    grid: PhaseGrid
    kind: str = "function"
    poly: dict | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values)
        if v.shape != (self.grid.n_q, self.grid.n_p):
            raise ValidationError(f"values shape {v.shape} does not match the grid")
        if not np.all(np.isfinite(v)):
            raise ValidationError("grid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.poly is not None:
            object.__setattr__(self, "poly", _poly_clean(self.poly))

    @classmethod
    def polynomial(cls, grid: PhaseGrid, coeffs: Poly, kind: str = "hamiltonian") -> "GridFunction":
        P = _poly_clean(coeffs)
        return cls(_poly_eval(P, grid), grid, kind, P)

    @classmethod
    def from_callable(cls, grid: PhaseGrid, fn: Callable, kind: str = "state") -> "GridFunction":
        Q, P = grid.mesh()
        return cls(np.asarray(fn(Q, P)), grid, kind)

    @property
    def is_polynomial(self) -> bool:
        return self.poly is not None

    def with_values(self, values, **meta) -> "GridFunction":
        return GridFunction(values, self.grid, self.kind, None, {**self.meta, **meta})


def harmonic(grid: PhaseGrid, omega: float = 1.0) -> GridFunction:
    """``H = (p^2 + omega^2 q^2) / 2``."""
    return GridFunction.polynomial(grid, {(0, 2): 0.5, (2, 0): 0.5 * omega ** 2})


def linear(grid: PhaseGrid, force: float = 1.0) -> GridFunction:
    """``H = force * q``."""
    return GridFunction.polynomial(grid, {(1, 0): force})


def quartic(grid: PhaseGrid, lam: float = 0.25) -> GridFunction:
    """``H = p^2/2 + lam q^4``."""
    return GridFunction.polynomial(grid, {(0, 2): 0.5, (4, 0): lam})


def coherent_wigner(grid: PhaseGrid, q0: float = 0.0, p0: float = 0.0) -> GridFunction:
    """Wigner function ``2 exp(-((q-q0)^2 + (p-p0)^2)/hbar)`` of a coherent state."""
    h = grid.hbar
    return GridFunction.from_callable(
        grid, lambda Q, P: 2.0 * np.exp(-((Q - q0) ** 2 + (P - p0) ** 2) / h), "state")


def wigner_from_operator(grid: PhaseGrid, rho) -> GridFunction:
    """Sample the Wigner function of a Fock-space density matrix on the grid.

    Uses ``alpha = (q + i p) / sqrt(2 hbar)``.
    """
    from . import hw

    rho = np.asarray(rho, dtype=complex)
    space = hw.fock_space(rho.shape[0] - 1)
    Q, P = grid.mesh()
    alpha = ((Q + 1j * P) / math.sqrt(2 * grid.hbar)).ravel()
    F = hw.wigner(space, rho, alpha, method="laguerre")
    return GridFunction(np.asarray(F.values).reshape(Q.shape), grid, "state")


def mass(W: GridFunction) -> float:
    """``int W dq dp / (2 pi hbar)`` by the (spectrally exact) rectangle rule."""
    return float(np.real(np.sum(W.values)) * W.grid.cell)


def purity(W: GridFunction) -> float:
    """``int W^2 dq dp / (2 pi hbar)``."""
    return float(np.sum(np.abs(W.values) ** 2) * W.grid.cell)


# ---------------------------------------------------------------------------
# spectral machinery


def spectral_tail(values, grid: PhaseGrid) -> float:
    """Fraction of spectral energy outside the inner half of the band."""
    F = np.abs(np.fft.fft2(values)) ** 2
    total = F.sum()
    if total == 0:
        return 0.0
    kq = np.abs(np.fft.fftfreq(grid.n_q))[:, None]
    kp = np.abs(np.fft.fftfreq(grid.n_p))[None, :]
    outer = (kq > 0.25) | (kp > 0.25)
    return float(F[np.broadcast_to(outer, F.shape)].sum() / total)


def boundary_level(values) -> float:
    """Largest ``|f|`` on the outermost grid lines relative to the largest ``|f|``."""
    a = np.abs(np.asarray(values))
    peak = a.max()
    if peak == 0:
        return 0.0
    edge = max(a[0].max(), a[-1].max(), a[:, 0].max(), a[:, -1].max())
    return float(edge / peak)


def padding_fraction(values, level: float = BOUNDARY_TOL) -> float:
    """Share of grid lines (worst axis) on which ``|f|`` stays below ``level`` x peak.

    This is the empty margin available to the periodic extension.
    """
    a = np.abs(np.asarray(values))
    peak = a.max()
    if peak == 0:
        return 1.0
    quiet_q = np.mean(a.max(axis=1) < level * peak)
    quiet_p = np.mean(a.max(axis=0) < level * peak)
    return float(min(quiet_q, quiet_p))


def _require_band_limited(f: GridFunction, what: str) -> None:
    tail = spectral_tail(f.values, f.grid)
    if tail > TAIL_TOL:
        raise AliasingError(f"{what}: spectral tail {tail:.3g} exceeds {TAIL_TOL:g}")


def _deriv_multipliers(grid: PhaseGrid):
    kq, kp = grid.kq, grid.kp
    # odd derivatives of the Nyquist mode are not representable on even grids
    nyq_q = np.zeros(grid.n_q, bool)
    nyq_p = np.zeros(grid.n_p, bool)
    if grid.n_q % 2 == 0:
        nyq_q[grid.n_q // 2] = True
    if grid.n_p % 2 == 0:
        nyq_p[grid.n_p // 2] = True
    return kq, kp, nyq_q, nyq_p


class _Spectral:
    """Cached spectrum of one grid function for repeated derivatives."""

    def __init__(self, values, grid: PhaseGrid):
        self.grid = grid
        self.hat = np.fft.fft2(values)
        self.real = not np.iscomplexobj(values)
        self.kq, self.kp, self.nq, self.np_ = _deriv_multipliers(grid)

    def deriv(self, a: int, b: int) -> np.ndarray:
        if a == 0 and b == 0:
            out = np.fft.ifft2(self.hat)
        else:
            mq = (1j * self.kq) ** a
            mp = (1j * self.kp) ** b
            if a % 2:
                mq = np.where(self.nq, 0, mq)
            if b % 2:
                mp = np.where(self.np_, 0, mp)
            out = np.fft.ifft2(self.hat * mq[:, None] * mp[None, :])
        return out.real if self.real else out


def _moyal_terms(P: Poly, other: _Spectral, poly_left: bool, parity: str):
    """Sum of Moyal expansion terms between a polynomial and a grid function.

    Yields the star product (``parity="all"``) or the odd part used by the
    bracket. With ``poly_left`` the polynomial is the left factor.
    """
    grid = other.grid
    h = grid.hbar
    out = 0
    for n in range(_poly_degree(P) + 1):
        if parity == "odd" and n % 2 == 0:
            continue
        pref = (1j * h / 2) ** n / math.factorial(n)
        for a in range(n + 1):
            c = pref * math.comb(n, a) * (-1) ** (n - a)
            if poly_left:
                dP = _poly_deriv(P, a, n - a)
                if not dP:
                    continue
                out = out + c * _poly_eval(dP, grid) * other.deriv(n - a, a)
            else:
                dP = _poly_deriv(P, n - a, a)
                if not dP:
                    continue
                out = out + c * other.deriv(a, n - a) * _poly_eval(dP, grid)
    if np.isscalar(out):
        out = np.zeros((grid.n_q, grid.n_p))
    return out


def _poly_star(P: Poly, Q: Poly, hbar: float) -> dict:
    out = {}
    for n in range(_poly_degree(P) + _poly_degree(Q) + 1):
        pref = (1j * hbar / 2) ** n / math.factorial(n)
        for a in range(n + 1):
            c = pref * math.comb(n, a) * (-1) ** (n - a)
            term = _poly_mul(_poly_deriv(P, a, n - a), _poly_deriv(Q, n - a, a))
            out = _poly_add(out, term, c)
    return _poly_clean({k: (v.real if abs(np.imag(v)) == 0 else v) for k, v in out.items()})


def _fourier_star(f: GridFunction, g: GridFunction) -> np.ndarray:
    """Star product of two band-limited periodic grid functions.

    With ``f = sum_l f_l(q) exp(i l p)`` (and likewise ``g``)

        (f * g)(q, p) = sum_{l, l'} f_l(q - hbar l'/2) g_{l'}(q + hbar l/2) exp(i (l + l') p),

    where the shifts are applied spectrally in ``q``.
    """
    grid = f.grid
    h = grid.hbar
    n_p = grid.n_p
    kq = grid.kq
    lp = grid.kp
    idx = np.fft.fftfreq(n_p, 1.0 / n_p).astype(int)  # signed mode numbers
    # coefficients in p with the phase of the grid origin removed
    shift_p = np.exp(-1j * lp * grid.p_min)
    fl = np.fft.fft(f.values, axis=1) / n_p * shift_p[None, :]
    gl = np.fft.fft(g.values, axis=1) / n_p * shift_p[None, :]
    fq = np.fft.fft(fl, axis=0)  # [kq, l]
    gq = np.fft.fft(gl, axis=0)
    out = np.zeros((grid.n_q, 2 * n_p), dtype=complex)  # signed sum index + n_p
    for i_l in range(n_p):
        l = lp[i_l]
        # f_l(q - hbar l'/2) for all l'
        F = np.fft.ifft(fq[:, i_l][:, None] * np.exp(-1j * kq[:, None] * (h * lp[None, :] / 2)), axis=0)
        # g_{l'}(q + hbar l/2) for all l'
        G = np.fft.ifft(gq * np.exp(1j * kq[:, None] * (h * l / 2)), axis=0)
        m = idx[i_l] + idx + n_p
        out[:, m] += F * G  # m is a shifted permutation, no repeats
    signed = np.arange(2 * n_p) - n_p
    inside = (signed >= -(n_p // 2)) & (signed < n_p - n_p // 2)
    spill = np.abs(out[:, ~inside]) ** 2
    kept = np.abs(out[:, inside]) ** 2
    if spill.sum() > TAIL_TOL * max(kept.sum(), 1e-300):
        raise AliasingError("star product spectrum exceeds the p band; refine the grid")
    coeff = np.zeros((grid.n_q, n_p), dtype=complex)
    coeff[:, signed[inside] % n_p] = out[:, inside]
    vals = np.fft.ifft(coeff / shift_p[None, :], axis=1) * n_p
    return vals


def star_product(f: GridFunction, g: GridFunction) -> GridFunction:
    """Moyal star product ``f * g`` on a shared grid.

    Polynomial operands use the terminating Moyal expansion (exact for
    polynomials, spectral derivatives for the other operand); two general
    grid functions use the Fourier form of the Bopp shift.

    Raises
    ------
    AliasingError
        If a non-polynomial operand is not band limited.
    """
    if f.grid != g.grid:
        raise ValidationError("star product needs functions on the same grid")
    grid = f.grid
    if f.is_polynomial and g.is_polynomial:
        P = _poly_star(f.poly, g.poly, grid.hbar)
        return GridFunction(_poly_eval(P, grid) if P else np.zeros((grid.n_q, grid.n_p)),
                            grid, "function", P, {"method": "polynomial"})
    if f.is_polynomial or g.is_polynomial:
        poly_left = f.is_polynomial
        P, other = (f.poly, g) if poly_left else (g.poly, f)
        _require_band_limited(other, "star product operand")
        vals = _moyal_terms(P, _Spectral(other.values, grid), poly_left, "all")
        return GridFunction(_tidy(vals), grid, "function", None, {"method": "moyal-series"})
    _require_band_limited(f, "left operand")
    _require_band_limited(g, "right operand")
    vals = _fourier_star(f, g)
    return GridFunction(_tidy(vals), grid, "function", None, {"method": "bopp-fourier"})


def _tidy(vals) -> np.ndarray:
    vals = np.asarray(vals)
    if np.iscomplexobj(vals) and np.max(np.abs(vals.imag), initial=0.0) <= 1e-13 * max(
            np.max(np.abs(vals), initial=0.0), 1.0):
        return vals.real
    return vals


def moyal_bracket(f: GridFunction, g: GridFunction) -> GridFunction:
    """``{{f, g}} = (f * g - g * f) / (i hbar)``; real for real inputs."""
    if f.grid != g.grid:
        raise ValidationError("bracket needs functions on the same grid")
    grid = f.grid
    h = grid.hbar
    if f.is_polynomial and g.is_polynomial:
        P = _poly_add(_poly_star(f.poly, g.poly, h), _poly_star(g.poly, f.poly, h), -1.0)
        P = _poly_clean({k: v / (1j * h) for k, v in P.items()})
        P = {k: (v.real if abs(np.imag(v)) < 1e-15 * max(abs(v), 1) else v) for k, v in P.items()}
        vals = _poly_eval(P, grid) if P else np.zeros((grid.n_q, grid.n_p))
        return GridFunction(vals, grid, "function", P, {"method": "polynomial"})
    if f.is_polynomial or g.is_polynomial:
        poly_left = f.is_polynomial
        P, other = (f.poly, g) if poly_left else (g.poly, f)
        _require_band_limited(other, "bracket operand")
        odd = _moyal_terms(P, _Spectral(other.values, grid), poly_left, "odd")
        return GridFunction(_tidy(2 * odd / (1j * h)), grid, "function", None,
                            {"method": "moyal-series"})
    fg = star_product(f, g).values
    gf = star_product(g, f).values
    vals = (fg - gf) / (1j * h)
    if not np.iscomplexobj(f.values) and not np.iscomplexobj(g.values):
        vals = np.real(vals)
    return GridFunction(vals, grid, "function", None, {"method": "bopp-fourier"})


def star_product_convolution(f: GridFunction, g: GridFunction, q, p) -> np.ndarray:
    """Reference star product from the convolution-integral form (slow).

    Evaluates

        (f * g)(q, p) = (pi hbar)^-2 int f(q', p') g(q'', p'')
            exp{(2i/hbar)[q (p' - p'') + q' (p'' - p) + q'' (p - p')]}

    by the rectangle rule over the grid for each requested point. Cost is
    cubic in the grid size per point, so use small grids.
    """
    grid = f.grid
    h = grid.hbar
    qs, ps = grid.q, grid.p
    fv, gv = f.values, g.values
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    out = np.empty(q.size, dtype=complex)
    w = (grid.dq * grid.dp) ** 2 / (math.pi * h) ** 2
    for i, (q0, p0) in enumerate(zip(q, p)):
        M1 = np.exp(-2j / h * np.outer(ps - p0, qs))             # [p', q'']
        M2 = np.exp(-2j / h * np.outer(ps, q0 - qs))             # [p'', q']
        G = M1 @ gv @ M2                                          # [p', q']
        E = np.exp(-2j / h * (p0 * qs[:, None] - q0 * ps[None, :]))  # [q', p']
        out[i] = w * np.sum(fv * E * G.T)
    return out


# ---------------------------------------------------------------------------
# dynamics


def _bracket_terms(H: GridFunction):
    """Coefficient grids of ``{{H, .}}`` acting on a grid function.

    Returns a list of ``(coefficient, a, b)`` meaning ``coef * d_q^a d_p^b W``.
    """
    grid = H.grid
    h = grid.hbar
    terms = []
    for n in range(1, _poly_degree(H.poly) + 1, 2):
        pref = 2 / (1j * h) * (1j * h / 2) ** n / math.factorial(n)
        for a in range(n + 1):
            dP = _poly_deriv(H.poly, a, n - a)
            if not dP:
                continue
            c = pref * math.comb(n, a) * (-1) ** (n - a)
            coef = np.real(c * _poly_eval(dP, grid))
            terms.append((coef, n - a, a))
    return terms


def step_bound(H: GridFunction) -> float:
    """Largest stable RK4 step for ``dW/dt = {{H, W}}`` on this grid.

    The generator's spectral radius is bounded by
    ``sum |coef| kq_max^a kp_max^b`` over the bracket terms, and RK4 is
    stable on the imaginary axis up to ``2 sqrt(2)``.
    """
    if not H.is_polynomial:
        raise ValidationError("evolution needs a polynomial Hamiltonian")
    grid = H.grid
    kq = math.pi / grid.dq
    kp = math.pi / grid.dp
    rho = sum(float(np.max(np.abs(c))) * kq ** a * kp ** b for c, a, b in _bracket_terms(H))
    return math.inf if rho == 0 else RK4_LIMIT / rho


def evolve(W0: GridFunction, H: GridFunction, dt: float, steps: int,
           check_every: int = 50) -> GridFunction:
    """Integrate ``dW/dt = {{H, W}}`` with classical RK4.

    Parameters
    ----------
    W0 : GridFunction
        Initial Wigner function; must be band limited and decayed below
        ``1e-8`` (relative) in the edge bands.
    H : GridFunction
        Polynomial Hamiltonian on the same grid.
    dt : float
        Time step; must not exceed :func:`step_bound`.
    steps : int
        Number of steps.
    check_every : int
        Interval (in steps) of the boundary check during the run.

    Returns
    -------
    GridFunction
        Final state; ``meta`` holds the step bound, mass and purity drifts
        and the final boundary level.
    """
    if W0.grid != H.grid:
        raise ValidationError("state and Hamiltonian must share a grid")
    bound = step_bound(H)
    if dt > bound:
        raise StepBoundError(f"dt = {dt:.4g} exceeds the stability bound {bound:.4g}")
    lvl = boundary_level(W0.values)
    if lvl > BOUNDARY_TOL:
        raise AliasingError(f"initial state reaches the grid edge (level {lvl:.3g})")
    pad = padding_fraction(W0.values)
    if pad < MIN_PADDING:
        raise AliasingError(f"padding fraction {pad:.2f} is below {MIN_PADDING}")
    _require_band_limited(W0, "initial state")
    grid = W0.grid
    terms = _bracket_terms(H)
    kq, kp, nyq_q, nyq_p = _deriv_multipliers(grid)
    half = grid.n_p // 2 + 1  # real transforms keep the non-negative p modes
    kp, nyq_p = np.abs(kp[:half]), nyq_p[:half]
    mults = []
    for coef, a, b in terms:
        mq = (1j * kq) ** a
        mp = (1j * kp) ** b
        if a % 2:
            mq = np.where(nyq_q, 0, mq)
        if b % 2:
            mp = np.where(nyq_p, 0, mp)
        mults.append((coef, mq[:, None] * mp[None, :]))
    shape = (grid.n_q, grid.n_p)

    def rhs(W):
        if not mults:
            return np.zeros_like(W)
        hat = np.fft.rfft2(W)
        out = np.zeros_like(W)
        for coef, m in mults:
            out += coef * np.fft.irfft2(hat * m, s=shape)
        return out

    W = np.array(W0.values, dtype=float)
    m0, pur0 = mass(W0), purity(W0)
    worst_mass = 0.0
    for k in range(int(steps)):
        k1 = rhs(W)
        k2 = rhs(W + 0.5 * dt * k1)
        k3 = rhs(W + 0.5 * dt * k2)
        k4 = rhs(W + dt * k3)
        W = W + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % check_every == 0 or k + 1 == steps:
            worst_mass = max(worst_mass, abs(np.sum(W) * grid.cell - m0))
            lvl = boundary_level(W)
            if lvl > 100 * BOUNDARY_TOL:
                raise AliasingError(f"state reached the grid edge at step {k + 1} (level {lvl:.3g})")
    out = GridFunction(W, grid, "state")
    meta = {"dt": dt, "steps": int(steps), "time": dt * int(steps), "step_bound": bound,
            "mass_drift": worst_mass, "purity_drift": abs(purity(out) - pur0),
            "boundary_level": boundary_level(W), "padding_fraction": pad}
    return GridFunction(W, grid, "state", None, {**W0.meta, **meta})
