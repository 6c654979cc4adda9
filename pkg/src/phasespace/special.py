"""Clebsch-Gordan coefficients and spherical harmonics."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special as _sp

from .errors import DomainError

__all__ = ["clebsch_gordan", "spherical_harmonic", "twice"]


def twice(x: float, name: str = "value") -> int:
    """Return ``2*x`` as an integer, raising if ``x`` is not a half-integer."""
    t = 2.0 * float(x)
    r = round(t)
    if abs(t - r) > 1e-9:
        raise DomainError(f"{name}={x!r} is not an integer or half-integer")
    return int(r)


@lru_cache(maxsize=None)
def _log_factorial(n: int) -> float:
    return math.lgamma(n + 1.0)


@lru_cache(maxsize=65536)
def _cg_doubled(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    # every argument is twice the physical quantum number
    if M != m1 + m2:
        return 0.0
    if J < abs(j1 - j2) or J > j1 + j2 or (j1 + j2 + J) % 2:
        return 0.0
    lf = _log_factorial
    a = (J + j1 - j2) // 2
    b = (J - j1 + j2) // 2
    c = (j1 + j2 - J) // 2
    log_pref = 0.5 * (
        math.log(J + 1)
        + lf(a) + lf(b) + lf(c) - lf((j1 + j2 + J) // 2 + 1)
        + lf((J + M) // 2) + lf((J - M) // 2)
        + lf((j1 - m1) // 2) + lf((j1 + m1) // 2)
        + lf((j2 - m2) // 2) + lf((j2 + m2) // 2)
    )
    d1 = c
    d2 = (j1 - m1) // 2
    d3 = (j2 + m2) // 2
    d4 = (J - j2 + m1) // 2
    d5 = (J - j1 - m2) // 2
    kmin = max(0, -d4, -d5)
    kmax = min(d1, d2, d3)
    terms = []
    for k in range(kmin, kmax + 1):
        log_den = lf(k) + lf(d1 - k) + lf(d2 - k) + lf(d3 - k) + lf(d4 + k) + lf(d5 + k)
        terms.append((-1.0) ** k * math.exp(log_pref - log_den))
    # sum smallest magnitudes first; fsum then keeps the result correctly rounded
    terms.sort(key=abs)
    return math.fsum(terms)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | J M>``.

    Condon-Shortley phase convention, evaluated with the Racah closed form
    on log-factorials.

    Parameters
    ----------
    j1, m1, j2, m2, J, M : float
        Angular momenta and projections; integers or half-integers.

    Returns
    -------
    float
        The coefficient. Zero when ``M != m1 + m2`` or when ``(j1, j2, J)``
        violates the triangle rule.

    Raises
    ------
    DomainError
        If an argument is not a half-integer, a projection exceeds its
        angular momentum, or a projection has the wrong parity.
    """
    dj1, dm1 = twice(j1, "j1"), twice(m1, "m1")
    dj2, dm2 = twice(j2, "j2"), twice(m2, "m2")
    dJ, dM = twice(J, "J"), twice(M, "M")
    for dj, dm, name in ((dj1, dm1, "1"), (dj2, dm2, "2"), (dJ, dM, "")):
        if dj < 0:
            raise DomainError(f"negative angular momentum j{name}")
        if abs(dm) > dj:
            raise DomainError(f"|m{name}| exceeds j{name}")
        if (dj - dm) % 2:
            raise DomainError(f"m{name} and j{name} differ by a non-integer")
    return _cg_doubled(dj1, dm1, dj2, dm2, dJ, dM)


def spherical_harmonic(l: int, m: int, theta, phi):
    """Orthonormal spherical harmonic ``Y_lm(theta, phi)``.

    Includes the Condon-Shortley phase. ``theta`` is the polar angle and
    ``phi`` the azimuth; both broadcast.
    """
    if int(l) != l or l < 0:
        raise DomainError("l must be a non-negative integer")
    if int(m) != m or abs(m) > l:
        raise DomainError("|m| must not exceed l")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    out = _sp.sph_harm_y(int(l), int(m), theta, phi)
    return out if out.ndim else complex(out)
