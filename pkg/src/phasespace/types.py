"""Core value types: kernel specifications and sampled phase-space functions."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import DomainError, ValidationError
from .special import twice

__all__ = ["Family", "KernelSpec", "SampledFunction"]


class Family(str, enum.Enum):
    HW = "hw"
    SU2 = "su2"
    WOOTTERS = "wootters"
    SUN = "sun"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel family, its parameters and the ordering parameter ``s``.

    Use the classmethod constructors rather than the raw fields.

    Examples
    --------
    >>> KernelSpec.su2(1.5, s=-1).dim
    4
    """

    family: Family
    j: float | None = None
    N: int | None = None
    cutoff: int | None = None
    factors: tuple = ()
    s: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.s <= 1.0:
            raise DomainError("s must lie in [-1, 1]")
        f = Family(self.family)
        object.__setattr__(self, "family", f)
        if f is Family.SU2:
            if self.j is None or twice(self.j, "j") < 0:
                raise ValidationError("SU2 requires a non-negative half-integer j")
            object.__setattr__(self, "j", twice(self.j) / 2)
        elif f is Family.SUN:
            if self.N is None or int(self.N) < 2:
                raise ValidationError("SUN requires N >= 2")
        elif f is Family.HW:
            if self.cutoff is None or int(self.cutoff) < 1:
                raise ValidationError("HW requires a Fock cutoff >= 1")
        elif f is Family.COMPOSITE:
            if not self.factors:
                raise ValidationError("COMPOSITE requires a nonempty factor list")
            object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def su2(cls, j, s: float = 0.0) -> "KernelSpec":
        return cls(Family.SU2, j=j, s=s)

    @classmethod
    def wootters(cls, s: float = 0.0) -> "KernelSpec":
        return cls(Family.WOOTTERS, s=s)

    @classmethod
    def sun(cls, N: int, s: float = 0.0) -> "KernelSpec":
        return cls(Family.SUN, N=int(N), s=s)

    @classmethod
    def hw(cls, cutoff: int = 40, s: float = 0.0) -> "KernelSpec":
        return cls(Family.HW, cutoff=int(cutoff), s=s)

    @classmethod
    def composite(cls, factors, s: float = 0.0) -> "KernelSpec":
        return cls(Family.COMPOSITE, factors=tuple(factors), s=s)

    def with_s(self, s: float) -> "KernelSpec":
        return replace(self, s=float(s))

    @property
    def dim(self) -> int:
        if self.family is Family.SU2:
            return int(round(2 * self.j)) + 1
        if self.family is Family.WOOTTERS:
            return 2
        if self.family is Family.SUN:
            return int(self.N)
        if self.family is Family.HW:
            return int(self.cutoff) + 1
        return int(np.prod([f.dim for f in self.factors]))

    def same_family(self, other: "KernelSpec") -> bool:
        return self.with_s(0.0) == other.with_s(0.0)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a phase-space function on a set of points.

    Attributes
    ----------
    values : ndarray
        One value per point (leading axis).
    spec : KernelSpec
        Family and ordering parameter the function was generated with.
    grid : object
        Point description: a :class:`~phasespace.quadrature.SphereGrid`,
        an array of complex ``alpha`` values, lattice points, etc.
    meta : dict
        Free-form provenance (warnings, operator label, ...).
    """

    values: np.ndarray
    spec: KernelSpec
    grid: Any
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def s(self) -> float:
        return self.spec.s

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values) and bool(np.any(np.abs(self.values.imag) > 1e-12))

    def real(self) -> np.ndarray:
        return np.real(self.values)
