"""Exception and warning classes shared across the package."""


class PhaseSpaceError(Exception):
    """Base class for all library errors."""


class ValidationError(PhaseSpaceError, ValueError):
    """An input violates a documented invariant (shape, hermiticity, trace...)."""


class DomainError(PhaseSpaceError, ValueError):
    """Arguments lie outside the mathematical domain of an operation."""


class GridDegreeError(PhaseSpaceError, ValueError):
    """A quadrature grid cannot resolve the band limit required by an operation."""


class FamilyMismatchError(PhaseSpaceError, ValueError):
    """Two phase-space functions belong to incompatible kernel families."""


class StepBoundError(PhaseSpaceError, ValueError):
    """A time step exceeds the stability bound of the integrator."""


class AliasingError(PhaseSpaceError, ValueError):
    """A grid function carries too much spectral weight near the Nyquist band."""


class RankDeficiencyError(PhaseSpaceError, ValueError):
    """A sampling net does not determine all unknown coefficients."""


class TruncationWarning(UserWarning):
    """A truncated Fock-space computation may be inaccurate."""


class ConditioningWarning(UserWarning):
    """Coefficients are large enough that round-off may dominate."""
