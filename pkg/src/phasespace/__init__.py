"""Phase-space representations of quantum states.

Kernels and s-ordered functions for the Heisenberg-Weyl, SU(2), SU(N) and
qubit-lattice families, composite systems, figures of merit, spin
tomography and Moyal dynamics on a grid.
"""
from .errors import *  # noqa: F401,F403
from .types import Family, KernelSpec, SampledFunction

__version__ = "0.1.0"

__all__ = ["Family", "KernelSpec", "SampledFunction", "__version__"]
