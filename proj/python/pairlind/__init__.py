"""Two-photon qubit-oscillator cooling toolkit.

Thin wrapper over the C++ extension: su(1,1) operator construction, rate
derivations, full and reduced Lindblad generators, steady-state solvers,
closed-form photon statistics and detuning sweeps.
"""

from ._core import *  # noqa: F401,F403
from ._core import __all__ as _core_all

__all__ = list(_core_all)
__version__ = "0.1.0"
