"""Quantum Cramer-Rao bounds for two-phase estimation with a tritter and phase-sensitive amplifiers."""
from .errors import ConfigError, ConvergenceError, NumericalError, SingularQFIMError, TritterError, TruncationError
from .moments import MomentSet
from . import cfpoly, focksim
from .scenario import Scenario

__all__ = [
    "ConfigError", "ConvergenceError", "cfpoly", "focksim", "MomentSet", "NumericalError", "Scenario",
    "SingularQFIMError", "TritterError", "TruncationError",
]
__version__ = "0.1.0"
