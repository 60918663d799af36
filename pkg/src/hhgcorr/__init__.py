"""Quantum-optical field correlations of high harmonic generation.

Single- and many-emitter dipole dynamics, coherent/incoherent spectra, and
first/second order correlation functions of individual harmonic modes, all
in atomic units.
"""

__version__ = "0.1.0"

from .config import CONSTANTS, Constants, DerivedQuantities, RunConfig, derive
from .dipole import (DipoleRecord, TransitionTable, compute_dipole,
                     compute_transition_table)
from .errors import (CacheMissError, ConfigError, DegenerateModeError,
                     QuadratureError)
from .pulse import AtomSpec, LaserField

__all__ = [
    "__version__", "CONSTANTS", "Constants", "DerivedQuantities", "RunConfig",
    "derive", "DipoleRecord", "TransitionTable", "compute_dipole",
    "compute_transition_table", "AtomSpec", "LaserField", "ConfigError",
    "QuadratureError", "DegenerateModeError", "CacheMissError",
]
