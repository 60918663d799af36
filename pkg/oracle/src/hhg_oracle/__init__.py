"""Independent reference implementations for golden-value generation."""

__version__ = "0.1.0"

from .golden import GoldenRecord, make_dipole_record, make_g2_record
from .reference import Scenario, build_tables, golden_dipole, golden_g2

__all__ = ["__version__", "GoldenRecord", "Scenario", "build_tables",
           "golden_dipole", "golden_g2", "make_dipole_record", "make_g2_record"]
