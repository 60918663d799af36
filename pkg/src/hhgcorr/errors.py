"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid run configuration. Carries one message per offending key."""

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        lines = "; ".join(f"{k}: {v}" for k, v in sorted(self.problems.items()))
        super().__init__(f"invalid configuration ({lines})")


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge within the subdivision cap.

    ``best estimate`` and ``error`` hold the last (value, error-estimate)
    pair; ``where`` optionally identifies the offending coordinates,
    e.g. a ``(p, t)`` pair in the dipole integral.
    """

    def __init__(self, message: str, best_estimate=None, error=None, where=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error = error
        self.where = where


class DegenerateModeError(ZeroDivisionError):
    """A normalized correlation was requested for a mode with zero intensity."""


class CacheMissError(KeyError):
    """No usable cache entry (absent, corrupt, or config mismatch)."""
