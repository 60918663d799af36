"""Closed-form strong-field primitives in atomic units.

Drive: flat-top cosine E(t) = E0 cos(w t + phi) on [t_start, t_end], zero
outside. The vector potential follows E = -dA/dt with zero integration
constant, A(t) = -(E0/w) sin(w t + phi) inside the pulse, held constant
outside so it stays continuous (and zero before the pulse when phi = 0).

The continuum electron with canonical momentum p has kinematic momentum
p + A(t); the accumulated phase is the semiclassical action

    S(p, t2, t1) = 1/2 * integral_{t1}^{t2} (p + A)^2 dtau + Ip * (t2 - t1)

and the classical excursion dr(p, t, t0) = dS/dp = integral (p + A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import adaptive_quad, QuadResult

__all__ = [
    "LaserField", "AtomSpec", "electric_field", "vector_potential",
    "action", "excursion", "dipole_matrix_element",
    "a_integral", "a_squared_integral", "action_closed", "excursion_closed",
]


@dataclass(frozen=True)
class LaserField:
    e0: float
    omega: float
    phase: float = 0.0
    t_start: float = 0.0
    t_end: float = math.inf

    def __post_init__(self):
        if self.e0 < 0 or not np.isfinite(self.e0):
            raise ValueError("e0 must be finite and >= 0")
        if self.omega <= 0 or not np.isfinite(self.omega):
            raise ValueError("omega must be finite and > 0")
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @classmethod
    def from_cycles(cls, e0: float, omega: float, phase: float = 0.0,
                    n_cycles: int = 8, t_start: float = 0.0) -> "LaserField":
        return cls(e0, omega, phase, t_start, t_start + n_cycles * 2.0 * math.pi / omega)


@dataclass(frozen=True)
class AtomSpec:
    """Hydrogenic 1s target: ionization potential and momentum scale kappa."""

    ip: float
    kappa: float

    def __post_init__(self):
        if self.ip <= 0 or not np.isfinite(self.ip):
            raise ValueError("ip must be finite and > 0")
        if self.kappa <= 0 or not np.isfinite(self.kappa):
            raise ValueError("kappa must be finite and > 0")


def electric_field(laser: LaserField, t):
    """E(t), exactly zero outside the pulse window."""
    t = np.asarray(t, dtype=float)
    inside = (t >= laser.t_start) & (t <= laser.t_end)
    out = np.where(inside, laser.e0 * np.cos(laser.omega * t + laser.phase), 0.0)
    return out if out.ndim else float(out)


def _a_inside(laser: LaserField, t):
    return -(laser.e0 / laser.omega) * np.sin(laser.omega * np.asarray(t, dtype=float) + laser.phase)


def vector_potential(laser: LaserField, t):
    """A(t); constant continuation outside the pulse keeps A continuous."""
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, laser.t_start, laser.t_end if np.isfinite(laser.t_end) else None)
    out = _a_inside(laser, tc)
    return out if out.ndim else float(out)


def _antideriv_a(laser: LaserField, t):
    """F(t) = integral_{t_start}^{t} A, piecewise exact across the pulse edges."""
    t = np.asarray(t, dtype=float)
    ts, te = laser.t_start, laser.t_end
    tc = np.clip(t, ts, te if np.isfinite(te) else None)
    inside = (laser.e0 / laser.omega**2) * (np.cos(laser.omega * tc + laser.phase)
                                            - np.cos(laser.omega * ts + laser.phase))
    out = inside + _a_inside(laser, ts) * np.minimum(t - ts, 0.0)
    if np.isfinite(te):
        out = out + _a_inside(laser, te) * np.maximum(t - te, 0.0)
    return out


def _antideriv_a2(laser: LaserField, t):
    """G(t) = integral_{t_start}^{t} A^2, piecewise exact."""
    t = np.asarray(t, dtype=float)
    ts, te = laser.t_start, laser.t_end
    tc = np.clip(t, ts, te if np.isfinite(te) else None)
    amp2 = (laser.e0 / laser.omega) ** 2
    u = laser.omega * tc + laser.phase
    us = laser.omega * ts + laser.phase
    inside = amp2 * (0.5 * (tc - ts) - (np.sin(2 * u) - np.sin(2 * us)) / (4 * laser.omega))
    out = inside + _a_inside(laser, ts) ** 2 * np.minimum(t - ts, 0.0)
    if np.isfinite(te):
        out = out + _a_inside(laser, te) ** 2 * np.maximum(t - te, 0.0)
    return out


def a_integral(laser: LaserField, t1, t2):
    """integral_{t1}^{t2} A(tau) dtau (closed form, any argument order)."""
    return _antideriv_a(laser, t2) - _antideriv_a(laser, t1)


def a_squared_integral(laser: LaserField, t1, t2):
    """integral_{t1}^{t2} A(tau)^2 dtau (closed form, any argument order)."""
    return _antideriv_a2(laser, t2) - _antideriv_a2(laser, t1)


def action_closed(p, t2, t1, laser: LaserField, atom: AtomSpec):
    """S(p, t2, t1) from the analytic antiderivatives (vectorized)."""
    p = np.asarray(p, dtype=float)
    dt = np.asarray(t2, dtype=float) - np.asarray(t1, dtype=float)
    return (0.5 * p**2 + atom.ip) * dt + p * a_integral(laser, t1, t2) \
        + 0.5 * a_squared_integral(laser, t1, t2)


def excursion_closed(p, t, t0, laser: LaserField):
    """dr(p, t, t0) = p*(t - t0) + integral A, the classical displacement."""
    p = np.asarray(p, dtype=float)
    dt = np.asarray(t, dtype=float) - np.asarray(t0, dtype=float)
    return p * dt + a_integral(laser, t0, t)


def action(p: float, t2: float, t1: float, laser: LaserField, atom: AtomSpec,
           tol: float = 1e-10) -> float:
    """Semiclassical action via adaptive quadrature of the kinetic integrand.

    Raises QuadratureError on non-convergence; requires t2 >= t1.
    """
    if t2 < t1:
        raise ValueError("action requires t2 >= t1")
    if t2 == t1:
        return 0.0
    res: QuadResult = adaptive_quad(
        lambda tau: 0.5 * (p + vector_potential(laser, tau)) ** 2, t1, t2, tol=tol)
    return float(res.value.real if np.iscomplexobj(res.value) else res.value) \
        + atom.ip * (t2 - t1)


def excursion(p: float, t: float, t0: float, laser: LaserField,
              tol: float = 1e-10) -> float:
    """Excursion via adaptive quadrature; equals d(action)/dp."""
    if t < t0:
        raise ValueError("excursion requires t >= t0")
    if t == t0:
        return 0.0
    res = adaptive_quad(lambda tau: p + vector_potential(laser, tau), t0, t, tol=tol)
    return float(res.value)


def dipole_matrix_element(p, atom: AtomSpec):
    """<p|d|g> for a hydrogenic 1s orbital: (8i/pi) sqrt(2 kappa^5) p / (p^2 + kappa^2)^2.

    Purely imaginary and odd in p; |d| peaks at p^2 = kappa^2 / 3.
    """
    p = np.asarray(p, dtype=float)
    k = atom.kappa
    out = (8j / np.pi) * np.sqrt(2.0 * k**5) * p / (p**2 + k**2) ** 2
    return out if out.ndim else complex(out)
