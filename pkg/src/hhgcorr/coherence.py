"""First-order correlation functions of a single harmonic mode.

In the quasi-stationary (long driving pulse) limit both contributions share
the same pure phase factor,

    G1_coh(tau) = q^2 e^{-i w_q tau} |d_hat(w_q)|^2,
    G1_inc(tau) = q^2 e^{-i w_q tau} integral dv |z_hat_v(w_q)|^2,

with d_hat the finite-window transform of <d(t)> and z_hat_v that of the
emission amplitude conj(d_table(v, t)), both over the retained post-warm-up
cycles. Consequently |g1(tau)| = 1: harmonics are first-order coherent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .dipole import DipoleRecord, TransitionTable
from .errors import DegenerateModeError
from .numerics import cumulative_trapezoid, trapezoid, windowed_transform

__all__ = ["CorrelationSeries", "g1_coherent", "g1_incoherent",
           "g1_normalized", "g1_equal_time", "equal_time_buildup"]


@dataclass
class CorrelationSeries:
    tau: np.ndarray
    coh: np.ndarray
    inc: np.ndarray
    normalized: np.ndarray | None
    q: int

    @property
    def total(self) -> np.ndarray:
        return self.coh + self.inc


def _mode_transform_dipole(record: DipoleRecord, config: RunConfig) -> complex:
    t_w, d_w = record.retained()
    return complex(windowed_transform(d_w, t_w, config.q * config.omega_l, sign=-1))


def _mode_intensity_inc(table: TransitionTable, config: RunConfig) -> float:
    i_w = _warmup_index(table, config)
    t_w = table.t.values()[i_w:]
    z_hat = windowed_transform(np.conj(table.d[:, i_w:]), t_w,
                               config.q * config.omega_l, sign=-1, axis=1)
    return float(trapezoid(np.abs(z_hat) ** 2, grid=table.v))


def _warmup_index(table: TransitionTable, config: RunConfig) -> int:
    boundary = config.warmup_cycles * 2.0 * np.pi / config.omega_l
    return int(np.ceil(boundary / table.t.spacing - 1e-9))


def g1_coherent(record: DipoleRecord, config: RunConfig,
                tau: np.ndarray) -> CorrelationSeries:
    """Coherent first-order correlation: constant modulus, phase -w_q tau."""
    tau = np.asarray(tau, dtype=float)
    w_q = config.q * config.omega_l
    weight = config.q**2 * abs(_mode_transform_dipole(record, config)) ** 2
    coh = weight * np.exp(-1j * w_q * tau)
    return CorrelationSeries(tau=tau, coh=coh, inc=np.zeros_like(coh),
                             normalized=None, q=config.q)


def g1_incoherent(table: TransitionTable, config: RunConfig,
                  tau: np.ndarray) -> CorrelationSeries:
    """Incoherent first-order correlation from the continuum transitions."""
    tau = np.asarray(tau, dtype=float)
    w_q = config.q * config.omega_l
    weight = config.q**2 * _mode_intensity_inc(table, config)
    inc = weight * np.exp(-1j * w_q * tau)
    return CorrelationSeries(tau=tau, coh=np.zeros_like(inc), inc=inc,
                             normalized=None, q=config.q)


def g1_normalized(coh: CorrelationSeries, inc: CorrelationSeries) -> CorrelationSeries:
    """g1(tau) = (G1_coh + G1_inc) / |G1_coh(0) + G1_inc(0)|; |g1| = 1."""
    if coh.q != inc.q or coh.tau.shape != inc.tau.shape:
        raise ValueError("series must share the harmonic order and tau grid")
    total = coh.coh + inc.inc
    denom = abs(total[0])
    if denom == 0.0:
        raise DegenerateModeError(f"harmonic q={coh.q} has zero intensity")
    return CorrelationSeries(tau=coh.tau, coh=coh.coh, inc=inc.inc,
                             normalized=total / denom, q=coh.q)


def g1_equal_time(record: DipoleRecord, table: TransitionTable,
                  config: RunConfig, t: float) -> float:
    """Equal-time intensity <I_q(t)> with running upper integration limit t.

    Note: the incoherent part does not vanish for a switched-off drive; the
    table's ground-state dipole fluctuations leave a static background.
    """
    coh, inc = equal_time_buildup(record, table, config)
    i = int(np.argmin(np.abs(record.t.values() - t)))
    return float(coh[i] + inc[i])


def equal_time_buildup(record: DipoleRecord, table: TransitionTable,
                       config: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    """(coherent, incoherent) running intensities on the full time grid."""
    if record.t.n != table.t.n:
        raise ValueError("record and table must share the time grid")
    t = record.t.values()
    w_q = config.q * config.omega_l
    kernel = np.exp(-1j * w_q * t)
    coh_run = cumulative_trapezoid(kernel * record.d, record.t.spacing)
    coh = config.q**2 * np.abs(coh_run) ** 2
    z_run = cumulative_trapezoid(kernel * np.conj(table.d), table.t.spacing, axis=1)
    inc = config.q**2 * trapezoid(np.abs(z_run) ** 2, grid=table.v, axis=0)
    return coh, inc
