"""Scattered field and the coherent / incoherent / total HHG spectra.

Spectra are reported per FFT bin on the harmonic-order axis q = w / w_L,
with the q^2 prefactor retained and hbar^2 g^4 = 1 (arbitrary units). The
finite-time transforms use exactly the retained post-warm-up window; the
delta functions of the infinite-time theory appear as discrete bins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, derive
from .dipole import DipoleRecord, TransitionTable
from .numerics import chunk_slices, resample_fft, run_chunked, trapezoid_weights, windowed_transform

__all__ = ["SpectrumResult", "scattered_field_time", "coherent_spectrum",
           "incoherent_spectrum", "nearest_bin", "peak_value"]


@dataclass
class SpectrumResult:
    orders: np.ndarray
    s_coh: np.ndarray
    s_inc: np.ndarray
    slices: dict[float, np.ndarray] = field(default_factory=dict)

    @property
    def s_total(self) -> np.ndarray:
        return self.s_coh + self.s_inc

    def __post_init__(self):
        if np.any(self.s_coh < 0) or np.any(self.s_inc < 0):
            raise ValueError("spectral densities must be non-negative")


def nearest_bin(orders: np.ndarray, q: float) -> int:
    return int(np.argmin(np.abs(orders - q)))


def peak_value(orders: np.ndarray, s: np.ndarray, q: float) -> float:
    return float(s[nearest_bin(orders, q)])


def scattered_field_time(record: DipoleRecord, config: RunConfig) -> np.ndarray:
    """<E_s^(+)(t)> summed over harmonic modes q = 1 .. just past the cutoff.

    Each mode contributes i q d_hat(w_q) e^{-i w_q t} with d_hat the
    finite-window transform of <d(t)> (e^{+i w t} kernel, post warm-up).
    """
    t_w, d_w = record.retained()
    dq = derive(config)
    t = record.t.values()
    out = np.zeros(t.size, dtype=complex)
    for q in range(1, dq.q_sum_max + 1):
        w_q = q * config.omega_l
        amp = windowed_transform(d_w, t_w, w_q, sign=+1)
        out += 1j * q * amp * np.exp(-1j * w_q * t)
    return out


def coherent_spectrum(record: DipoleRecord, config: RunConfig) -> SpectrumResult:
    """q^2 |FFT(<d(t)>)|^2 on the post-warm-up window, non-negative orders."""
    t_w, d_w = record.retained()
    series = resample_fft(t_w, d_w, config.n_fft, omega_ref=config.omega_l)
    keep = series.orders >= 0
    orders = series.orders[keep]
    s_coh = orders**2 * np.abs(series.amplitudes[keep]) ** 2
    return SpectrumResult(orders=orders, s_coh=s_coh, s_inc=np.zeros_like(s_coh))


def incoherent_spectrum(table: TransitionTable, config: RunConfig,
                        slice_momenta: tuple[float, ...] = (),
                        threads: int = 1) -> SpectrumResult:
    """Momentum integral of the per-v emission spectra.

    Per v the emission amplitude is the transform of conj(d_table(v, t)) on
    the retained window; squared magnitudes are reduced over v with
    trapezoid weights. ``slice_momenta`` keeps individual-v spectra
    (nearest grid momentum) for threshold-structure inspection.
    """
    i_w = _warmup_index(table, config)
    t_w = table.t.values()[i_w:]
    v = table.v.values()
    w_v = trapezoid_weights(table.v.n, table.v.spacing)

    probe = resample_fft(t_w, np.conj(table.d[0, i_w:]), config.n_fft,
                         omega_ref=config.omega_l)
    keep = probe.orders >= 0
    orders = probe.orders[keep]
    q2 = orders**2

    def one_chunk(sl: slice) -> np.ndarray:
        acc = np.zeros(orders.size)
        for i in range(sl.start, sl.stop):
            series = resample_fft(t_w, np.conj(table.d[i, i_w:]), config.n_fft)
            acc += w_v[i] * np.abs(series.amplitudes[keep]) ** 2
        return acc

    partials = run_chunked(one_chunk, chunk_slices(table.v.n), threads)
    total = partials[0]
    for part in partials[1:]:
        total = total + part

    slices: dict[float, np.ndarray] = {}
    for v_req in slice_momenta:
        i = int(np.argmin(np.abs(v - v_req)))
        series = resample_fft(t_w, np.conj(table.d[i, i_w:]), config.n_fft)
        slices[float(v[i])] = q2 * np.abs(series.amplitudes[keep]) ** 2

    return SpectrumResult(orders=orders, s_coh=np.zeros_like(total),
                          s_inc=q2 * total, slices=slices)


def _warmup_index(table: TransitionTable, config: RunConfig) -> int:
    boundary = config.warmup_cycles * 2.0 * np.pi / config.omega_l
    return int(np.ceil(boundary / table.t.spacing - 1e-9))
