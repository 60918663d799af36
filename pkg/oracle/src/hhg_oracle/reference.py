"""Slow, deliberately simple reference physics.

Everything here is re-derived from scratch: the drive and its
antiderivatives, the semiclassical action, the transition amplitudes, the
time-dependent dipole (full-interval adaptive vector quadrature per output
time), and the literal four-nested-trapezoid intensity correlator. None of
it imports or mirrors the production engine; agreement between the two is
the point of the exercise.

Conventions (shared physics, not shared code): atomic units; drive
E(t) = E0 cos(w t) on [0, n_cycles T]; canonical momentum v, kinematic
v + A(t); stored transition amplitude x(v,t) = e^{-iS(v,t,0)} <g|d|v+A(t)>
with <p|d|g> = (8i/pi) sqrt(2 kappa^5) p (p^2+kappa^2)^-2; mode phases
t1, t2 -> e^{-i w_q t}, t3, t4 -> e^{+i w_q t}; two-point kernels take the
emission-side pairing conj(x)(early) x(late), the irreducible four-point
terms follow the typeset expressions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec


@dataclass(frozen=True)
class Scenario:
    """Physics inputs of one golden-generation run."""

    e0: float = 0.053
    omega: float = 0.057
    ip: float = 0.5
    kappa: float = 0.5
    n_cycles: int = 2
    n_t: int = 47
    n_v: int = 40
    v_lim: float = 5.0

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def t_end(self) -> float:
        return self.n_cycles * self.period

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_t)

    def v_grid(self) -> np.ndarray:
        return np.linspace(-self.v_lim, self.v_lim, self.n_v)

    def key_string(self) -> str:
        return ",".join(f"{k}={getattr(self, k)!r}" for k in (
            "e0", "omega", "ip", "kappa", "n_cycles", "n_t", "n_v", "v_lim"))


# -- drive ----------------------------------------------------------------

def field(sc: Scenario, t):
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= sc.t_end)
    return np.where(inside, sc.e0 * np.cos(sc.omega * t), 0.0)


def a_pot(sc: Scenario, t):
    tc = np.clip(np.asarray(t, dtype=float), 0.0, sc.t_end)
    return -(sc.e0 / sc.omega) * np.sin(sc.omega * tc)


def _ia(sc: Scenario, t):
    # integral of A from 0, constant continuation after the pulse (A(t_end)=0
    # for whole cycle counts, so the continuation adds nothing)
    tc = np.clip(np.asarray(t, dtype=float), 0.0, sc.t_end)
    inside = (sc.e0 / sc.omega**2) * (np.cos(sc.omega * tc) - 1.0)
    tail = a_pot(sc, sc.t_end) * np.maximum(np.asarray(t, float) - sc.t_end, 0.0)
    return inside + tail


def _ia2(sc: Scenario, t):
    tc = np.clip(np.asarray(t, dtype=float), 0.0, sc.t_end)
    amp2 = (sc.e0 / sc.omega) ** 2
    inside = amp2 * (0.5 * tc - np.sin(2.0 * sc.omega * tc) / (4.0 * sc.omega))
    tail = a_pot(sc, sc.t_end) ** 2 * np.maximum(np.asarray(t, float) - sc.t_end, 0.0)
    return inside + tail


def action0(sc: Scenario, v, t):
    """S(v, t, 0), broadcast over a leading momentum axis."""
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    vb = v.reshape(v.shape + (1,) * t.ndim)
    return (0.5 * vb**2 + sc.ip) * t + vb * _ia(sc, t) + 0.5 * _ia2(sc, t)


def matrix_element(sc: Scenario, p):
    return (8j / np.pi) * np.sqrt(2.0 * sc.kappa**5) * np.asarray(p) \
        / (np.asarray(p) ** 2 + sc.kappa**2) ** 2


# -- dipole expectation value ----------------------------------------------

def golden_dipole(sc: Scenario, epsabs: float = 1e-10) -> np.ndarray:
    """<d(t)> on the scenario grid: for every output time the inner
    ionization-time integral runs over the full history with scipy's
    adaptive vector quadrature (all momenta at once), then the momentum
    integral is a plain trapezoid. Deterministic and slow on purpose.
    """
    t_out = sc.t_grid()
    v = sc.v_grid()
    out = np.zeros(t_out.size)
    for k, t2 in enumerate(t_out):
        if t2 == 0.0:
            continue
        s2 = action0(sc, v, np.asarray(t2))
        outer = np.conj(matrix_element(sc, v + a_pot(sc, t2))) * np.exp(-1j * s2)

        def inner(t1):
            s1 = action0(sc, v, np.asarray(t1))
            return np.exp(1j * s1) * field(sc, t1) * matrix_element(sc, v + a_pot(sc, t1))

        hist, _ = quad_vec(inner, 0.0, float(t2), epsabs=epsabs, epsrel=1e-10,
                           limit=2000, quadrature="gk21")
        integrand = 1j * outer * hist
        out[k] = 2.0 * np.real(np.trapezoid(integrand, v))
    return out


# -- transition tables -------------------------------------------------------

@dataclass
class Tables:
    v: np.ndarray
    t: np.ndarray
    x: np.ndarray      # e^{-iS} <g|d|v+A(t)>
    dr: np.ndarray     # excursion v t + int A
    dx_dv: np.ndarray  # np.gradient of x along v


def build_tables(sc: Scenario) -> Tables:
    v = sc.v_grid()
    t = sc.t_grid()
    s = action0(sc, v, t)
    x = np.exp(-1j * s) * np.conj(matrix_element(sc, v[:, None] + a_pot(sc, t)))
    dr = v[:, None] * t + _ia(sc, t)
    dx_dv = np.gradient(x, v, axis=0)
    return Tables(v=v, t=t, x=x, dr=dr, dx_dv=dx_dv)


# -- literal intensity correlator --------------------------------------------

MAX_WINDOW = 25
MAX_MOMENTA = 40


def golden_g2(sc: Scenario, q: int, shifts: tuple[int, ...],
              dipole: np.ndarray | None = None,
              tables: Tables | None = None) -> dict[str, np.ndarray]:
    """Brute-force g2 numerator terms and the assembled correlation.

    Four nested time sums (trapezoid weights folded into the phase vectors)
    inside a momentum trapezoid, one delay at a time. Grid-size guards keep
    the run under control; no factorization anywhere.
    """
    t = sc.t_grid()
    dt = t[1] - t[0]
    k_ref = int(round(sc.period / dt))
    n_w = k_ref + 1
    if n_w > MAX_WINDOW or sc.n_v > MAX_MOMENTA:
        raise ValueError(
            f"guard: window {n_w} > {MAX_WINDOW} or momenta {sc.n_v} > "
            f"{MAX_MOMENTA}; the literal evaluation refuses fine grids")
    if k_ref + max(shifts) > sc.n_t - 1:
        raise ValueError("tau shifts run past the sampled grid")

    m = golden_dipole(sc) if dipole is None else dipole
    tab = build_tables(sc) if tables is None else tables
    w_q = q * sc.omega

    w_t = np.full(n_w, dt)
    w_t[0] = w_t[-1] = 0.5 * dt
    e_m = w_t * np.exp(-1j * w_q * t[:n_w])
    e_p = np.conj(e_m)
    w_v = np.full(sc.n_v, tab.v[1] - tab.v[0])
    w_v[0] = w_v[-1] = 0.5 * (tab.v[1] - tab.v[0])

    # slot phases: t1 -, t2 -, t3 +, t4 +
    phase4 = (e_m[:, None, None, None] * e_m[None, :, None, None]
              * e_p[None, None, :, None] * e_p[None, None, None, :])

    x1 = tab.x[:, :n_w]
    z1 = np.conj(x1)
    dx1 = tab.dx_dv[:, :n_w]
    m1 = m[:n_w]

    res = {name: np.zeros(len(shifts), dtype=complex)
           for name in ("t_coh", "t_cross", "t_cc")}
    res["denominator"] = np.zeros(len(shifts))
    res["tau"] = dt * np.asarray(shifts, dtype=float)

    for j, s in enumerate(shifts):
        sl = slice(s, s + n_w)
        xs, zs = tab.x[:, sl], np.conj(tab.x[:, sl])
        dxs = tab.dx_dv[:, sl]
        rs = tab.dr[:, sl]
        ms = m[sl]

        cohm = m1[:, None] * m1[None, :]
        pair0 = cohm + np.einsum("v,va,vb->ab", w_v, z1, x1)
        pair_s = ms[:, None] * ms[None, :] \
            + np.einsum("v,va,vb->ab", w_v, zs, xs)
        # denominator through the same four-nested sum as the numerator's
        # coherent kernel: in the fluctuation-free limit the two 4-D arrays
        # are elementwise identical, so g2 comes out exactly 1
        mids = pair_s[None, :, :, None]
        den_kernel = pair0[:, None, None, :] * mids
        res["denominator"][j] = np.sum(phase4 * den_kernel).real
        res["t_coh"][j] = np.sum(phase4 * (cohm[:, None, None, :] * mids))

        four = np.zeros((n_w,) * 4, dtype=complex)
        for i in range(sc.n_v):
            middle = (zs[i][:, None] * ms[None, :]
                      + rs[i][:, None] * zs[i][None, :]
                      + 1j * np.broadcast_to(np.conj(dxs[i]), (n_w, n_w)))
            four += w_v[i] * (x1[i][:, None, None, None]
                              * middle[None, :, :, None]
                              * m1[None, None, None, :])
        half = np.sum(phase4 * four)
        res["t_cross"][j] = half + np.conj(half)

        pair12 = np.einsum("v,va,vb->ab", w_v, x1, zs)
        pair43 = np.einsum("v,vd,vc->dc", w_v, z1, xs)
        four = pair12[:, :, None, None] * pair43.T[None, None, :, :]
        for i in range(sc.n_v):
            four = four + w_v[i] * (x1[i][:, None, None, None]
                                    * rs[i][None, :, None, None]
                                    * rs[i][None, None, :, None]
                                    * z1[i][None, None, None, :])
        d12 = np.gradient(x1[:, :, None] * rs[:, None, :], tab.v, axis=0)
        four = four + (-1j) * np.einsum("v,vd,vab->abd", w_v, z1, d12)[:, :, None, :]
        d43 = np.gradient(z1[:, :, None] * rs[:, None, :], tab.v, axis=0)
        g431 = 1j * np.einsum("v,va,vdc->adc", w_v, x1, d43)
        four = four + np.transpose(g431[:, None, :, :], (0, 1, 3, 2))
        four = four + np.einsum("v,va,vd->ad", w_v, dx1,
                                np.conj(dx1))[:, None, None, :]
        res["t_cc"][j] = np.sum(phase4 * four)

    total = (res["t_coh"] + res["t_cross"] + res["t_cc"]).real
    res["g2"] = total / res["denominator"]
    return res
