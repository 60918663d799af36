"""N-emitter scaling of the correlation functions.

First order is exact: the coherent part scales as N^2, the incoherent part
as N. For the intensity correlation the four-index emitter sum is expanded
in falling factorials and truncated after the leading orders,

    numerator_N = N * K4
                + N(N-1)(N-2)   * sum of the six two-point partition kernels
                + N(N-1)(N-2)(N-3) * K_coh4,

with K4 the single-atom numerator, K_coh4 the pure mean-field kernel, and
each partition kernel one pairing <d><d><d d> preserving the time-argument
order. Dropped O(N^3)/O(N^2) remainders follow the source expansion, so
N = 2, 3 results are flagged as truncated. The denominator is the exact
[N^2 G1_coh + N G1_inc] product at the two times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .g2 import G2Components

__all__ = ["NScaling", "PartitionKernels", "g1_many", "partition_kernels",
           "g2_many", "sweep_n", "TRUNCATION_NOTE"]

TRUNCATION_NOTE = ("truncated expansion: dropped O(N^3) emitter terms are "
                   "not small for N in {2, 3}")


@dataclass(frozen=True)
class NScaling:
    """Falling-factorial weights of the truncated emitter expansion."""

    n_atoms: int

    def __post_init__(self):
        if self.n_atoms < 1 or self.n_atoms != int(self.n_atoms):
            raise ValueError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")

    @property
    def single(self) -> int:
        return self.n_atoms

    @property
    def pair_partitions(self) -> int:
        """N! / (N-3)! -- zero below N = 3."""
        n = self.n_atoms
        return n * (n - 1) * (n - 2) if n >= 3 else 0

    @property
    def coherent4(self) -> int:
        """N! / (N-4)! -- zero below N = 4."""
        n = self.n_atoms
        return n * (n - 1) * (n - 2) * (n - 3) if n >= 4 else 0

    @property
    def truncated(self) -> bool:
        return self.n_atoms in (2, 3)


def g1_many(coh, inc, n_atoms: int):
    """Exact first-order scaling: (N^2 * coherent, N * incoherent)."""
    scale = NScaling(n_atoms)
    n = float(scale.n_atoms)
    return n * n * np.asarray(coh), n * np.asarray(inc)


@dataclass
class PartitionKernels:
    """tau-resolved ingredients of the truncated many-atom numerator."""

    tau: np.ndarray
    k4: np.ndarray             # single-atom numerator (complex, real-valued)
    six_sum: np.ndarray        # sum of the six partition kernels
    coh4: np.ndarray           # |M|^2 |M_tau|^2
    g1_coh_0: float
    g1_inc_0: float
    g1_coh_tau: np.ndarray
    g1_inc_tau: np.ndarray
    q: int
    t_ref: float


def partition_kernels(components: G2Components) -> PartitionKernels:
    """Assemble the six ordered pair partitions from the stored transforms.

    Pairings are labeled by the slots carrying the two-time correlator
    <d(t_a) d(t_b)>; slots 2 and 3 are tau-shifted, slot phases follow the
    typeset convention (t1, t2 -> e^{-i w_q t}; t3, t4 -> e^{+i w_q t}).
    The two intensity pairings (1,4) and (2,3) take their fluctuation part
    in the emission-side order - they are the equal-time intensities that
    must cancel against the denominator's N^3 pieces - while the four
    non-intensity pairings keep the typeset ordering, exactly like the
    single-atom numerator terms.
    """
    tr = components.transforms
    if tr is None:
        raise ValueError("components lack transforms; run the factorized path")
    w_v = tr.w_v
    mm = tr.m_minus
    mp = np.conj(mm)
    a_p = tr.a_plus
    a_m = tr.a_minus
    n_tau = len(tr.window.shifts)

    six = np.empty(n_tau, dtype=complex)
    coh4 = np.empty(n_tau, dtype=float)
    for j in range(n_tau):
        m_t = tr.m_minus_tau[j]
        mp_t = np.conj(m_t)
        a_pt = tr.a_plus_tau[j]
        a_mt = tr.a_minus_tau[j]

        p14 = (mm * mp + np.sum(w_v * np.conj(a_p) * a_p)) * m_t * mp_t
        p23 = (m_t * mp_t + np.sum(w_v * np.conj(a_pt) * a_pt)) * mm * mp
        p12 = (mm * m_t + np.sum(w_v * a_m * np.conj(a_pt))) * mp_t * mp
        p13 = (mm * mp_t + np.sum(w_v * a_m * np.conj(a_mt))) * m_t * mp
        p24 = (m_t * mp + np.sum(w_v * a_mt * np.conj(a_m))) * mm * mp_t
        p34 = (mp_t * mp + np.sum(w_v * a_pt * np.conj(a_m))) * mm * m_t
        six[j] = p12 + p13 + p14 + p23 + p24 + p34
        coh4[j] = abs(mm) ** 2 * abs(m_t) ** 2

    return PartitionKernels(
        tau=components.tau, k4=components.numerator, six_sum=six, coh4=coh4,
        g1_coh_0=tr.g1_coh_0, g1_inc_0=tr.g1_inc_0,
        g1_coh_tau=tr.g1_coh_tau(), g1_inc_tau=tr.g1_inc_tau(),
        q=components.q, t_ref=components.t_ref)


def g2_many(kernels: PartitionKernels, n_atoms: int) -> np.ndarray:
    """g2(tau; N) from precomputed kernels; N = 1 reduces to the single atom."""
    scale = NScaling(n_atoms)
    num = (float(scale.single) * kernels.k4.real
           + float(scale.pair_partitions) * kernels.six_sum.real
           + float(scale.coherent4) * kernels.coh4)
    n = float(n_atoms)
    g1_0 = n * n * kernels.g1_coh_0 + n * kernels.g1_inc_0
    g1_t = n * n * kernels.g1_coh_tau + n * kernels.g1_inc_tau
    return num / (g1_0 * g1_t)


def sweep_n(kernels: PartitionKernels, n_list) -> dict[int, np.ndarray]:
    """One g2(tau; N) series per requested emitter count (kernels reused)."""
    return {int(n): g2_many(kernels, int(n)) for n in n_list}
