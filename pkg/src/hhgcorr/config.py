"""Run configuration, unit conventions, and derived quantities.

Everything is in atomic units; hbar, the light-matter coupling g, and the
intensity conversion eta are fixed to 1 (they only set absolute scales that
either cancel in normalized correlations or amount to "arbitrary units" in
the spectra). The q^2 harmonic-order factor is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, asdict

import numpy as np

from .errors import ConfigError
from .numerics import Grid1D
from .pulse import AtomSpec, LaserField


@dataclass(frozen=True)
class Constants:
    """Fixed conventions; never configurable."""

    hbar: float = 1.0
    g: float = 1.0
    eta: float = 1.0


CONSTANTS = Constants()

#: Momentum-grid defaults: the first-order quantities converge at
#: p_lim = 3 / n_els = 2000, while the intensity-correlation integrals need
#: the wider, denser grid.
FIRST_ORDER_PROFILE = {"p_lim": 3.0, "n_els": 2000}
G2_PROFILE = {"p_lim": 5.0, "n_els": 2500}

#: Fig. 4-style emitter-count sweep grid (log10 N).
SWEEP_LOG10_N = (2.0, 2.7, 3.4, 4.1, 4.8, 5.5, 6.7, 7.0)


@dataclass(frozen=True)
class RunConfig:
    e0: float = 0.053
    omega_l: float = 0.057
    phase: float = 0.0
    n_cycles: int = 8
    ip: float = 0.5
    kappa: float | None = None       # default sqrt(ip/2); settable to the
                                     # conventional hydrogenic sqrt(2*ip)
    p_lim: float | None = None       # filled from the profile
    n_els: int | None = None
    n_t: int | None = None           # default 2*ceil(2*pi*n_cycles/omega_l)
    n_fft: int = 10000
    warmup_cycles: int = 1
    q: int = 11
    tau_samples: int = 100
    n_atoms: int = 1

    # -- resolution ------------------------------------------------------

    def resolved(self, profile: str = "first_order") -> "RunConfig":
        """Fill optional fields with their defaults and validate."""
        prof = G2_PROFILE if profile == "g2" else FIRST_ORDER_PROFILE
        kappa = self.kappa
        if kappa is None and self.ip > 0:
            kappa = math.sqrt(self.ip / 2.0)
        n_t = self.n_t
        if n_t is None and self.omega_l > 0:
            n_t = 2 * math.ceil(2.0 * math.pi * self.n_cycles / self.omega_l)
        cfg = replace(
            self,
            kappa=kappa,
            p_lim=self.p_lim if self.p_lim is not None else prof["p_lim"],
            n_els=self.n_els if self.n_els is not None else prof["n_els"],
            n_t=n_t,
        )
        cfg.validate()
        return cfg

    def validate(self, require_drive: bool = False) -> None:
        """Raise :class:`ConfigError` listing every offending key.

        ``require_drive`` additionally rejects e0 == 0 (the zero-field limit
        is legal for library-level tests but meaningless as a pipeline run).
        """
        bad: dict[str, str] = {}

        def positive(name, value, strict=True):
            if value is None:
                bad[name] = "missing (resolve the config first)"
            elif not np.isfinite(value):
                bad[name] = f"must be finite, got {value!r}"
            elif strict and value <= 0:
                bad[name] = f"must be > 0, got {value!r}"
            elif not strict and value < 0:
                bad[name] = f"must be >= 0, got {value!r}"

        positive("e0", self.e0, strict=require_drive)
        positive("omega_l", self.omega_l)
        positive("ip", self.ip)
        positive("kappa", self.kappa)
        positive("p_lim", self.p_lim)
        if not np.isfinite(self.phase):
            bad["phase"] = f"must be finite, got {self.phase!r}"
        if self.n_cycles < 1:
            bad["n_cycles"] = f"must be >= 1, got {self.n_cycles}"
        if self.n_els is None or self.n_els < 2:
            bad["n_els"] = f"must be >= 2, got {self.n_els}"
        if self.n_t is None or self.n_t < 2:
            bad["n_t"] = f"must be >= 2, got {self.n_t}"
        if self.n_t is not None and self.n_fft < self.n_t:
            bad["n_fft"] = f"must be >= n_t ({self.n_t}), got {self.n_fft}"
        if not (0 <= self.warmup_cycles < self.n_cycles):
            bad["warmup_cycles"] = f"must satisfy 0 <= warmup < n_cycles, got {self.warmup_cycles}"
        if self.q < 1 or self.q != int(self.q):
            bad["q"] = f"must be a positive integer, got {self.q!r}"
        if self.tau_samples < 2:
            bad["tau_samples"] = f"must be >= 2, got {self.tau_samples}"
        if self.n_atoms < 1:
            bad["n_atoms"] = f"must be >= 1, got {self.n_atoms}"
        if bad:
            raise ConfigError(bad)

    # -- views -----------------------------------------------------------

    def laser(self) -> LaserField:
        return LaserField.from_cycles(self.e0, self.omega_l, self.phase, self.n_cycles)

    def atom(self) -> AtomSpec:
        return AtomSpec(ip=self.ip, kappa=self.kappa)

    def time_grid(self) -> Grid1D:
        return Grid1D(0.0, self.n_cycles * 2.0 * math.pi / self.omega_l, self.n_t)

    def momentum_grid(self) -> Grid1D:
        return Grid1D(-self.p_lim, self.p_lim, self.n_els)

    def warmup_index(self) -> int:
        t = self.time_grid()
        boundary = self.warmup_cycles * 2.0 * math.pi / self.omega_l
        return int(math.ceil(boundary / t.spacing - 1e-9))

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedQuantities:
    period: float
    pulse_duration: float
    omega_q: float
    up: float
    cutoff_order: float

    @property
    def q_sum_max(self) -> int:
        """Upper harmonic index for summed-field reconstructions: just past cutoff."""
        return int(math.ceil(self.cutoff_order)) + 2


def derive(config: RunConfig) -> DerivedQuantities:
    """Period, pulse duration, mode frequency, ponderomotive energy, and the
    semiclassical cutoff order (Ip + 3.17 Up) / omega_L.

    Pure: identical configs give bitwise-identical outputs.
    """
    bad = {}
    for name in ("e0", "omega_l", "ip"):
        v = getattr(config, name)
        if not np.isfinite(v):
            bad[name] = f"must be finite, got {v!r}"
    if config.e0 < 0:
        bad["e0"] = f"must be >= 0, got {config.e0!r}"
    if config.omega_l <= 0:
        bad["omega_l"] = f"must be > 0, got {config.omega_l!r}"
    if config.ip <= 0:
        bad["ip"] = f"must be > 0, got {config.ip!r}"
    if bad:
        raise ConfigError(bad)
    period = 2.0 * math.pi / config.omega_l
    up = config.e0**2 / (4.0 * config.omega_l**2)
    return DerivedQuantities(
        period=period,
        pulse_duration=config.n_cycles * period,
        omega_q=config.q * config.omega_l,
        up=up,
        cutoff_order=(config.ip + 3.17 * up) / config.omega_l,
    )


# -- flat key-value config files ----------------------------------------------

_INT_KEYS = {"n_cycles", "n_els", "n_t", "n_fft", "warmup_cycles", "q",
             "tau_samples", "n_atoms"}
_FLOAT_KEYS = {"e0", "omega_l", "phase", "ip", "kappa", "p_lim"}


def parse_config_text(text: str) -> RunConfig:
    """Parse ``key = value`` lines (# comments allowed) into a RunConfig."""
    values: dict = {}
    bad: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                bad[f"line {lineno}"] = f"cannot parse {raw!r}"
                continue
            key, val = parts
        key = key.strip().lower()
        val = val.strip()
        if key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                bad[key] = f"expected integer, got {val!r}"
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                bad[key] = f"expected number, got {val!r}"
        else:
            bad[key] = "unknown key"
    if bad:
        raise ConfigError(bad)
    return RunConfig(**values)


def format_config(config: RunConfig) -> str:
    lines = []
    for key, value in config.as_dict().items():
        if value is None:
            continue
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"
