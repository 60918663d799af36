"""Reader for the production engine's binary cache files.

Only the on-disk layout is shared with the engine (documented in its
dipole module): an 8-byte magic, u32 version + padding, 32 raw hash bytes,
u64 dimensions, f64 grid bounds, then little-endian float64 payload
planes, matrices column-major in time.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC_DIP = b"HHGDIP1\n"
MAGIC_TAB = b"HHGTAB1\n"


@dataclass
class CachedDipole:
    t: np.ndarray
    d: np.ndarray
    warmup_index: int
    config_hash: str


@dataclass
class CachedTable:
    v: np.ndarray
    t: np.ndarray
    d: np.ndarray
    dr: np.ndarray
    dv_d: np.ndarray
    config_hash: str


def _header(fh, magic, n_dims, n_bounds):
    got = fh.read(8)
    if got != magic:
        raise ValueError(f"not a {magic!r} file (got {got!r})")
    version, _ = struct.unpack("<II", fh.read(8))
    if version != 1:
        raise ValueError(f"unsupported version {version}")
    cfg_hash = fh.read(32).hex()
    dims = struct.unpack(f"<{n_dims}Q", fh.read(8 * n_dims))
    bounds = struct.unpack(f"<{n_bounds}d", fh.read(8 * n_bounds))
    return cfg_hash, dims, bounds


def read_dipole(path: str | Path) -> CachedDipole:
    with open(path, "rb") as fh:
        cfg_hash, (n_t, warmup), (lo, hi) = _header(fh, MAGIC_DIP, 2, 2)
        d = np.frombuffer(fh.read(8 * n_t), dtype="<f8")
        if d.size != n_t:
            raise ValueError("truncated payload")
    return CachedDipole(t=np.linspace(lo, hi, n_t), d=d.astype(float),
                        warmup_index=int(warmup), config_hash=cfg_hash)


def read_table(path: str | Path) -> CachedTable:
    with open(path, "rb") as fh:
        cfg_hash, (n_v, n_t), (v_lo, v_hi, t_lo, t_hi) = _header(fh, MAGIC_TAB, 2, 4)
        planes = []
        for _ in range(5):
            buf = np.frombuffer(fh.read(8 * n_v * n_t), dtype="<f8")
            if buf.size != n_v * n_t:
                raise ValueError("truncated payload")
            planes.append(buf.reshape((n_v, n_t), order="F"))
    return CachedTable(v=np.linspace(v_lo, v_hi, n_v),
                       t=np.linspace(t_lo, t_hi, n_t),
                       d=planes[0] + 1j * planes[1], dr=planes[2].copy(),
                       dv_d=planes[3] + 1j * planes[4], config_hash=cfg_hash)
