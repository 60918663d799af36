"""Time-dependent dipole expectation value and bound-continuum transition
tables, plus their disk cache.

The dipole integral is evaluated per canonical momentum p as

    <d(t2)> = -2 Im[ D(p + A(t2)) e^{-i S(p, t2, 0)} G(p, t2) ]  integrated over p,
    G(p, t2) = integral_0^{t2} dt1  e^{+i S(p, t1, 0)} E(t1) D(p + A(t1)),

where D is the real odd amplitude of the hydrogenic matrix element
(<p|d|g> = i D(p)) and the action split S(p,t2,t1) = S(p,t2,0) - S(p,t1,0)
turns the inner integral into a cumulative one. G is computed with nested
Gauss-Kronrod panels per grid cell, vectorized across the momentum grid.

The transition table stores, on the (v, t) grid,

    d_table[v, t] = e^{-i S(v, t, 0)} <g|d|v + A(t)>,

its momentum derivative (finite differences along v), and the classical
excursion dr(v, t, 0). Cache files: cache/<hash>.dip and cache/<hash>.tab,
flat little-endian float64 payloads behind a short header (see _HEADER
docs); the content hash covers exactly the physics-relevant config keys.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import CacheMissError
from .numerics import (Grid1D, SegmentRule, chunk_slices, cumulative_kronrod,
                       grid_derivative, run_chunked, trapezoid_weights)
from .pulse import (LaserField, a_integral, a_squared_integral,
                    dipole_matrix_element, electric_field, vector_potential)

__all__ = [
    "DipoleRecord", "TransitionTable", "compute_dipole",
    "compute_transition_table", "physics_hash", "cache_store", "cache_load",
    "load_or_compute_dipole", "load_or_compute_table", "cache_dir_for",
]

_PHYSICS_KEYS = ("e0", "omega_l", "phase", "n_cycles", "ip", "kappa",
                 "p_lim", "n_els", "n_t", "warmup_cycles")

# header: magic(8) version(u32) pad(u32) hash(32 raw bytes) dims/bounds
_MAGIC_DIP = b"HHGDIP1\n"
_MAGIC_TAB = b"HHGTAB1\n"
_VERSION = 1


@dataclass
class DipoleRecord:
    """<d(t)> samples with the warm-up boundary index."""

    t: Grid1D
    d: np.ndarray
    warmup_index: int
    config_hash: str

    def retained(self) -> tuple[np.ndarray, np.ndarray]:
        """(times, samples) after the warm-up cut."""
        return self.t.values()[self.warmup_index:], self.d[self.warmup_index:]


@dataclass
class TransitionTable:
    """Sampled d_table(v,t), excursion dr(v,t,0) and d/dv of the table."""

    v: Grid1D
    t: Grid1D
    d: np.ndarray       # complex (n_v, n_t)
    dr: np.ndarray      # real    (n_v, n_t)
    dv_d: np.ndarray    # complex (n_v, n_t), finite-difference d/dv of d
    config_hash: str

    def emission(self) -> np.ndarray:
        """conj(d_table) = <v|d(t)|g>, the recombination-side amplitude."""
        return np.conj(self.d)


def _dipole_profile(p, kappa: float):
    """Real odd amplitude D with <p|d|g> = i D(p)."""
    p = np.asarray(p, dtype=float)
    return (8.0 / np.pi) * np.sqrt(2.0 * kappa**5) * p / (p**2 + kappa**2) ** 2


def _action_from_start(p, t, laser: LaserField, ip: float):
    """S(p, t, 0) for arrays p (batch) and t (any shape), broadcast."""
    ia = a_integral(laser, 0.0, t)
    ia2 = a_squared_integral(laser, 0.0, t)
    p = np.asarray(p, dtype=float)
    shp = (p.shape + (1,) * np.ndim(t)) if np.ndim(t) else p.shape
    pb = p.reshape(shp)
    return (0.5 * pb**2 + ip) * np.asarray(t) + pb * ia + 0.5 * ia2


def compute_dipole(config: RunConfig, threads: int = 1,
                   cell_tol: float = 1e-10) -> DipoleRecord:
    """Evaluate <d(t)> on the full time grid.

    Outer momentum integral: composite trapezoid over [-p_lim, p_lim].
    Inner time integral: cumulative Gauss-Kronrod (see module docstring),
    raising QuadratureError with the offending (p, t) on non-convergence.
    Deterministic for any thread count: momentum chunks have a fixed length
    and partial sums are reduced in chunk order.
    """
    config.validate()
    laser = config.laser()
    ip, kappa = config.ip, config.kappa
    tg = config.time_grid()
    pg = config.momentum_grid()
    t = tg.values()
    p = pg.values()
    w_p = trapezoid_weights(pg.n, pg.spacing)
    rule = SegmentRule(t)

    a_t = vector_potential(laser, t)
    s_t_common = a_squared_integral(laser, 0.0, t) * 0.5
    ia_t = a_integral(laser, 0.0, t)

    def one_chunk(sl: slice) -> np.ndarray:
        pc = p[sl]

        def inner(nodes):
            e = electric_field(laser, nodes)
            a = vector_potential(laser, nodes)
            s = _action_from_start(pc, nodes, laser, ip)
            return np.exp(1j * s) * (e * _dipole_profile(pc[:, None, None] + a, kappa))

        g = cumulative_kronrod(inner, rule, tol=cell_tol,
                               where_label=f"p in [{pc[0]:.4g}, {pc[-1]:.4g}]")
        s_out = (0.5 * pc[:, None] ** 2 + ip) * t + pc[:, None] * ia_t + s_t_common
        outer = _dipole_profile(pc[:, None] + a_t, kappa) * np.exp(-1j * s_out) * g
        return np.sum(w_p[sl, None] * outer, axis=0)

    # 128-wide momentum chunks keep the (chunk, segments, nodes) work arrays
    # small; the chunk length is fixed so results never depend on `threads`.
    partials = run_chunked(one_chunk, chunk_slices(pg.n, 128), threads)
    total = partials[0]
    for part in partials[1:]:
        total = total + part
    d = -2.0 * np.imag(total)
    return DipoleRecord(t=tg, d=d, warmup_index=config.warmup_index(),
                        config_hash=physics_hash(config))


def compute_transition_table(config: RunConfig, threads: int = 1) -> TransitionTable:
    """Tabulate d_table, dr and d/dv(d_table) on the (v, t) grid.

    Entries follow the closed forms in the module docstring; the derivative
    column is the second-order grid derivative along v of the stored table.
    """
    config.validate()
    laser = config.laser()
    tg = config.time_grid()
    vg = config.momentum_grid()
    t = tg.values()
    v = vg.values()

    a_t = vector_potential(laser, t)
    ia_t = a_integral(laser, 0.0, t)
    half_ia2 = 0.5 * a_squared_integral(laser, 0.0, t)

    d = np.empty((vg.n, tg.n), dtype=complex)
    dr = np.empty((vg.n, tg.n), dtype=float)

    def one_chunk(sl: slice):
        vc = v[sl, None]
        s = (0.5 * vc**2 + config.ip) * t + vc * ia_t + half_ia2
        mel = np.conj(dipole_matrix_element(vc + a_t, config.atom()))
        d[sl] = np.exp(-1j * s) * mel
        dr[sl] = vc * t + ia_t
        return None

    run_chunked(one_chunk, chunk_slices(vg.n), threads)
    dv_d = grid_derivative(d, dx=vg.spacing, axis=0)
    return TransitionTable(v=vg, t=tg, d=d, dr=dr, dv_d=dv_d,
                           config_hash=physics_hash(config))


# -- cache ---------------------------------------------------------------------

def physics_hash(config: RunConfig) -> str:
    """Content hash over the physics-relevant config keys only."""
    parts = []
    for key in _PHYSICS_KEYS:
        value = getattr(config, key)
        parts.append(f"{key}={float(value)!r}" if isinstance(value, float)
                     else f"{key}={value!r}")
    return hashlib.sha256("|".join(parts).encode()).hexdigest()


def cache_dir_for(explicit: str | os.PathLike | None = None) -> Path:
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get("HHG_CACHE_DIR", "cache"))


def _write_header(fh, magic: bytes, cfg_hash: str, dims: tuple[int, ...],
                  bounds: tuple[float, ...]):
    fh.write(magic)
    fh.write(struct.pack("<II", _VERSION, 0))
    fh.write(bytes.fromhex(cfg_hash))
    fh.write(struct.pack(f"<{len(dims)}Q", *dims))
    fh.write(struct.pack(f"<{len(bounds)}d", *bounds))


def _read_header(fh, magic: bytes, n_dims: int, n_bounds: int):
    got = fh.read(len(magic))
    if got != magic:
        raise CacheMissError(f"bad magic {got!r}")
    version, _ = struct.unpack("<II", fh.read(8))
    if version != _VERSION:
        raise CacheMissError(f"unsupported cache version {version}")
    cfg_hash = fh.read(32).hex()
    dims = struct.unpack(f"<{n_dims}Q", fh.read(8 * n_dims))
    bounds = struct.unpack(f"<{n_bounds}d", fh.read(8 * n_bounds))
    return cfg_hash, dims, bounds


def _atomic_write(path: Path, writer) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        writer(fh)
    os.replace(tmp, path)


def cache_store(obj: DipoleRecord | TransitionTable,
                cache_dir: str | os.PathLike | None = None) -> Path:
    """Persist a record or table; returns the file path. Round-trips bit-exactly."""
    base = cache_dir_for(cache_dir)
    if isinstance(obj, DipoleRecord):
        path = base / f"{obj.config_hash}.dip"

        def writer(fh):
            _write_header(fh, _MAGIC_DIP, obj.config_hash,
                          (obj.t.n, obj.warmup_index), (obj.t.lo, obj.t.hi))
            fh.write(np.ascontiguousarray(obj.d, dtype="<f8").tobytes())

        _atomic_write(path, writer)
        return path

    path = base / f"{obj.config_hash}.tab"

    def writer(fh):
        _write_header(fh, _MAGIC_TAB, obj.config_hash, (obj.v.n, obj.t.n),
                      (obj.v.lo, obj.v.hi, obj.t.lo, obj.t.hi))
        # planes in fixed order, each column-major in time (v fastest)
        for plane in (obj.d.real, obj.d.imag, obj.dr, obj.dv_d.real, obj.dv_d.imag):
            fh.write(np.asfortranarray(plane, dtype="<f8").tobytes(order="F"))

    _atomic_write(path, writer)
    return path


def cache_load(config: RunConfig, kind: str,
               cache_dir: str | os.PathLike | None = None):
    """Load a cached artifact for ``config``; raises CacheMissError if the
    entry is absent, corrupt, or belongs to different physics."""
    cfg_hash = physics_hash(config)
    suffix = {"dipole": ".dip", "table": ".tab"}[kind]
    path = cache_dir_for(cache_dir) / f"{cfg_hash}{suffix}"
    if not path.exists():
        raise CacheMissError(f"no cache entry {path}")
    try:
        with open(path, "rb") as fh:
            if kind == "dipole":
                stored, (n_t, warmup), (lo, hi) = _read_header(fh, _MAGIC_DIP, 2, 2)
                if stored != cfg_hash:
                    raise CacheMissError("config hash mismatch")
                d = np.frombuffer(fh.read(8 * n_t), dtype="<f8")
                if d.size != n_t:
                    raise CacheMissError("truncated payload")
                return DipoleRecord(t=Grid1D(lo, hi, n_t), d=d.astype(float),
                                    warmup_index=int(warmup), config_hash=stored)
            stored, (n_v, n_t), (v_lo, v_hi, t_lo, t_hi) = _read_header(fh, _MAGIC_TAB, 2, 4)
            if stored != cfg_hash:
                raise CacheMissError("config hash mismatch")
            planes = []
            for _ in range(5):
                buf = np.frombuffer(fh.read(8 * n_v * n_t), dtype="<f8")
                if buf.size != n_v * n_t:
                    raise CacheMissError("truncated payload")
                planes.append(buf.reshape((n_v, n_t), order="F"))
            # rebuild C-contiguous so downstream reductions traverse memory
            # exactly like freshly computed tables (bit-exact round trip)
            return TransitionTable(
                v=Grid1D(v_lo, v_hi, n_v), t=Grid1D(t_lo, t_hi, n_t),
                d=np.ascontiguousarray(planes[0] + 1j * planes[1]),
                dr=np.ascontiguousarray(planes[2]),
                dv_d=np.ascontiguousarray(planes[3] + 1j * planes[4]),
                config_hash=stored)
    except (struct.error, ValueError) as exc:
        raise CacheMissError(f"corrupt cache entry {path}: {exc}") from exc


def load_or_compute_dipole(config: RunConfig, cache_dir=None, threads: int = 1,
                           use_cache: bool = True) -> DipoleRecord:
    if use_cache:
        try:
            return cache_load(config, "dipole", cache_dir)
        except CacheMissError:
            pass
    record = compute_dipole(config, threads=threads)
    if use_cache:
        cache_store(record, cache_dir)
    return record


def load_or_compute_table(config: RunConfig, cache_dir=None, threads: int = 1,
                          use_cache: bool = True) -> TransitionTable:
    if use_cache:
        try:
            return cache_load(config, "table", cache_dir)
        except CacheMissError:
            pass
    table = compute_transition_table(config, threads=threads)
    if use_cache:
        cache_store(table, cache_dir)
    return table
