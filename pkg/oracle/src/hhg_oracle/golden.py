"""Golden records: deterministic CSV payloads plus sidecar metadata.

The CSV bodies are timestamp-free and written with repr-exact doubles so a
regeneration with the same configuration is bitwise identical; the wall
clock (and the grid/config description) lives in a `.meta.json` sidecar.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .reference import Scenario, build_tables, golden_dipole, golden_g2

FMT = "%.17g"


@dataclass
class GoldenRecord:
    quantity: str
    config_hash: str
    grid: str
    header: list[str]
    columns: list[np.ndarray]
    generated: float = field(default_factory=time.time)

    def write(self, directory: Path) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.quantity}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(self.header) + "\n")
            for i in range(len(self.columns[0])):
                fh.write(",".join(FMT % c[i] for c in self.columns) + "\n")
        meta = {
            "quantity": self.quantity,
            "config_hash": self.config_hash,
            "grid": self.grid,
            "generated": self.generated,
            "generator": "hhg-oracle",
        }
        with open(path.with_suffix(".meta.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def scenario_hash(sc: Scenario, extra: str = "") -> str:
    return hashlib.sha256((sc.key_string() + "|" + extra).encode()).hexdigest()


#: Coarse dipole comparison: reference drive, 2 cycles, 200 momenta.
DIPOLE_SCENARIO = Scenario(n_cycles=2, n_t=442, n_v=200, v_lim=3.0)

#: Brute-force g2 grids: 24-sample one-cycle window, 40 momenta, 5 delays.
G2_SCENARIO = Scenario(n_cycles=2, n_t=47, n_v=40, v_lim=5.0)
G2_SHIFTS = (0, 5, 11, 17, 23)
G2_ORDERS = (11, 13)


def make_dipole_record(sc: Scenario = DIPOLE_SCENARIO) -> GoldenRecord:
    if sc.n_v > 500:
        raise ValueError("guard: golden dipole runs on coarse grids (n_v <= 500)")
    d = golden_dipole(sc)
    return GoldenRecord(
        quantity="dipole_coarse",
        config_hash=scenario_hash(sc),
        grid=f"t: {sc.n_t} pts on [0, {sc.t_end:.6g}]; v: {sc.n_v} pts on "
             f"[-{sc.v_lim}, {sc.v_lim}]",
        header=["t", "dipole"],
        columns=[sc.t_grid(), d])


def make_g2_record(sc: Scenario = G2_SCENARIO,
                   orders: tuple[int, ...] = G2_ORDERS,
                   shifts: tuple[int, ...] = G2_SHIFTS) -> GoldenRecord:
    dipole = golden_dipole(sc)
    tables = build_tables(sc)
    cols = {name: [] for name in ("q", "tau", "t_cross_re", "t_cross_im",
                                  "t_cc_re", "t_cc_im", "g2", "denominator")}
    for q in orders:
        res = golden_g2(sc, q, shifts, dipole=dipole, tables=tables)
        n = len(shifts)
        cols["q"].append(np.full(n, float(q)))
        cols["tau"].append(res["tau"])
        cols["t_cross_re"].append(res["t_cross"].real)
        cols["t_cross_im"].append(res["t_cross"].imag)
        cols["t_cc_re"].append(res["t_cc"].real)
        cols["t_cc_im"].append(res["t_cc"].imag)
        cols["g2"].append(res["g2"])
        cols["denominator"].append(res["denominator"])
    header = list(cols)
    dt = sc.t_grid()[1] - sc.t_grid()[0]
    n_w = 1 + int(round(sc.period / dt))
    return GoldenRecord(
        quantity="g2_bruteforce",
        config_hash=scenario_hash(sc, extra=f"q={orders},shifts={shifts}"),
        grid=f"one-cycle window of {n_w} samples, {sc.n_v} momenta on "
             f"[-{sc.v_lim}, {sc.v_lim}], delays {shifts}",
        header=header,
        columns=[np.concatenate(cols[h]) for h in header])
