from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .cachefmt import read_table
from .golden import (DIPOLE_SCENARIO, G2_SCENARIO, make_dipole_record,
                     make_g2_record)
from .reference import build_tables


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hhg-oracle",
        description="Generate golden reference CSVs for the HHG correlation engine.")
    parser.add_argument("--out", default="tests/golden", metavar="DIR",
                        help="target directory (default tests/golden)")
    parser.add_argument("--only", choices=["dipole", "g2"], default=None)
    parser.add_argument("--check-cache", metavar="TAB",
                        help="cross-check a production .tab cache file against "
                             "the recomputed coarse tables before generating")
    args = parser.parse_args(argv)

    if args.check_cache:
        cached = read_table(args.check_cache)
        sc = G2_SCENARIO
        mine = build_tables(sc)
        if cached.d.shape != mine.x.shape:
            print(f"error: cached table shape {cached.d.shape} does not match "
                  f"the coarse scenario {mine.x.shape}", file=sys.stderr)
            return 1
        for name, a, b in (("d", cached.d, mine.x), ("dr", cached.dr, mine.dr),
                           ("dv_d", cached.dv_d, mine.dx_dv)):
            err = np.max(np.abs(a - b)) / np.max(np.abs(b))
            if err > 1e-6:
                print(f"error: cached {name} deviates by {err:.3e}", file=sys.stderr)
                return 1
        print("cache cross-check passed")

    out = Path(args.out)
    if args.only in (None, "dipole"):
        path = make_dipole_record(DIPOLE_SCENARIO).write(out)
        print(f"wrote {path}")
    if args.only in (None, "g2"):
        path = make_g2_record().write(out)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
