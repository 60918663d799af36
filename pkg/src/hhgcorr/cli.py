"""Command-line surface: configuration loading, pipeline orchestration,
CSV / gnuplot emission, and run manifests.

Commands: dipole, spectrum, g1, g2, sweep. Outputs are written with
17 significant digits ('.' decimal separator, LF line endings) so golden
files round-trip doubles exactly; partial outputs are removed when a stage
fails. A JSON manifest with the resolved config, cache content hashes,
tool version, and per-stage timings accompanies every run; feeding a
manifest back through --config reproduces the run bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, SWEEP_LOG10_N, derive, parse_config_text
from .coherence import g1_coherent, g1_incoherent, g1_normalized
from .dipole import (cache_dir_for, load_or_compute_dipole,
                     load_or_compute_table, physics_hash)
from .errors import ConfigError, DegenerateModeError, QuadratureError
from .g2 import (BRUTE_FORCE_COST_CAP, brute_force_cost, compute_g2,
                 reference_window)
from .manyatom import TRUNCATION_NOTE, g2_many, partition_kernels
from .spectrum import SpectrumResult, coherent_spectrum, incoherent_spectrum

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % float(x)


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def emit_plot_data(path: Path, blocks, x_label: str, y_label: str) -> None:
    """Gnuplot-compatible columns; one blank-line-separated block per series."""
    blocks = list(blocks)
    if not blocks or any(len(b[1][0]) == 0 for b in blocks):
        raise ValueError("refusing to emit empty plot data")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# x: {x_label}, y: {y_label}\n")
        for title, cols in blocks:
            if title:
                fh.write(f"# {title}\n")
            for i in range(len(cols[0])):
                fh.write(" ".join(_fmt(col[i]) for col in cols) + "\n")
            fh.write("\n")


def emit_svg(path: Path, x: np.ndarray, ys: dict[str, np.ndarray],
             x_label: str, y_label: str, log_y: bool = False) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for label, y in ys.items():
        ax.plot(x, y, label=label, lw=0.9)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if len(ys) > 1:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        payload = json.loads(text)
        section = payload.get("config", payload)
        return RunConfig(**{k: v for k, v in section.items() if v is not None})
    return parse_config_text(text)


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    from dataclasses import replace

    updates = {}
    for key in ("e0", "omega_l", "phase", "n_cycles", "ip", "kappa", "p_lim",
                "n_els", "n_t", "n_fft", "warmup_cycles", "q", "tau_samples",
                "n_atoms"):
        value = getattr(args, key, None)
        if value is not None:
            updates[key] = value
    return replace(config, **updates) if updates else config


class _Run:
    """Tracks outputs and timings; removes partial outputs on failure."""

    def __init__(self, out_dir: Path, command: str, config: RunConfig):
        self.out_dir = out_dir
        self.command = command
        self.config = config
        self.outputs: list[Path] = []
        self.timings: dict[str, float] = {}
        self.extra: dict = {}
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.outputs.append(p)
        return p

    def stage(self, name: str):
        run = self

        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                run.timings[name] = time.perf_counter() - self.t0

        return _Timer()

    def cleanup(self):
        for p in self.outputs:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass

    def write_manifest(self, cache_hash: str | None):
        manifest = {
            "tool": "hhg",
            "version": __version__,
            "command": self.command,
            "config": self.config.as_dict(),
            "cache_content_hash": cache_hash,
            "timings_s": {k: round(v, 6) for k, v in self.timings.items()},
            "outputs": [p.name for p in self.outputs],
        }
        manifest.update(self.extra)
        path = self.out_dir / "run_manifest.json"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _common_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--config", metavar="PATH", default=None,
                     help="flat key=value config file or a previous run manifest (.json)")
    sub.add_argument("--out", metavar="DIR", default="out", help="output directory")
    sub.add_argument("--q", type=int, default=None, help="harmonic order under study")
    sub.add_argument("--n-atoms", dest="n_atoms", type=int, default=None)
    sub.add_argument("--no-cache", action="store_true", help="recompute, skip the disk cache")
    sub.add_argument("--cache-dir", default=None,
                     help="cache directory (default $HHG_CACHE_DIR or ./cache)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads (results are bitwise thread-count independent)")
    sub.add_argument("--svg", action="store_true", help="also render a static SVG")
    for key, typ in [("e0", float), ("omega-l", float), ("phase", float),
                     ("n-cycles", int), ("ip", float), ("kappa", float),
                     ("p-lim", float), ("n-els", int), ("n-t", int),
                     ("n-fft", int), ("warmup-cycles", int),
                     ("tau-samples", int)]:
        sub.add_argument(f"--{key}", dest=key.replace("-", "_"), type=typ, default=None,
                         help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhg",
        description="Quantum-optical field correlations of high harmonic generation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, text in [
        ("dipole", "time-dependent dipole expectation value"),
        ("spectrum", "coherent + incoherent HHG spectra"),
        ("g1", "first-order correlation of one harmonic"),
        ("g2", "normalized intensity correlation of one harmonic"),
        ("sweep", "g2(tau; N) over a grid of emitter counts"),
    ]:
        sub = subs.add_parser(name, help=text)
        _common_flags(sub)
        if name == "spectrum":
            sub.add_argument("--slices", default="",
                             help="comma-separated momenta for per-v incoherent slices")
        if name == "g2":
            sub.add_argument("--brute-force", action="store_true",
                             help="literal 4-D quadrature (coarse grids only)")
        if name == "sweep":
            sub.add_argument("--log10-n", default=",".join(str(x) for x in SWEEP_LOG10_N),
                             help="comma-separated log10 emitter counts")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(_load_config(args.config), args)
        profile = "g2" if args.command in ("g2", "sweep") else "first_order"
        config = config.resolved(profile)
        config.validate(require_drive=True)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    run = _Run(Path(args.out), args.command, config)
    try:
        code = _dispatch(args, config, run)
        run.write_manifest(physics_hash(config))
        return code
    except (QuadratureError, DegenerateModeError, ValueError) as exc:
        run.cleanup()
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace, config: RunConfig, run: _Run) -> int:
    cache_dir = cache_dir_for(args.cache_dir)
    use_cache = not args.no_cache
    threads = max(1, args.threads)

    if args.command == "g2" and args.brute_force:
        # refuse up front, before any heavy stage runs
        window = reference_window(config, config.time_grid())
        cost = brute_force_cost(window, config.n_els)
        if cost > BRUTE_FORCE_COST_CAP:
            print(f"error: brute-force g2 cost ~{cost:.2e} exceeds the cap "
                  f"{BRUTE_FORCE_COST_CAP:.0e}; reduce n_t / n_els / tau_samples",
                  file=sys.stderr)
            return 1

    with run.stage("dipole"):
        record = load_or_compute_dipole(config, cache_dir, threads, use_cache)

    if args.command == "dipole":
        t = record.t.values()
        write_csv(run.path("dipole.csv"), ["t", "dipole", "retained"],
                  [t, record.d, (np.arange(t.size) >= record.warmup_index).astype(float)])
        emit_plot_data(run.path("dipole.dat"), [("dipole", (t, record.d))],
                       "time (a.u.)", "<d(t)> (a.u.)")
        if args.svg:
            emit_svg(run.path("dipole.svg"), t, {"<d(t)>": record.d},
                     "time (a.u.)", "dipole (a.u.)")
        return 0

    with run.stage("table"):
        table = load_or_compute_table(config, cache_dir, threads, use_cache)

    if args.command == "spectrum":
        slices = tuple(float(s) for s in args.slices.split(",") if s.strip())
        with run.stage("spectrum"):
            coh = coherent_spectrum(record, config)
            inc = incoherent_spectrum(table, config, slice_momenta=slices,
                                      threads=threads)
        result = SpectrumResult(orders=coh.orders, s_coh=coh.s_coh,
                                s_inc=inc.s_inc, slices=inc.slices)
        write_csv(run.path("spectrum.csv"),
                  ["harmonic_order", "s_coh", "s_inc", "s_total"],
                  [result.orders, result.s_coh, result.s_inc, result.s_total])
        emit_plot_data(run.path("spectrum.dat"),
                       [("s_coh s_inc s_total",
                         (result.orders, result.s_coh, result.s_inc, result.s_total))],
                       "harmonic order", "S (arb.u., log)")
        if result.slices:
            write_csv(run.path("spectrum_slices.csv"),
                      ["harmonic_order"] + [f"v={v:g}" for v in result.slices],
                      [result.orders] + list(result.slices.values()))
        if args.svg:
            emit_svg(run.path("spectrum.svg"), result.orders,
                     {"coherent": result.s_coh, "incoherent": result.s_inc,
                      "total": result.s_total},
                     "harmonic order", "S (arb. u.)", log_y=True)
        return 0

    if args.command == "g1":
        dq = derive(config)
        tau = np.linspace(0.0, dq.period, config.tau_samples)
        with run.stage("g1"):
            series = g1_normalized(g1_coherent(record, config, tau),
                                   g1_incoherent(table, config, tau))
        write_csv(run.path("g1.csv"),
                  ["tau_over_T", "g1_re", "g1_im", "g1_abs", "G1_coh_abs", "G1_inc_abs"],
                  [tau / dq.period, series.normalized.real, series.normalized.imag,
                   np.abs(series.normalized), np.abs(series.coh), np.abs(series.inc)])
        emit_plot_data(run.path("g1.dat"),
                       [("g1", (tau / dq.period, series.normalized.real,
                                series.normalized.imag))],
                       "tau / T", "g1 (re, im)")
        return 0

    if args.command == "g2":
        with run.stage("g2"):
            comp = compute_g2(record, table, config,
                              brute_force=args.brute_force, threads=threads)
        num = comp.numerator
        write_csv(run.path("g2.csv"),
                  ["tau_over_T", "g2", "re_num", "im_num", "denom"],
                  [comp.tau / comp.t_ref, comp.g2, num.real, num.imag,
                   comp.denominator])
        emit_plot_data(run.path("g2.dat"), [(f"q={comp.q}", (comp.tau / comp.t_ref, comp.g2))],
                       "tau / T", "g2")
        if args.svg:
            emit_svg(run.path("g2.svg"), comp.tau / comp.t_ref, {f"q={comp.q}": comp.g2},
                     "tau / T", "g2(tau)")
        if config.n_atoms > 1:
            kernels = partition_kernels(comp)
            g2n = g2_many(kernels, config.n_atoms)
            cols = [comp.tau / comp.t_ref, g2n]
            write_csv(run.path(f"g2_n{config.n_atoms}.csv"), ["tau_over_T", "g2"], cols)
            if config.n_atoms in (2, 3):
                run.extra["truncation_warning"] = TRUNCATION_NOTE
        return 0

    if args.command == "sweep":
        n_list = [int(round(10.0 ** float(x))) for x in args.log10_n.split(",") if x.strip()]
        with run.stage("g2"):
            comp = compute_g2(record, table, config, threads=threads)
            kernels = partition_kernels(comp)
        tau_over_t = comp.tau / comp.t_ref
        rows_n, rows_tau, rows_g2 = [], [], []
        blocks = []
        for n in n_list:
            g2n = g2_many(kernels, n)
            rows_n.append(np.full(g2n.size, float(n)))
            rows_tau.append(tau_over_t)
            rows_g2.append(g2n)
            blocks.append((f"N={n}", (tau_over_t, g2n)))
        write_csv(run.path("sweep.csv"), ["n_atoms", "tau_over_T", "g2"],
                  [np.concatenate(rows_n), np.concatenate(rows_tau),
                   np.concatenate(rows_g2)])
        emit_plot_data(run.path("sweep.dat"), blocks, "tau / T", "g2 per N block")
        if any(n in (2, 3) for n in n_list):
            run.extra["truncation_warning"] = TRUNCATION_NOTE
        return 0

    raise ValueError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    raise SystemExit(main())
