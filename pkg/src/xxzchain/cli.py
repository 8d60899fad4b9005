"""Command-line interface.

Subcommands: run, aggregate, spectrum, fit, hubcheck, oracle.  Options can
come from an INI-style config file (sections [chain], [disorder],
[evolution], [observables], [model], [output]) with command-line flags
taking precedence.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from math import pi
from pathlib import Path

import numpy as np

from .analysis import fit_log_growth, local_minima
from .hamiltonian import build_hamiltonian, build_phenomenological_two_spin, dense_spectrum, sample_disorder
from .observables import LN2, entropy_record
from .propagator import KrylovConfig, evolve_on_grid
from .runner import (
    OUTDIR_ENV,
    ExperimentConfig,
    aggregate_directory,
    read_trajectory_csv,
    run_experiment,
    write_aggregate_csv,
)
from .spectral import detect_peaks, spectrum_from_series, two_spin_entropy
from .states import PRESETS, hub_stats, product_state

# (config key, INI section, type) for every ExperimentConfig field settable
# from a file
_INI_FIELDS = [
    ("length", "chain", int),
    ("delta", "chain", float),
    ("jperp", "chain", float),
    ("boundary", "chain", str),
    ("w_list", "disorder", str),
    ("realizations", "disorder", int),
    ("seed", "disorder", int),
    ("initial_state", "chain", str),
    ("grid", "evolution", str),
    ("t_min", "evolution", float),
    ("t_max", "evolution", float),
    ("points_per_decade", "evolution", int),
    ("dt", "evolution", float),
    ("krylov_m", "evolution", int),
    ("krylov_tol", "evolution", float),
    ("krylov_reorth", "evolution", str),
    ("sector_blocked", "evolution", bool),
    ("half_chain", "observables", bool),
    ("entropy_unit", "observables", str),
    ("model", "model", str),
    ("v_int", "model", float),
    ("outdir", "output", str),
]


def _parse_w_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def load_config_file(path: str | Path) -> dict:
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise FileNotFoundError(f"config file {path} not found")
    values: dict = {}
    for key, section, cast in _INI_FIELDS:
        if parser.has_option(section, key):
            if cast is bool:
                values[key] = parser.getboolean(section, key)
            elif key == "w_list":
                values[key] = _parse_w_list(parser.get(section, key))
            else:
                values[key] = cast(parser.get(section, key))
    return values


def _experiment_config(args) -> ExperimentConfig:
    values = load_config_file(args.config) if args.config else {}
    flag_map = {
        "length": args.length,
        "delta": args.delta,
        "jperp": args.jperp,
        "boundary": args.boundary,
        "w_list": _parse_w_list(args.w) if args.w else None,
        "realizations": args.realizations,
        "seed": args.seed,
        "initial_state": args.state,
        "grid": args.grid,
        "t_min": args.t_min,
        "t_max": args.t_max,
        "points_per_decade": args.points_per_decade,
        "dt": args.dt,
        "krylov_m": args.krylov_m,
        "krylov_tol": args.krylov_tol,
        "krylov_reorth": args.krylov_reorth,
        "sector_blocked": True if args.sector_blocked else None,
        "half_chain": False if args.no_half_chain else None,
        "entropy_unit": "bits" if args.bits else None,
        "model": args.model,
        "v_int": args.v_int,
        "outdir": args.outdir or os.environ.get(OUTDIR_ENV),
    }
    for key, value in flag_map.items():
        if value is not None:
            values[key] = value
    if "length" not in values:
        raise SystemExit("chain length is required (--length or config file)")
    return ExperimentConfig(**values)


def _add_run_parser(sub):
    p = sub.add_parser("run", help="run a disorder sweep and aggregate it")
    p.add_argument("--config", help="INI config file; flags override it")
    p.add_argument("-L", "--length", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--jperp", type=float)
    p.add_argument("--boundary", choices=("open", "periodic"))
    p.add_argument("--w", help="comma-separated disorder strengths, e.g. '0.1,1,5,10'")
    p.add_argument("-R", "--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--state", choices=PRESETS)
    p.add_argument("--grid", choices=("log", "uniform"))
    p.add_argument("--t-min", type=float, dest="t_min")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--points-per-decade", type=int, dest="points_per_decade")
    p.add_argument("--dt", type=float)
    p.add_argument("--krylov-m", type=int, dest="krylov_m")
    p.add_argument("--krylov-tol", type=float, dest="krylov_tol")
    p.add_argument("--krylov-reorth", choices=("full", "none"), dest="krylov_reorth")
    p.add_argument("--sector-blocked", action="store_true", dest="sector_blocked")
    p.add_argument("--no-half-chain", action="store_true", dest="no_half_chain")
    p.add_argument("--bits", action="store_true", help="write entropies in bits instead of nats")
    p.add_argument("--model", choices=("xxz", "two_spin"))
    p.add_argument("--v-int", type=float, dest="v_int")
    p.add_argument("--outdir")
    p.add_argument("--workers", type=int, help=f"parallel workers (or ${{{'XXZCHAIN_WORKERS'}}})")
    p.set_defaults(func=_cmd_run)


def _cmd_run(args) -> int:
    cfg = _experiment_config(args)
    result = run_experiment(cfg, workers=args.workers)
    for w, avg in result.by_w.items():
        final = avg.mean["S_avg"][-1]
        print(
            f"w={w:g}: {avg.n_realizations} realizations, "
            f"S_avg(t_max)={final:.6f} ({cfg.entropy_unit})"
        )
    failed = sum(result.failures.values())
    if failed:
        print(f"warning: {failed} realizations failed and were excluded", file=sys.stderr)
    print(f"results under {cfg.outdir} (config {result.config_hash})")
    return 0


def _cmd_aggregate(args) -> int:
    root = Path(args.directory)
    w_dirs = [d for d in sorted(root.glob("w*")) if d.is_dir()]
    targets = w_dirs or [root]
    for d in targets:
        avg = aggregate_directory(d)
        out = d / "aggregate.csv"
        write_aggregate_csv(out, avg)
        print(f"{out}: {avg.n_realizations} realizations, {avg.times.size} time points")
    return 0


def _series_from_csv(path: str, column: str) -> tuple[np.ndarray, np.ndarray, list[str]]:
    names, data = read_trajectory_csv(Path(path))
    if column not in names:
        raise SystemExit(f"column {column!r} not in {path}; available: {', '.join(names[1:])}")
    return data[:, 0], data[:, names.index(column)], names


def _default_column(path: str) -> str:
    names, _ = read_trajectory_csv(Path(path))
    return "S_avg_mean" if "S_avg_mean" in names else "S_avg"


def _cmd_spectrum(args) -> int:
    column = args.column or _default_column(args.input)
    times, values, _ = _series_from_csv(args.input, column)
    spec = spectrum_from_series(times, values)
    out = Path(args.output)
    lines = ["omega,P"] + [
        f"{repr(float(o))},{repr(float(p))}" for o, p in zip(spec.omega, spec.power)
    ]
    out.write_text("\n".join(lines) + "\n")
    peaks = detect_peaks(spec, args.rel_threshold)
    payload = {
        "input": args.input,
        "column": column,
        "rel_threshold": peaks.rel_threshold,
        "bin_width": peaks.bin_width,
        "peaks": [{"omega": p.omega, "height": p.height, "index": p.index} for p in peaks.peaks],
    }
    Path(args.peaks).write_text(json.dumps(payload, indent=1) + "\n")
    print(f"{out}: {spec.omega.size} bins, bin width {spec.bin_width:.6g}")
    for p in peaks.tallest(4):
        print(f"  peak at omega={p.omega:.6g} height={p.height:.6g}")
    return 0


def _cmd_fit(args) -> int:
    column = args.column or _default_column(args.input)
    times, values, _ = _series_from_csv(args.input, column)
    scale = float(args.rescale) if args.rescale else 1.0
    t_min_pts, minima = local_minima(times, scale * values, window=args.window)
    fit = fit_log_growth(t_min_pts, minima, t_min=args.t_min, t_max=args.t_max)
    payload = {
        "input": args.input,
        "column": column,
        "rescale": scale,
        "window": args.window,
        "t_min": args.t_min,
        "t_max": args.t_max,
        "fit": fit.to_dict() if fit else None,
    }
    Path(args.output).write_text(json.dumps(payload, indent=1) + "\n")
    if fit is None:
        print("no fit: fewer than 3 minima past the cutoff")
    else:
        print(
            f"y = {fit.intercept:.6g} + {fit.slope:.6g} ln t  "
            f"({fit.n_points} minima, pearson {fit.pearson_r:.4f})"
        )
    return 0


def _cmd_hubcheck(args) -> int:
    rows = []
    for state_name in args.state:
        psi = product_state(state_name, args.length)
        fractions = []
        max_overlaps = []
        for r in range(args.realizations):
            disorder = sample_disorder(args.length, args.w, args.seed, r)
            h = build_hamiltonian(args.length, args.delta, args.jperp, disorder, args.boundary)
            stats = hub_stats(psi, dense_spectrum(h))
            fractions.append(stats.participation_fraction)
            max_overlaps.append(stats.max)
        rows.append(
            {
                "state": state_name,
                "participation_fraction_mean": float(np.mean(fractions)),
                "participation_fraction_min": float(np.min(fractions)),
                "max_overlap_mean": float(np.mean(max_overlaps)),
                "realizations": args.realizations,
            }
        )
        print(
            f"{state_name:10s} participation entropy / ln D = "
            f"{rows[-1]['participation_fraction_mean']:.4f} "
            f"(max D|<v|E>|^2 ~ {rows[-1]['max_overlap_mean']:.2f})"
        )
    if args.output:
        payload = {
            "length": args.length,
            "w": args.w,
            "seed": args.seed,
            "delta": args.delta,
            "jperp": args.jperp,
            "boundary": args.boundary,
            "results": rows,
        }
        Path(args.output).write_text(json.dumps(payload, indent=1) + "\n")
    return 0


def _cmd_oracle(args) -> int:
    h = build_phenomenological_two_spin(args.v_int)
    psi0 = product_state("neel_x", 2)
    times = np.arange(0.0, args.t_max + args.dt / 2.0, args.dt)
    records = evolve_on_grid(
        h,
        psi0,
        times,
        observer=lambda t, psi: entropy_record(psi, t, half_chain=False),
        cfg=KrylovConfig(),
    )
    simulated = np.array([rec.site_entropies for rec in records])
    exact = two_spin_entropy(args.v_int, times)
    deviation = float(np.max(np.abs(simulated - exact[:, None])))
    t_zeros, _ = local_minima(times, exact)
    period = float(np.mean(np.diff(t_zeros))) if t_zeros.size > 1 else float("nan")
    print(f"max |S_sim - S_closed_form| over both sites: {deviation:.3e}")
    print(f"expected period pi/(2|V|) = {pi / (2 * abs(args.v_int)):.6f}, observed ~ {period:.6f}")
    if args.output:
        lines = ["t,S_site1,S_site2,S_exact"]
        for i, t in enumerate(times):
            lines.append(
                f"{repr(float(t))},{repr(float(simulated[i, 0]))},"
                f"{repr(float(simulated[i, 1]))},{repr(float(exact[i]))}"
            )
        Path(args.output).write_text("\n".join(lines) + "\n")
    if deviation > args.tol:
        print(f"FAIL: deviation above {args.tol:g}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxzchain",
        description="Disordered XXZ chain dynamics: local entropies, total correlations, spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_parser(sub)

    p = sub.add_parser("aggregate", help="recompute aggregates from per-realization CSVs")
    p.add_argument("directory", help="experiment root (with w*/ subdirs) or one ensemble dir")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("spectrum", help="power spectrum and peaks of a trajectory column")
    p.add_argument("--input", required=True, help="trajectory or aggregate CSV (uniform grid)")
    p.add_argument("--column", help="column to transform (default S_avg_mean or S_avg)")
    p.add_argument("--output", default="spectrum.csv")
    p.add_argument("--peaks", default="peaks.json")
    p.add_argument("--rel-threshold", type=float, default=0.1, dest="rel_threshold")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("fit", help="log-growth fit of envelope minima")
    p.add_argument("--input", required=True)
    p.add_argument("--column", help="column to fit (default S_avg_mean or S_avg)")
    p.add_argument("--rescale", type=float, help="multiply the series, e.g. L for L*S(t)")
    p.add_argument("--t-min", type=float, default=1.0, dest="t_min")
    p.add_argument("--t-max", type=float, default=float("inf"), dest="t_max")
    p.add_argument("--window", type=int, default=1, help="odd moving-median window (1 = off)")
    p.add_argument("--output", default="fit.json")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("hubcheck", help="eigenbasis overlap statistics of initial states")
    p.add_argument("-L", "--length", type=int, required=True)
    p.add_argument("--w", type=float, default=10.0)
    p.add_argument("-R", "--realizations", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", action="append", default=None, choices=PRESETS)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--jperp", type=float, default=1.0)
    p.add_argument("--boundary", choices=("open", "periodic"), default="periodic")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_hubcheck)

    p = sub.add_parser("oracle", help="two-spin model vs closed-form entropy")
    p.add_argument("--v-int", type=float, default=0.25, dest="v_int")
    p.add_argument("--t-max", type=float, default=8 * pi, dest="t_max")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "state", "") is None and args.command == "hubcheck":
        args.state = ["neel_x", "neel_z"]
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
