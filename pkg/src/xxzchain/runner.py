"""Disorder-sweep orchestration: deterministic runs, persistence, averaging.

Each (W, realization) trajectory is an idempotent unit: it writes one CSV
of entropy records plus one JSON manifest, keyed by the experiment seed
and realization index, and is skipped on re-runs when already present.
Aggregates are plain pointwise means and standard errors over the stored
files, so they are recomputable bit-for-bit at any time.  Apart from the
timing entry in manifests, every output byte is determined by the
configuration and master seed.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from math import log10
from pathlib import Path

import numpy as np

from ._version import __version__
from .hamiltonian import build_hamiltonian, build_phenomenological_two_spin, sample_disorder
from .observables import LN2, csv_header, entropy_record
from .propagator import KrylovConfig, PropagationError, evolve_on_grid
from .states import product_state

log = logging.getLogger(__name__)

WORKERS_ENV = "XXZCHAIN_WORKERS"
OUTDIR_ENV = "XXZCHAIN_OUTDIR"
MANIFEST_SCHEMA = "xxzchain/manifest/1"
MAX_FAILURE_FRACTION = 0.05

GRIDS = ("log", "uniform")
MODELS = ("xxz", "two_spin")
UNITS = ("nats", "bits")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one disorder-sweep experiment."""

    length: int
    realizations: int = 1
    seed: int = 0
    w_list: tuple[float, ...] = (0.1, 1.0, 5.0, 10.0)
    delta: float = 1.0
    jperp: float = 1.0
    boundary: str = "periodic"
    initial_state: str = "neel_x"
    grid: str = "log"
    t_min: float = 0.1
    t_max: float = 1.0e4
    points_per_decade: int = 50
    dt: float = 0.1
    krylov_m: int = 30
    krylov_tol: float = 1.0e-10
    krylov_reorth: str = "full"
    sector_blocked: bool = False
    half_chain: bool = True
    entropy_unit: str = "nats"
    model: str = "xxz"
    v_int: float = 0.25
    outdir: str = "runs"

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if any(w < 0 for w in self.w_list):
            raise ValueError("disorder strengths must be >= 0")
        if self.grid not in GRIDS:
            raise ValueError(f"grid must be one of {GRIDS}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.entropy_unit not in UNITS:
            raise ValueError(f"entropy_unit must be one of {UNITS}")
        if self.model == "two_spin" and self.length != 2:
            raise ValueError("the two-spin phenomenological model needs length = 2")
        if min(self.t_min, self.t_max, self.dt) <= 0:
            raise ValueError("grid parameters must be positive")
        object.__setattr__(self, "w_list", tuple(float(w) for w in self.w_list))

    def time_grid(self) -> np.ndarray:
        if self.grid == "log":
            decades = log10(self.t_max / self.t_min)
            n = int(round(self.points_per_decade * decades)) + 1
            return np.logspace(log10(self.t_min), log10(self.t_max), n)
        return np.arange(0.0, self.t_max + self.dt / 2.0, self.dt)

    def krylov_config(self) -> KrylovConfig:
        return KrylovConfig(m=self.krylov_m, tolerance=self.krylov_tol, reorth=self.krylov_reorth)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["w_list"] = list(self.w_list)
        return d

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def w_dirname(w: float) -> str:
    return f"w{w:g}"


def realization_paths(root: Path, w: float, index: int) -> tuple[Path, Path]:
    base = root / w_dirname(w) / f"r{index:05d}"
    return base.with_suffix(".csv"), base.with_suffix(".json")


def _write_trajectory_csv(path: Path, records, length: int, unit: str) -> None:
    scale = 1.0 / LN2 if unit == "bits" else 1.0
    lines = [",".join(csv_header(length))]
    for rec in records:
        values = [rec.t]
        values += [v * scale for v in (rec.average, rec.total, rec.half_chain, rec.delta)]
        values += [v * scale for v in rec.site_entropies.tolist()]
        lines.append(",".join(repr(float(v)) for v in values))
    path.write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Return (column names, data array) of a trajectory or aggregate CSV."""
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: column count mismatch")
    return names, data


def run_single_realization(cfg: ExperimentConfig, w: float, index: int) -> dict:
    """Compute and persist one trajectory; returns its manifest dict."""
    root = Path(cfg.outdir)
    csv_path, manifest_path = realization_paths(root, w, index)
    csv_path.parent.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    if cfg.model == "two_spin":
        disorder = None
        h = build_phenomenological_two_spin(cfg.v_int)
    else:
        disorder = sample_disorder(cfg.length, w, cfg.seed, index)
        h = build_hamiltonian(cfg.length, cfg.delta, cfg.jperp, disorder, cfg.boundary)
    psi0 = product_state(cfg.initial_state, cfg.length)
    times = cfg.time_grid()
    records = evolve_on_grid(
        h,
        psi0,
        times,
        observer=lambda t, psi: entropy_record(psi, t, half_chain=cfg.half_chain),
        cfg=cfg.krylov_config(),
        sector_blocked=cfg.sector_blocked,
    )
    _write_trajectory_csv(csv_path, records, cfg.length, cfg.entropy_unit)
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "w": w,
        "realization_index": index,
        "fields": None if disorder is None else disorder.fields.tolist(),
        "grid_points": int(times.size),
        "version": __version__,
        "timing_seconds": time.perf_counter() - started,
    }
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return manifest


def _run_task(cfg: ExperimentConfig, w: float, index: int) -> tuple[float, int, str | None]:
    try:
        run_single_realization(cfg, w, index)
        return w, index, None
    except PropagationError as exc:
        return w, index, str(exc)


@dataclass(frozen=True)
class EnsembleAverages:
    """Pointwise mean and standard error over one ensemble of trajectories."""

    times: np.ndarray
    mean: dict[str, np.ndarray]
    sem: dict[str, np.ndarray]
    n_realizations: int

    @property
    def columns(self) -> list[str]:
        return list(self.mean)


@dataclass(frozen=True)
class EnsembleResult:
    """Aggregated sweep output plus provenance."""

    config: dict | None
    config_hash: str | None
    version: str
    by_w: dict[float, EnsembleAverages]
    failures: dict[float, int] = field(default_factory=dict)


def aggregate_directory(path: Path | str) -> EnsembleAverages:
    """Average all per-realization CSVs in one ensemble directory."""
    path = Path(path)
    csv_files = sorted(path.glob("r*.csv"))
    if not csv_files:
        raise ValueError(f"no realization CSVs under {path}")
    for f in csv_files:
        if not f.with_suffix(".json").exists():
            raise ValueError(f"missing manifest for {f}")
    names0, first = read_trajectory_csv(csv_files[0])
    times = first[:, 0]
    stack = np.empty((len(csv_files),) + first.shape)
    stack[0] = first
    for i, f in enumerate(csv_files[1:], start=1):
        names, data = read_trajectory_csv(f)
        if names != names0 or data.shape != first.shape or not np.array_equal(data[:, 0], times):
            raise ValueError(f"{f}: time grid or columns do not match {csv_files[0]}")
        stack[i] = data
    n = len(csv_files)
    mean = {}
    sem = {}
    for j, name in enumerate(names0[1:], start=1):
        col = stack[:, :, j]
        mean[name] = col.mean(axis=0)
        sem[name] = col.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(times.size)
    return EnsembleAverages(times=times, mean=mean, sem=sem, n_realizations=n)


def write_aggregate_csv(path: Path | str, avg: EnsembleAverages) -> None:
    path = Path(path)
    header = ["t"]
    for name in avg.columns:
        header += [f"{name}_mean", f"{name}_sem"]
    lines = [",".join(header)]
    for i in range(avg.times.size):
        row = [repr(float(avg.times[i]))]
        for name in avg.columns:
            row.append(repr(float(avg.mean[name][i])))
            row.append(repr(float(avg.sem[name][i])))
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> EnsembleResult:
    """Run the full sweep and aggregate each disorder strength.

    Per-realization outputs already on disk (from an interrupted run) are
    verified against the config hash and reused.  Realizations whose
    propagation fails are excluded from the averages; more than 5% failures
    abort the sweep.
    """
    root = Path(cfg.outdir)
    root.mkdir(parents=True, exist_ok=True)
    cfg_hash = cfg.config_hash()
    config_path = root / "config.json"
    echo = {"config": cfg.to_dict(), "config_hash": cfg_hash, "version": __version__}
    if config_path.exists():
        previous = json.loads(config_path.read_text())
        if previous.get("config_hash") != cfg_hash:
            raise RuntimeError(
                f"{root} already holds results for a different configuration; "
                "use a fresh output directory"
            )
    else:
        config_path.write_text(json.dumps(echo, sort_keys=True, indent=1) + "\n")

    pending = []
    for w in cfg.w_list:
        for index in range(cfg.realizations):
            csv_path, manifest_path = realization_paths(root, w, index)
            if csv_path.exists() and manifest_path.exists():
                manifest = json.loads(manifest_path.read_text())
                if manifest.get("config_hash") != cfg_hash:
                    raise RuntimeError(f"{csv_path} belongs to a different configuration")
                continue
            pending.append((w, index))

    failures: dict[float, int] = {w: 0 for w in cfg.w_list}
    n_workers = _resolve_workers(workers)
    if pending:
        log.info("running %d trajectories on %d worker(s)", len(pending), n_workers)
    if n_workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_run_task, *zip(*[(cfg, w, i) for w, i in pending])))
    else:
        outcomes = [_run_task(cfg, w, i) for w, i in pending]
    for w, index, error in outcomes:
        if error is not None:
            failures[w] += 1
            log.warning("realization (w=%g, r=%d) failed: %s", w, index, error)
            for p in realization_paths(root, w, index):
                p.unlink(missing_ok=True)
    total_failed = sum(failures.values())
    total = len(cfg.w_list) * cfg.realizations
    if total_failed > MAX_FAILURE_FRACTION * total:
        raise RuntimeError(f"{total_failed}/{total} realizations failed; aborting sweep")

    by_w = {}
    for w in cfg.w_list:
        w_dir = root / w_dirname(w)
        avg = aggregate_directory(w_dir)
        write_aggregate_csv(w_dir / "aggregate.csv", avg)
        by_w[w] = avg
    return EnsembleResult(
        config=cfg.to_dict(),
        config_hash=cfg_hash,
        version=__version__,
        by_w=by_w,
        failures=failures,
    )


def load_result(outdir: Path | str) -> EnsembleResult:
    """Re-aggregate a results directory written by :func:`run_experiment`."""
    root = Path(outdir)
    config = None
    cfg_hash = None
    config_path = root / "config.json"
    if config_path.exists():
        echo = json.loads(config_path.read_text())
        config = echo.get("config")
        cfg_hash = echo.get("config_hash")
    by_w = {}
    for w_dir in sorted(root.glob("w*")):
        if not w_dir.is_dir():
            continue
        w = float(w_dir.name[1:])
        by_w[w] = aggregate_directory(w_dir)
    if not by_w:
        raise ValueError(f"no ensemble directories under {root}")
    return EnsembleResult(
        config=config, config_hash=cfg_hash, version=__version__, by_w=by_w
    )
