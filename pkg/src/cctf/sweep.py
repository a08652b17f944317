"""Parameter grid enumeration, parallel execution and dataset CSV output."""

from __future__ import annotations

import csv
import io
import itertools
import os
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .engine import SimConfig, run_simulation
from .errors import InvalidArgument, RunFailed
from .metrics import RunMetrics
from .rng import mix

PAPER_SCOUTS = tuple(range(1, 10))
PAPER_DETECTORS = tuple(range(1, 10))
PAPER_DETECTOR_PROBS = (0.25, 0.5, 0.75, 1.0)
PAPER_TRIALS = 5
DEFAULT_MASTER_SEED = 20230601

DATASET_HEADER = (
    "config_index", "trial", "seed", "n_routers", "ba_m", "team_size", "scouts", "exploiters",
    "detectors", "interceptors", "vul_rate", "p_scout", "p_exploiter", "p_det_vuln",
    "p_det_expl", "delta_interceptor", "max_ticks", "mean_compromised", "max_compromised",
    "mean_offline", "max_offline", "metric2_two_thirds", "metric2_full", "metric3_center",
)


@dataclass(frozen=True)
class SweepGrid:
    scouts_values: tuple[int, ...] = PAPER_SCOUTS
    detectors_values: tuple[int, ...] = PAPER_DETECTORS
    p_detector_vulnerable_values: tuple[float, ...] = PAPER_DETECTOR_PROBS
    p_detector_exploited_values: tuple[float, ...] = PAPER_DETECTOR_PROBS
    trials: int = PAPER_TRIALS
    base: SimConfig = field(default_factory=lambda: SimConfig(scouts=1, detectors=1))
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self):
        for name in ("scouts_values", "detectors_values",
                     "p_detector_vulnerable_values", "p_detector_exploited_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def n_configs(self) -> int:
        return (len(self.scouts_values) * len(self.detectors_values)
                * len(self.p_detector_vulnerable_values) * len(self.p_detector_exploited_values))

    @property
    def n_runs(self) -> int:
        return self.n_configs * self.trials


@dataclass(frozen=True)
class DatasetRow:
    config_index: int
    trial: int
    seed: int
    config: SimConfig
    metrics: RunMetrics

    def csv_fields(self) -> list[str]:
        c, m = self.config, self.metrics
        return [
            str(self.config_index), str(self.trial), str(self.seed),
            str(c.n_routers), str(c.ba_m), str(c.team_size), str(c.scouts), str(c.exploiters),
            str(c.detectors), str(c.interceptors),
            _f(c.vul_rate), _f(c.p_scout), _f(c.p_exploiter),
            _f(c.p_detector_vulnerable), _f(c.p_detector_exploited),
            str(c.delta_interceptor), str(c.max_ticks),
            _f(m.mean_compromised), _f(m.max_compromised), _f(m.mean_offline), _f(m.max_offline),
            _b(m.two_thirds_breached), _b(m.full_network_breached), _b(m.center_compromised),
        ]


def _f(x: float) -> str:
    return f"{x:.6f}"


def _b(x: bool) -> str:
    return "1" if x else "0"


def run_seed(master_seed: int, config_index: int, trial: int) -> int:
    return mix(master_seed, config_index, trial)


def enumerate_grid(grid: SweepGrid) -> list[SimConfig]:
    """Cartesian product, scouts outermost, then detectors, p_dv, p_de.

    The position in the returned list is the ``config_index``.  Each
    config carries the base seed; per-trial seeds are assigned by
    :func:`run_sweep`.
    """
    lists = (grid.scouts_values, grid.detectors_values,
             grid.p_detector_vulnerable_values, grid.p_detector_exploited_values)
    names = ("scouts", "detectors", "p_detector_vulnerable", "p_detector_exploited")
    for name, values in zip(names, lists):
        if not values:
            raise InvalidArgument(f"grid list '{name}' is empty")
    if grid.trials < 1:
        raise InvalidArgument(f"trials must be >= 1, got {grid.trials}")
    return [
        grid.base.replace(scouts=s, detectors=d, p_detector_vulnerable=pv, p_detector_exploited=pe)
        for s, d, pv, pe in itertools.product(*lists)
    ]


def _run_one(job):
    config_index, trial, cfg = job
    try:
        return DatasetRow(config_index, trial, cfg.seed, cfg, run_simulation(cfg))
    except Exception as exc:
        raise RunFailed(config_index, trial, exc) from exc


def _run_chunk(jobs):
    return [_run_one(j) for j in jobs]


def sweep_jobs(grid: SweepGrid):
    for ci, cfg in enumerate(enumerate_grid(grid)):
        for trial in range(grid.trials):
            seed = run_seed(grid.master_seed, ci, trial)
            yield ci, trial, cfg.replace(seed=seed)


def run_sweep(grid: SweepGrid, parallelism: int = 1, progress=None) -> list[DatasetRow]:
    """Execute every (config, trial) run; rows come back sorted.

    With the compiled backend the kernels release the GIL, so a thread pool
    is used; the pure-Python backend fans out to processes instead.
    ``progress``, if given, is called with the number of rows finished.
    """
    if parallelism < 1:
        raise InvalidArgument(f"parallelism must be >= 1, got {parallelism}")
    jobs = list(sweep_jobs(grid))
    rows: list[DatasetRow] = []
    if parallelism == 1:
        for job in jobs:
            rows.append(_run_one(job))
            if progress:
                progress(len(rows))
    else:
        chunk = max(1, min(64, len(jobs) // (parallelism * 4) or 1))
        chunks = [jobs[i:i + chunk] for i in range(0, len(jobs), chunk)]
        pool_cls = ThreadPoolExecutor if _kernels.BACKEND == "numba" else ProcessPoolExecutor
        with pool_cls(max_workers=parallelism) as pool:
            for part in pool.map(_run_chunk, chunks):
                rows.extend(part)
                if progress:
                    progress(len(rows))
    rows.sort(key=lambda r: (r.config_index, r.trial))
    return rows


def default_jobs() -> int:
    return os.cpu_count() or 1


def dataset_text(rows) -> str:
    buf = io.StringIO()
    _write_rows(buf, rows)
    return buf.getvalue()


def _write_rows(fh, rows) -> None:
    fh.write(",".join(DATASET_HEADER) + "\n")
    for r in rows:
        fh.write(",".join(r.csv_fields()) + "\n")


def write_dataset(rows, destination) -> None:
    """Write rows as CSV to a path or an open text stream."""
    if hasattr(destination, "write"):
        _write_rows(destination, rows)
        return
    try:
        with open(destination, "w", newline="") as fh:
            _write_rows(fh, rows)
    except OSError as exc:
        raise OSError(f"cannot write dataset to {destination}: {exc.strerror or exc}") from exc


INT_COLUMNS = {"config_index", "trial", "seed", "n_routers", "ba_m", "team_size", "scouts",
               "exploiters", "detectors", "interceptors", "delta_interceptor", "max_ticks",
               "metric2_two_thirds", "metric2_full", "metric3_center"}


def read_dataset(source) -> dict[str, np.ndarray]:
    """Load a dataset CSV into a column-name -> array mapping."""
    if hasattr(source, "read"):
        reader = csv.reader(source)
        records = list(reader)
    else:
        with open(source, newline="") as fh:
            records = list(csv.reader(fh))
    if not records:
        raise InvalidArgument("dataset is empty (no header)")
    header, body = records[0], records[1:]
    missing = [c for c in DATASET_HEADER if c not in header]
    if missing:
        raise InvalidArgument(f"dataset lacks columns: {', '.join(missing)}")
    cols = {}
    for j, name in enumerate(header):
        raw = [rec[j] for rec in body]
        if name == "seed":
            cols[name] = np.array([int(x) for x in raw], dtype=np.uint64)
        elif name in INT_COLUMNS:
            cols[name] = np.array([int(x) for x in raw], dtype=np.int64)
        else:
            cols[name] = np.array([float(x) for x in raw], dtype=np.float64)
    return cols
