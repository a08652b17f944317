"""Strategy/outcome correlations and exploiter-by-interceptor surfaces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UndefinedCorrelation, UnknownColumn
from .sweep import DATASET_HEADER, DatasetRow

STRATEGY_COLUMNS = {
    "attacker_strategy": "exploiters",
    "defender_strategy": "interceptors",
}
METRIC_COLUMNS = (
    "mean_compromised", "max_compromised", "mean_offline", "max_offline",
    "metric2_two_thirds", "metric3_center",
)


def pearson_r(x, y) -> float:
    """Pearson product-moment correlation of two equal-length sequences.

    Raises :class:`UndefinedCorrelation` if either sequence is constant.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidArgument("pearson_r expects 1-D sequences")
    if x.shape != y.shape:
        raise InvalidArgument(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise InvalidArgument("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelation("zero variance")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("zero variance after centering")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def as_columns(dataset) -> dict[str, np.ndarray]:
    """Accept a list of :class:`DatasetRow` or a column mapping."""
    if isinstance(dataset, dict):
        return dataset
    rows = list(dataset)
    if rows and not isinstance(rows[0], DatasetRow):
        raise InvalidArgument("dataset must be DatasetRow objects or a column mapping")
    fields = [r.csv_fields() for r in rows]
    cols = {}
    for j, name in enumerate(DATASET_HEADER):
        vals = [f[j] for f in fields]
        if name == "seed":
            cols[name] = np.array([int(v) for v in vals], dtype=np.uint64)
        else:
            cols[name] = np.array([float(v) for v in vals], dtype=np.float64)
    # metrics at full precision rather than the CSV's 6 decimals
    for name, attr in (("mean_compromised", "mean_compromised"),
                       ("max_compromised", "max_compromised"),
                       ("mean_offline", "mean_offline"),
                       ("max_offline", "max_offline")):
        cols[name] = np.array([getattr(r.metrics, attr) for r in rows], dtype=np.float64)
    return cols


def _config_means(cols: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    idx = cols["config_index"].astype(np.int64)
    keys, inverse = np.unique(idx, return_inverse=True)
    counts = np.bincount(inverse)
    out = {"config_index": keys}
    for name in set(STRATEGY_COLUMNS.values()) | set(METRIC_COLUMNS):
        out[name] = np.bincount(inverse, weights=cols[name].astype(np.float64)) / counts
    return out


@dataclass(frozen=True)
class CorrelationTable:
    values: dict[tuple[str, str], float]
    level: str = "rows"

    def __getitem__(self, key):
        return self.values[key]

    def row(self, strategy: str) -> list[float]:
        return [self.values[(strategy, m)] for m in METRIC_COLUMNS]

    def to_csv(self) -> str:
        lines = ["strategy," + ",".join(METRIC_COLUMNS)]
        for strategy in STRATEGY_COLUMNS:
            lines.append(strategy + "," + ",".join(f"{v:.6f}" for v in self.row(strategy)))
        return "\n".join(lines) + "\n"


def correlation_table(dataset, level: str = "rows") -> CorrelationTable:
    """Pearson R of each outcome column against exploiters and interceptors.

    ``level="rows"`` correlates over every dataset row; ``"configs"`` first
    averages the trials of each configuration.
    """
    cols = as_columns(dataset)
    if len(cols["config_index"]) == 0:
        raise InvalidArgument("empty dataset")
    if level == "configs":
        cols = _config_means(cols)
    elif level != "rows":
        raise InvalidArgument(f"unknown level {level!r}; expected 'rows' or 'configs'")
    values = {}
    for strategy, scol in STRATEGY_COLUMNS.items():
        for metric in METRIC_COLUMNS:
            try:
                values[(strategy, metric)] = pearson_r(cols[scol], cols[metric])
            except UndefinedCorrelation as exc:
                raise UndefinedCorrelation(f"{strategy} x {metric}: {exc}") from exc
    return CorrelationTable(values, level)


@dataclass(frozen=True)
class SurfaceTable:
    """Dense grid: rows are exploiter counts, columns interceptor counts.

    Cells without data hold NaN.
    """

    metric: str
    statistic: str
    exploiters: tuple[int, ...]
    interceptors: tuple[int, ...]
    values: np.ndarray

    def cell(self, exploiters: int, interceptors: int) -> float:
        return float(self.values[self.exploiters.index(exploiters), self.interceptors.index(interceptors)])

    def to_csv(self) -> str:
        lines = ["exploiters\\interceptors," + ",".join(str(i) for i in self.interceptors)]
        for e, row in zip(self.exploiters, self.values):
            lines.append(str(e) + "," + ",".join("" if np.isnan(v) else f"{v:.6f}" for v in row))
        return "\n".join(lines) + "\n"


def surface_table(dataset, metric: str, statistic: str = "mean") -> SurfaceTable:
    cols = as_columns(dataset)
    if metric not in cols or metric in ("config_index", "trial", "seed"):
        raise UnknownColumn(metric)
    if statistic not in ("mean", "max"):
        raise InvalidArgument(f"statistic must be 'mean' or 'max', got {statistic!r}")
    ex = cols["exploiters"].astype(np.int64)
    it = cols["interceptors"].astype(np.int64)
    vals = cols[metric].astype(np.float64)
    ex_keys = tuple(int(v) for v in np.unique(ex))
    it_keys = tuple(int(v) for v in np.unique(it))
    grid = np.full((len(ex_keys), len(it_keys)), np.nan)
    for i, e in enumerate(ex_keys):
        for j, k in enumerate(it_keys):
            sel = vals[(ex == e) & (it == k)]
            if sel.size:
                grid[i, j] = sel.mean() if statistic == "mean" else sel.max()
    return SurfaceTable(metric, statistic, ex_keys, it_keys, grid)


def increase_fraction(surface: SurfaceTable) -> float:
    """Share of adjacent interceptor-column pairs where the value rises.

    Pairs are taken within each exploiter row; cells with NaN are skipped.
    """
    v = surface.values
    a, b = v[:, :-1], v[:, 1:]
    ok = ~(np.isnan(a) | np.isnan(b))
    if not ok.any():
        return 0.0
    return float(((b > a) & ok).sum() / ok.sum())
