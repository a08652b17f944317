"""Configuration files.

Files are TOML.  Single-run parameters go at top level or under ``[sim]``;
sweep lists go under ``[grid]``::

    [sim]
    n_routers = 30
    team_size = 10
    scouts = 3              # required for `cctf run`
    detectors = 7           # required for `cctf run`
    vul_rate = 0.02
    interceptor_mode = "recover"   # or "isolate"

    [grid]
    scouts = [1, 2, 3, 4, 5, 6, 7, 8, 9]
    detectors = [1, 2, 3, 4, 5, 6, 7, 8, 9]
    p_detector_vulnerable = [0.25, 0.5, 0.75, 1.0]
    p_detector_exploited = [0.25, 0.5, 0.75, 1.0]
    trials = 5
    master_seed = 20230601

Absent keys take the reference defaults.  Flag overrides win over file
values.
"""

from __future__ import annotations

import re
from dataclasses import fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .engine import InterceptorMode, SimConfig
from .errors import ConfigError, InvalidArgument
from .sweep import DEFAULT_MASTER_SEED, PAPER_DETECTOR_PROBS, PAPER_DETECTORS, PAPER_SCOUTS, PAPER_TRIALS, SweepGrid

SIM_KEYS = {f.name: f.type for f in fields(SimConfig)}
GRID_KEYS = {
    "scouts": "scouts_values",
    "detectors": "detectors_values",
    "p_detector_vulnerable": "p_detector_vulnerable_values",
    "p_detector_exploited": "p_detector_exploited_values",
    "trials": "trials",
    "master_seed": "master_seed",
}
INT_KEYS = {"scouts", "detectors", "n_routers", "ba_m", "team_size", "delta_interceptor",
            "max_ticks", "seed"}
FLOAT_KEYS = {"vul_rate", "p_scout", "p_exploiter", "p_detector_vulnerable", "p_detector_exploited"}

# InvalidArgument messages start with the parameter name
_PARAM_RE = re.compile(r"^(\w+)")


def _key_line(text: str, key: str, section: str | None = None) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[(\w+)\]", stripped)
        if m:
            current = m.group(1)
            continue
        if re.match(rf"^{re.escape(key)}\s*=", stripped):
            if section is None or current == section or (section == "sim" and current is None):
                return lineno
    return None


def _load(text: str, path=None) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        msg = getattr(exc, "msg", None) or str(exc)
        raise ConfigError(f"parse error: {msg}", line=line, path=path) from exc


def _coerce(key: str, value, text: str, section: str, path):
    line = _key_line(text, key, section)
    if key in INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}", line=line, path=path)
        return value
    if key in FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}", line=line, path=path)
        return float(value)
    if key == "interceptor_mode":
        try:
            return InterceptorMode(value)
        except ValueError:
            raise ConfigError(f"interceptor_mode must be 'recover' or 'isolate', got {value!r}",
                              line=line, path=path) from None
    return value


def _split(doc: dict, text: str, path) -> tuple[dict, dict]:
    sim, grid = {}, {}
    for key, value in doc.items():
        if key == "sim":
            if not isinstance(value, dict):
                raise ConfigError("'sim' must be a table", line=_key_line(text, key), path=path)
            for k, v in value.items():
                if k not in SIM_KEYS:
                    raise ConfigError(f"unknown parameter '{k}' in [sim]", line=_key_line(text, k, "sim"), path=path)
                sim[k] = _coerce(k, v, text, "sim", path)
        elif key == "grid":
            if not isinstance(value, dict):
                raise ConfigError("'grid' must be a table", line=_key_line(text, key), path=path)
            for k, v in value.items():
                if k not in GRID_KEYS:
                    raise ConfigError(f"unknown parameter '{k}' in [grid]", line=_key_line(text, k, "grid"), path=path)
                grid[k] = v
        elif key in SIM_KEYS:
            sim[key] = _coerce(key, value, text, "sim", path)
        else:
            raise ConfigError(f"unknown parameter '{key}'", line=_key_line(text, key), path=path)
    return sim, grid


def _range_error(exc: InvalidArgument, text: str, path) -> ConfigError:
    m = _PARAM_RE.match(str(exc))
    line = _key_line(text, m.group(1)) if m else None
    return ConfigError(f"range error: {exc}", line=line, path=path)


def parse_sim_config(text: str, overrides: dict | None = None, path=None) -> SimConfig:
    """Single-run config; ``scouts`` and ``detectors`` must be given somewhere."""
    sim, _ = _split(_load(text, path), text, path)
    for k, v in (overrides or {}).items():
        if v is not None:
            sim[k] = v
    for required in ("scouts", "detectors"):
        if required not in sim:
            raise ConfigError(f"'{required}' is required for a single run (set it in the file or by flag)",
                              path=path)
    try:
        return SimConfig(**sim)
    except InvalidArgument as exc:
        raise _range_error(exc, text, path) from exc


def _grid_list(grid: dict, key: str, default, text: str, path, kind):
    if key not in grid:
        return tuple(default)
    value = grid[key]
    line = _key_line(text, key, "grid")
    if not isinstance(value, list) or not value:
        raise ConfigError(f"grid '{key}' must be a non-empty list", line=line, path=path)
    for v in value:
        if isinstance(v, bool) or not isinstance(v, kind):
            raise ConfigError(f"grid '{key}' has a bad entry {v!r}", line=line, path=path)
    return tuple(float(v) if kind is not int else v for v in value)


def parse_sweep_config(text: str, overrides: dict | None = None, path=None) -> SweepGrid:
    """Sweep grid; base parameters from the ``[sim]`` part, lists from ``[grid]``."""
    sim, grid = _split(_load(text, path), text, path)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    master_seed = overrides.pop("master_seed", grid.get("master_seed", DEFAULT_MASTER_SEED))
    for k, v in overrides.items():
        sim[k] = v
    scouts = _grid_list(grid, "scouts", PAPER_SCOUTS, text, path, int)
    detectors = _grid_list(grid, "detectors", PAPER_DETECTORS, text, path, int)
    pdv = _grid_list(grid, "p_detector_vulnerable", PAPER_DETECTOR_PROBS, text, path, (int, float))
    pde = _grid_list(grid, "p_detector_exploited", PAPER_DETECTOR_PROBS, text, path, (int, float))
    trials = grid.get("trials", PAPER_TRIALS)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ConfigError(f"trials must be a positive integer, got {trials!r}",
                          line=_key_line(text, "trials", "grid"), path=path)
    if isinstance(master_seed, bool) or not isinstance(master_seed, int) or not 0 <= master_seed < 2**64:
        raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {master_seed!r}",
                          line=_key_line(text, "master_seed", "grid"), path=path)
    sim.update(scouts=scouts[0], detectors=detectors[0],
               p_detector_vulnerable=pdv[0], p_detector_exploited=pde[0])
    try:
        base = SimConfig(**sim)
        # every grid combination must be valid on its own
        for s in scouts:
            base.replace(scouts=s)
        for d in detectors:
            base.replace(detectors=d)
        for p in pdv:
            base.replace(p_detector_vulnerable=p)
        for p in pde:
            base.replace(p_detector_exploited=p)
    except InvalidArgument as exc:
        raise _range_error(exc, text, path) from exc
    return SweepGrid(scouts, detectors, pdv, pde, trials, base, master_seed)


def parse_config(text: str, overrides: dict | None = None, kind: str = "run", path=None):
    """Parse ``text`` into a :class:`SimConfig` (``kind="run"``) or :class:`SweepGrid`."""
    if kind == "run":
        return parse_sim_config(text, overrides, path)
    if kind == "sweep":
        return parse_sweep_config(text, overrides, path)
    raise InvalidArgument(f"unknown config kind {kind!r}")
