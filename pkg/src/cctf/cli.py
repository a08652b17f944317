"""``cctf`` command-line entry point.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
failure.  Diagnostics go to stderr; data goes to ``--out`` or stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, _kernels
from .analysis import METRIC_COLUMNS, correlation_table, surface_table
from .config import parse_sim_config, parse_sweep_config
from .engine import simulate, write_trace
from .errors import ConfigError, InvalidArgument, RunFailed, UndefinedCorrelation, UnknownColumn
from .sweep import read_dataset, run_sweep, write_dataset
from .topology import derive_topology, generate_scale_free, write_edge_list

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# (flag, config key, type, help)
SIM_FLAGS = [
    ("--scouts", "scouts", int, "attacker scouts S (1 <= S < N)"),
    ("--detectors", "detectors", int, "defender detectors d (1 <= d < N)"),
    ("--routers", "n_routers", int, "number of routers"),
    ("--ba-m", "ba_m", int, "preferential-attachment edges per new router"),
    ("--team-size", "team_size", int, "team size N for each side"),
    ("--vul-rate", "vul_rate", float, "per-tick chance a clean router becomes vulnerable"),
    ("--p-scout", "p_scout", float, "scout detection probability"),
    ("--p-exploiter", "p_exploiter", float, "exploit success probability"),
    ("--p-det-vuln", "p_detector_vulnerable", float, "detector probability for vulnerable routers"),
    ("--p-det-expl", "p_detector_exploited", float, "detector probability for exploited routers"),
    ("--delta", "delta_interceptor", int, "ticks an interceptor action takes"),
    ("--ticks", "max_ticks", int, "ticks per run"),
    ("--mode", "interceptor_mode", str, "interceptor action: recover or isolate"),
]


def _add_sim_flags(p, exclude=()):
    for flag, key, typ, help_ in SIM_FLAGS:
        if key in exclude:
            continue
        kw = {"choices": ["recover", "isolate"]} if key == "interceptor_mode" else {}
        p.add_argument(flag, dest=key, type=typ, default=None, help=help_, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cctf", description="Red-team/blue-team team-formation simulator.")
    parser.add_argument("--version", action="version",
                        version=f"cctf {__version__} (backend: {_kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", metavar="{generate,run,sweep,analyze}", parser_class=_Parser)

    g = sub.add_parser("generate", help="generate a scale-free router network")
    g.add_argument("--nodes", type=int, default=30, help="router count (default 30)")
    g.add_argument("--m", type=int, default=1, help="attachment edges per new router (default 1)")
    g.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    g.add_argument("--out", help="output file (default stdout)")

    r = sub.add_parser("run", help="run a single simulation")
    r.add_argument("--config", help="TOML config file")
    r.add_argument("--seed", type=int, default=None, help="run seed")
    r.add_argument("--trace", help="write a per-tick CSV trace here")
    r.add_argument("--out", help="write the run metrics (JSON) here instead of stdout")
    _add_sim_flags(r)

    s = sub.add_parser("sweep", help="run the parameter grid and write the dataset CSV")
    s.add_argument("--config", required=True, help="TOML config file with a [grid] table")
    s.add_argument("--out", required=True, help="dataset CSV path")
    s.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    s.add_argument("--master-seed", dest="master_seed", type=int, default=None,
                   help="overrides [grid] master_seed")
    _add_sim_flags(s, exclude=("scouts", "detectors", "p_detector_vulnerable", "p_detector_exploited"))

    a = sub.add_parser("analyze", help="correlation table or surface grid from a dataset")
    a.add_argument("--dataset", required=True, help="dataset CSV written by `cctf sweep`")
    a.add_argument("--table", choices=["correlations", "surface"], default="correlations")
    a.add_argument("--metric", default="mean_compromised",
                   help=f"surface metric column (default mean_compromised; one of {', '.join(METRIC_COLUMNS)}, ...)")
    a.add_argument("--stat", choices=["mean", "max"], default="mean", help="surface cell statistic")
    a.add_argument("--level", choices=["rows", "configs"], default="rows",
                   help="correlate over dataset rows or per-config trial means")
    a.add_argument("--out", help="output file (default stdout)")
    return parser


def _overrides(args) -> dict:
    return {key: getattr(args, key) for _, key, _, _ in SIM_FLAGS if hasattr(args, key)}


def _read_config(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", path=path) from exc


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    try:
        graph = generate_scale_free(args.nodes, args.m, args.seed)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc
    topo = derive_topology(graph)
    if args.out:
        with open(args.out, "w") as fh:
            write_edge_list(fh, graph, topo, args.m, args.seed)
    else:
        write_edge_list(sys.stdout, graph, topo, args.m, args.seed)
    return EXIT_OK


def cmd_run(args) -> int:
    text = _read_config(args.config) if args.config else ""
    overrides = _overrides(args)
    overrides["seed"] = args.seed
    cfg = parse_sim_config(text, overrides, path=args.config)
    print("effective config: " + json.dumps(cfg.to_dict()), file=sys.stderr)
    metrics, trace = simulate(cfg)
    if args.trace:
        with open(args.trace, "w") as fh:
            write_trace(fh, trace, cfg.n_routers)
    payload = {
        "mean_compromised": metrics.mean_compromised,
        "max_compromised": metrics.max_compromised,
        "mean_offline": metrics.mean_offline,
        "max_offline": metrics.max_offline,
        "metric2_two_thirds": metrics.two_thirds_breached,
        "metric2_full": metrics.full_network_breached,
        "metric3_center": metrics.center_compromised,
        "ticks_run": metrics.ticks_run,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise UsageError(f"--jobs must be >= 1, got {args.jobs}")
    text = _read_config(args.config)
    overrides = _overrides(args)
    overrides["master_seed"] = args.master_seed
    grid = parse_sweep_config(text, overrides, path=args.config)
    summary = {
        "scouts": list(grid.scouts_values),
        "detectors": list(grid.detectors_values),
        "p_detector_vulnerable": list(grid.p_detector_vulnerable_values),
        "p_detector_exploited": list(grid.p_detector_exploited_values),
        "trials": grid.trials,
        "master_seed": grid.master_seed,
        "base": grid.base.to_dict(),
    }
    print("effective config: " + json.dumps(summary), file=sys.stderr)
    print(f"{grid.n_configs} configs x {grid.trials} trials = {grid.n_runs} runs, "
          f"jobs={args.jobs}, backend={_kernels.BACKEND}", file=sys.stderr)
    t0 = time.perf_counter()
    rows = run_sweep(grid, args.jobs)
    write_dataset(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out} in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        cols = read_dataset(args.dataset)
    except OSError as exc:
        raise ConfigError(f"cannot read dataset: {exc.strerror or exc}", path=args.dataset) from exc
    if args.table == "correlations":
        text = correlation_table(cols, level=args.level).to_csv()
    else:
        try:
            text = surface_table(cols, args.metric, args.stat).to_csv()
        except UnknownColumn:
            raise UsageError(f"unknown column {args.metric!r}") from None
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "sweep": cmd_sweep, "analyze": cmd_analyze}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        print(parser.format_help(), file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cctf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, InvalidArgument) as exc:
        print(f"cctf: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RunFailed as exc:
        print(f"cctf: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (UndefinedCorrelation, OSError) as exc:
        print(f"cctf: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
