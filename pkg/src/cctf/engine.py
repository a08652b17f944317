"""Tick-based red-team/blue-team simulation.

Each tick runs six phases in a fixed order:

1. vulnerability generation on clean online routers
2. scouts scan accessible routers and broadcast vulnerable finds
3. exploiters attack known vulnerable routers
4. detectors scan online routers and queue findings
5. idle interceptors take the oldest valid queue entry
6. timers count down; stale attacker knowledge is pruned

Network status (compromised / offline counts) is sampled between phases 5
and 6.  The heavy lifting lives in :mod:`cctf._kernels`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels as K
from .errors import InvalidArgument
from .metrics import MetricsAccumulator, RunMetrics
from .rng import engine_seed, make_generator, topology_seed
from .topology import NetworkGraph, TopologyInfo, derive_topology, generate_scale_free


class InterceptorMode(str, Enum):
    RECOVER = "recover"
    ISOLATE = "isolate"


@dataclass(frozen=True)
class SimConfig:
    """All model parameters for a single run.

    ``scouts`` and ``detectors`` have no default: a run needs an explicit
    team formation.  The remaining defaults are the reference values (30
    routers, teams of 10, 2% vulnerability rate, certain scouting, 2%
    exploit chance, 10-tick interceptor actions).
    """

    scouts: int
    detectors: int
    n_routers: int = 30
    ba_m: int = 1
    team_size: int = 10
    vul_rate: float = 0.02
    p_scout: float = 1.0
    p_exploiter: float = 0.02
    p_detector_vulnerable: float = 0.5
    p_detector_exploited: float = 0.5
    delta_interceptor: int = 10
    max_ticks: int = 1000
    interceptor_mode: InterceptorMode = InterceptorMode.RECOVER
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "interceptor_mode", InterceptorMode(self.interceptor_mode))
        validate_config(self)

    @property
    def exploiters(self) -> int:
        return self.team_size - self.scouts

    @property
    def interceptors(self) -> int:
        return self.team_size - self.detectors

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["interceptor_mode"] = self.interceptor_mode.value
        return d


def validate_config(cfg: SimConfig) -> None:
    N = cfg.team_size
    if not isinstance(N, int) or N < 2:
        raise InvalidArgument(f"team_size must be an integer >= 2, got {N!r}")
    if not 1 <= cfg.scouts < N:
        raise InvalidArgument(f"scouts = {cfg.scouts} violates 1 ≤ S < N (N = {N})")
    if not 1 <= cfg.detectors < N:
        raise InvalidArgument(f"detectors = {cfg.detectors} violates 1 ≤ d < N (N = {N})")
    if cfg.n_routers < 2:
        raise InvalidArgument(f"n_routers must be >= 2, got {cfg.n_routers}")
    if not 1 <= cfg.ba_m < cfg.n_routers:
        raise InvalidArgument(f"ba_m = {cfg.ba_m} violates 1 ≤ m < n_routers")
    for name in ("vul_rate", "p_scout", "p_exploiter", "p_detector_vulnerable", "p_detector_exploited"):
        p = getattr(cfg, name)
        if not 0.0 <= p <= 1.0:
            raise InvalidArgument(f"{name} = {p} outside [0, 1]")
    if cfg.delta_interceptor < 1:
        raise InvalidArgument(f"delta_interceptor must be >= 1, got {cfg.delta_interceptor}")
    if cfg.max_ticks < 1:
        raise InvalidArgument(f"max_ticks must be >= 1, got {cfg.max_ticks}")
    if not 0 <= cfg.seed < 2**64:
        raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {cfg.seed}")


@dataclass(frozen=True)
class RouterState:
    vulnerable: bool
    compromised: bool
    recovery_remaining: int | None
    patch_remaining: int | None


@dataclass
class SimState:
    """Mutable state of one run.  Arrays are indexed by router id."""

    tick: int
    vulnerable: np.ndarray
    compromised: np.ndarray
    known: np.ndarray
    recovery: np.ndarray
    patch: np.ndarray
    interceptor_busy: np.ndarray
    queue_router: np.ndarray
    queue_reason: np.ndarray
    queue_meta: np.ndarray
    in_queue: np.ndarray
    rng: np.random.Generator = field(repr=False)

    @classmethod
    def clean(cls, n: int, interceptors: int, seed: int) -> "SimState":
        return cls(
            tick=0,
            vulnerable=np.zeros(n, dtype=np.uint8),
            compromised=np.zeros(n, dtype=np.uint8),
            known=np.zeros(n, dtype=np.uint8),
            recovery=np.zeros(n, dtype=np.int64),
            patch=np.zeros(n, dtype=np.int64),
            interceptor_busy=np.zeros(interceptors, dtype=np.int64),
            queue_router=np.zeros(2 * n, dtype=np.int64),
            queue_reason=np.zeros(2 * n, dtype=np.int64),
            queue_meta=np.zeros(2, dtype=np.int64),
            in_queue=np.zeros(2 * n, dtype=np.uint8),
            rng=make_generator(engine_seed(seed)),
        )

    @property
    def n(self) -> int:
        return self.vulnerable.shape[0]

    def router(self, v: int) -> RouterState:
        rec = int(self.recovery[v])
        pat = int(self.patch[v])
        return RouterState(bool(self.vulnerable[v]), bool(self.compromised[v]),
                           rec or None, pat or None)

    @property
    def attacker_known_vulnerable(self) -> set[int]:
        return {int(v) for v in np.flatnonzero(self.known)}

    @property
    def defender_queue(self) -> list[tuple[int, str]]:
        head, length = (int(x) for x in self.queue_meta)
        cap = self.queue_router.shape[0]
        names = {K.REASON_EXPLOITED: "exploited", K.REASON_VULNERABLE: "vulnerable"}
        out = []
        for i in range(length):
            pos = (head + i) % cap
            out.append((int(self.queue_router[pos]), names[int(self.queue_reason[pos])]))
        return out

    def offline(self, topo: TopologyInfo) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.uint8)
        K.offline_mask(self.recovery, topo.parent_array(self.n), topo.order_array(), out)
        return out

    def snapshot(self) -> tuple:
        """Hashable copy of everything except the RNG, for equality checks."""
        arrays = (self.vulnerable, self.compromised, self.known, self.recovery, self.patch,
                  self.interceptor_busy, self.queue_router, self.queue_reason,
                  self.queue_meta, self.in_queue)
        return (self.tick,) + tuple(a.tobytes() for a in arrays)


@dataclass(frozen=True)
class TickTrace:
    """Event counts for one tick.

    Fractions and ``center_compromised`` are sampled after the interceptor
    phase; ``known_vuln`` and ``queue_len`` at the end of the tick.
    """

    tick: int
    new_vulnerable: int
    scout_finds: int
    exploits: int
    detected_exploited: int
    detected_vulnerable: int
    recoveries_started: int
    patches_started: int
    recoveries_done: int
    patches_done: int
    compromised: int
    offline: int
    center_compromised: bool
    known_vuln: int
    queue_len: int
    n_routers: int

    @property
    def compromised_frac(self) -> float:
        return self.compromised / self.n_routers

    @property
    def offline_frac(self) -> float:
        return self.offline / self.n_routers

    @classmethod
    def from_row(cls, tick: int, row, n: int) -> "TickTrace":
        r = [int(x) for x in row]
        return cls(tick, *r[:K.T_CENTER], bool(r[K.T_CENTER]), r[K.T_KNOWN], r[K.T_QUEUE], n)


class _Packed:
    """Graph, topology and parameters flattened for the kernels."""

    def __init__(self, graph: NetworkGraph, topo: TopologyInfo, cfg: SimConfig):
        n = graph.n
        self.n = n
        self.indptr = graph.indptr
        self.indices = graph.indices
        self.peripheral = topo.peripheral_mask(n)
        self.parent = topo.parent_array(n)
        self.order = topo.order_array()
        ip = np.zeros(K.N_IPARAMS, dtype=np.int64)
        ip[K.I_N] = n
        ip[K.I_SCOUTS] = cfg.scouts
        ip[K.I_EXPLOITERS] = cfg.exploiters
        ip[K.I_DETECTORS] = cfg.detectors
        ip[K.I_INTERCEPTORS] = cfg.interceptors
        ip[K.I_DELTA] = cfg.delta_interceptor
        ip[K.I_ISOLATE] = cfg.interceptor_mode is InterceptorMode.ISOLATE
        ip[K.I_CENTRAL] = topo.central
        self.iparams = ip
        fp = np.zeros(K.N_FPARAMS, dtype=np.float64)
        fp[K.F_VUL_RATE] = cfg.vul_rate
        fp[K.F_P_SCOUT] = cfg.p_scout
        fp[K.F_P_EXPLOITER] = cfg.p_exploiter
        fp[K.F_P_DET_VULN] = cfg.p_detector_vulnerable
        fp[K.F_P_DET_EXPL] = cfg.p_detector_exploited
        self.fparams = fp
        self.width = K.row_width(n, cfg.team_size)

    def graph_args(self):
        return (self.indptr, self.indices, self.peripheral, self.parent, self.order,
                self.iparams, self.fparams)


def state_args(state: SimState):
    return (state.vulnerable, state.compromised, state.known, state.recovery, state.patch,
            state.interceptor_busy, state.queue_router, state.queue_reason,
            state.queue_meta, state.in_queue)


def build_network(config: SimConfig) -> tuple[NetworkGraph, TopologyInfo]:
    graph = generate_scale_free(config.n_routers, config.ba_m, topology_seed(config.seed))
    return graph, derive_topology(graph)


def init_simulation(config: SimConfig) -> tuple[NetworkGraph, TopologyInfo, SimState]:
    validate_config(config)
    graph, topo = build_network(config)
    state = SimState.clean(graph.n, config.interceptors, config.seed)
    return graph, topo, state


def init_on_graph(config: SimConfig, graph: NetworkGraph) -> tuple[TopologyInfo, SimState]:
    """Clean state on a caller-supplied graph (``n_routers`` must match)."""
    validate_config(config)
    if graph.n != config.n_routers:
        raise InvalidArgument(f"graph has {graph.n} routers, config says {config.n_routers}")
    return derive_topology(graph), SimState.clean(graph.n, config.interceptors, config.seed)


def tick(state: SimState, graph: NetworkGraph, topo: TopologyInfo, config: SimConfig,
         _packed: _Packed | None = None) -> TickTrace:
    if state.tick >= config.max_ticks:
        raise InvalidArgument(f"tick budget of {config.max_ticks} exhausted")
    p = _packed or _Packed(graph, topo, config)
    u = state.rng.random(p.width)
    out = np.zeros(K.N_TRACE, dtype=np.int64)
    n = p.n
    K.tick_kernel(
        *p.graph_args(), u, *state_args(state),
        np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.int64),
        out,
    )
    trace = TickTrace.from_row(state.tick, out, n)
    state.tick += 1
    return trace


def simulate(config: SimConfig, graph: NetworkGraph | None = None) -> tuple[RunMetrics, np.ndarray]:
    """Run all ticks; returns the metrics and the raw ``(max_ticks, N_TRACE)`` trace.

    Draws the whole run's uniforms up front.  A PCG64 stream yields the same
    doubles whether drawn as one block or row by row, so this matches
    calling :func:`tick` ``max_ticks`` times.
    """
    if graph is None:
        graph, topo, state = init_simulation(config)
    else:
        topo, state = init_on_graph(config, graph)
    p = _Packed(graph, topo, config)
    uniforms = state.rng.random((config.max_ticks, p.width))
    trace = np.zeros((config.max_ticks, K.N_TRACE), dtype=np.int64)
    K.run_kernel(*p.graph_args(), uniforms, *state_args(state), trace)
    state.tick = config.max_ticks
    acc = MetricsAccumulator(graph.n)
    acc.record_many(trace[:, K.T_COMPROMISED], trace[:, K.T_OFFLINE], trace[:, K.T_CENTER])
    return acc.finalize(), trace


def run_simulation(config: SimConfig) -> RunMetrics:
    return simulate(config)[0]


TRACE_HEADER = "tick,compromised_frac,offline_frac,known_vuln,queue_len"


def write_trace(fh, trace: np.ndarray, n_routers: int) -> None:
    fh.write(TRACE_HEADER + "\n")
    for t, row in enumerate(trace):
        fh.write(f"{t},{row[K.T_COMPROMISED] / n_routers:.6f},{row[K.T_OFFLINE] / n_routers:.6f},"
                 f"{row[K.T_KNOWN]},{row[K.T_QUEUE]}\n")
