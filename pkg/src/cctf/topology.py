"""Scale-free router network and the structural facts the simulation needs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidArgument
from .rng import make_generator


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected simple graph over routers ``0..n-1``.

    ``edges`` holds ``(u, v)`` pairs with ``u < v`` in ascending order;
    ``adjacency[v]`` is the ascending neighbor tuple of ``v``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    indptr: np.ndarray = field(repr=False, compare=False)
    indices: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges) -> "NetworkGraph":
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidArgument(f"self-loop on router {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidArgument(f"edge ({u}, {v}) outside [0, {n})")
            norm.add((min(u, v), max(u, v)))
        ordered = tuple(sorted(norm))
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in ordered:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adjacency = tuple(tuple(sorted(x)) for x in nbrs)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adjacency])
        indices = np.array([w for a in adjacency for w in a], dtype=np.int64)
        return cls(n, ordered, adjacency, indptr, indices)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


@dataclass(frozen=True)
class TopologyInfo:
    """Peripheral set, central hub and BFS tree rooted at the hub.

    ``parent`` has no entry for the central router.  ``order`` lists routers
    in BFS visiting order, so every router appears after its parent.
    """

    peripheral: frozenset[int]
    central: int
    parent: dict[int, int]
    depth: dict[int, int]
    order: tuple[int, ...]

    def parent_array(self, n: int) -> np.ndarray:
        arr = np.full(n, -1, dtype=np.int64)
        for child, p in self.parent.items():
            arr[child] = p
        return arr

    def peripheral_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=np.uint8)
        mask[list(self.peripheral)] = 1
        return mask

    def order_array(self) -> np.ndarray:
        return np.array(self.order, dtype=np.int64)


def generate_scale_free(n: int, m: int = 1, seed: int = 0) -> NetworkGraph:
    """Barabási–Albert preferential attachment.

    Starts from the edge 0–1.  Router ``i`` then attaches to ``min(m, i)``
    distinct existing routers, each drawn from the list of all edge endpoints
    so far (a router appears once per unit of degree), re-drawing duplicates.
    Draws come from a PCG64 stream seeded with ``seed``.
    """
    if n < 2:
        raise InvalidArgument(f"need n >= 2 routers, got {n}")
    if not 1 <= m < n:
        raise InvalidArgument(f"need 1 <= m < n, got m={m}, n={n}")
    rng = make_generator(seed)
    endpoints = [0, 1]
    edges = [(0, 1)]
    for i in range(2, n):
        targets: list[int] = []
        want = min(m, i)
        while len(targets) < want:
            t = endpoints[int(rng.integers(len(endpoints)))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((t, i))
            endpoints.append(t)
            endpoints.append(i)
    return NetworkGraph.from_edges(n, edges)


def derive_topology(graph: NetworkGraph) -> TopologyInfo:
    deg = [len(a) for a in graph.adjacency]
    central = max(range(graph.n), key=lambda v: (deg[v], -v))
    peripheral = frozenset(v for v in range(graph.n) if deg[v] == 1)

    parent: dict[int, int] = {}
    depth = {central: 0}
    order = [central]
    queue = deque([central])
    while queue:
        v = queue.popleft()
        for w in graph.adjacency[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                parent[w] = v
                order.append(w)
                queue.append(w)
    if len(order) != graph.n:
        raise InvalidArgument("graph is not connected")
    return TopologyInfo(peripheral, central, parent, depth, tuple(order))


def accessible_routers(graph: NetworkGraph, topo: TopologyInfo, state) -> set[int]:
    """Routers an attacker can currently reach.

    An online router is reachable if it is peripheral, compromised, or
    adjacent to an online compromised router.  Offline routers are neither
    reachable nor usable as stepping stones.
    """
    n = graph.n
    offline = np.zeros(n, dtype=np.uint8)
    _kernels.offline_mask(state.recovery, topo.parent_array(n), topo.order_array(), offline)
    acc = np.zeros(n, dtype=np.uint8)
    _kernels.accessible_mask(
        graph.indptr, graph.indices, topo.peripheral_mask(n), state.compromised, offline, acc
    )
    return {int(v) for v in np.flatnonzero(acc)}


def write_edge_list(fh, graph: NetworkGraph, topo: TopologyInfo, m: int, seed: int) -> None:
    fh.write(f"{graph.n} {m} {seed}\n")
    for u, v in graph.edges:
        fh.write(f"{u} {v}\n")
    fh.write(f"# central {topo.central}\n")
    fh.write("# peripheral " + " ".join(str(v) for v in sorted(topo.peripheral)) + "\n")


def read_edge_list(fh) -> tuple[NetworkGraph, int, int]:
    """Inverse of :func:`write_edge_list`; comment lines are ignored."""
    header = None
    edges = []
    for raw in fh:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            header = tuple(int(p) for p in parts)
            continue
        edges.append((int(parts[0]), int(parts[1])))
    if header is None:
        raise InvalidArgument("empty edge list")
    n, m, seed = header
    return NetworkGraph.from_edges(n, edges), m, seed
