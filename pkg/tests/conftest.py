import numpy as np
import pytest

from cctf.engine import SimConfig, init_on_graph
from cctf.topology import NetworkGraph

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def path_graph(n):
    return NetworkGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(hub, leaves):
    return NetworkGraph.from_edges(len(leaves) + 1, [(hub, v) for v in leaves])


@pytest.fixture
def small_world():
    """3-router path 0-1-2 with a team of 2 (1 scout, 1 detector)."""

    def make(**kw):
        params = dict(scouts=1, detectors=1, team_size=2, n_routers=3, vul_rate=0.0,
                      p_scout=0.0, p_exploiter=0.0, p_detector_vulnerable=0.0,
                      p_detector_exploited=0.0, max_ticks=100)
        params.update(kw)
        cfg = SimConfig(**params)
        g = path_graph(cfg.n_routers)
        topo, state = init_on_graph(cfg, g)
        return cfg, g, topo, state

    return make


def offline_set(state, topo):
    return set(np.flatnonzero(state.offline(topo)).tolist())
