"""Agent-based simulator of red-team/blue-team team formations on a router network."""

__version__ = "0.1.0"

from .engine import SimConfig, init_simulation, run_simulation, tick  # noqa: E402
from .sweep import SweepGrid, enumerate_grid, run_sweep, write_dataset  # noqa: E402

__all__ = ["SimConfig", "SweepGrid", "enumerate_grid", "init_simulation", "run_simulation",
           "run_sweep", "tick", "write_dataset"]
