"""Per-run outcome metrics accumulated from per-tick network status."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyAccumulator, InvalidArgument


@dataclass(frozen=True)
class RunMetrics:
    mean_compromised: float
    max_compromised: float
    mean_offline: float
    max_offline: float
    two_thirds_breached: bool
    full_network_breached: bool
    center_compromised: bool
    ticks_run: int


def breaches_two_thirds(count: int, n_routers: int) -> bool:
    """Strictly more than two thirds of the routers; exact integer test."""
    return 3 * count > 2 * n_routers


class MetricsAccumulator:
    """Running sums, maxima and latched flags over recorded ticks.

    Counts are kept as integers so means are a single correctly rounded
    division at :meth:`finalize`.
    """

    def __init__(self, n_routers: int):
        if n_routers < 1:
            raise InvalidArgument(f"n_routers must be >= 1, got {n_routers}")
        self.n_routers = n_routers
        self.ticks = 0
        self.sum_compromised = 0
        self.sum_offline = 0
        self.max_compromised = 0
        self.max_offline = 0
        self.two_thirds = False
        self.full = False
        self.center = False

    def record_tick(self, compromised_count, offline_count, center_is_compromised, n_routers=None):
        n = self.n_routers if n_routers is None else n_routers
        if n != self.n_routers:
            raise InvalidArgument(f"n_routers changed from {self.n_routers} to {n}")
        c, o = int(compromised_count), int(offline_count)
        if not (0 <= c <= n and 0 <= o <= n):
            raise InvalidArgument(f"counts ({c}, {o}) outside [0, {n}]")
        self.ticks += 1
        self.sum_compromised += c
        self.sum_offline += o
        self.max_compromised = max(self.max_compromised, c)
        self.max_offline = max(self.max_offline, o)
        self.two_thirds = self.two_thirds or breaches_two_thirds(c, n)
        self.full = self.full or c == n
        self.center = self.center or bool(center_is_compromised)
        return self

    def record_many(self, compromised_counts, offline_counts, center_flags):
        """Vectorised :meth:`record_tick` over aligned per-tick arrays."""
        c = np.asarray(compromised_counts, dtype=np.int64)
        o = np.asarray(offline_counts, dtype=np.int64)
        f = np.asarray(center_flags)
        if not (c.shape == o.shape == f.shape) or c.ndim != 1:
            raise InvalidArgument("per-tick arrays must be 1-D and equally long")
        if c.size == 0:
            return self
        n = self.n_routers
        if c.min() < 0 or o.min() < 0 or c.max() > n or o.max() > n:
            raise InvalidArgument(f"counts outside [0, {n}]")
        self.ticks += int(c.size)
        self.sum_compromised += int(c.sum())
        self.sum_offline += int(o.sum())
        cmax = int(c.max())
        self.max_compromised = max(self.max_compromised, cmax)
        self.max_offline = max(self.max_offline, int(o.max()))
        self.two_thirds = self.two_thirds or breaches_two_thirds(cmax, n)
        self.full = self.full or cmax == n
        self.center = self.center or bool(f.any())
        return self

    def finalize(self) -> RunMetrics:
        if self.ticks == 0:
            raise EmptyAccumulator("no ticks recorded")
        n = self.n_routers
        return RunMetrics(
            mean_compromised=self.sum_compromised / (self.ticks * n),
            max_compromised=self.max_compromised / n,
            mean_offline=self.sum_offline / (self.ticks * n),
            max_offline=self.max_offline / n,
            two_thirds_breached=self.two_thirds,
            full_network_breached=self.full,
            center_compromised=self.center,
            ticks_run=self.ticks,
        )


def record_tick(accumulator: MetricsAccumulator, compromised_count, offline_count,
                center_is_compromised, n_routers):
    return accumulator.record_tick(compromised_count, offline_count, center_is_compromised, n_routers)


def finalize(accumulator: MetricsAccumulator) -> RunMetrics:
    return accumulator.finalize()
