"""Seeded event-driven simulation of a k-channel loss system.

Calls arrive as a Poisson stream and hold a channel for an exponential time
(or a fixed one, for the insensitivity check). A call that finds every
channel busy is lost. Counting starts after a warm-up period so the
empty-system start does not bias the estimate.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .teletraffic import TrafficScenario, offered_traffic

_CHUNK = 65536


@dataclass(frozen=True)
class SimConfig:
    scenario: TrafficScenario
    total_calls: int = 1_000_000
    seed: int = 0
    warmup_calls: int = 10_000
    holding: str = "exponential"  # or "deterministic"
    per_user: bool = False

    def __post_init__(self):
        if not self.total_calls > self.warmup_calls >= 0:
            raise ValueError("need total_calls > warmup_calls >= 0")
        if self.holding not in ("exponential", "deterministic"):
            raise ValueError(f"unknown holding-time law {self.holding!r}")


@dataclass(frozen=True)
class SimResult:
    offered: float
    channels: int
    blocked: int
    calls_observed: int

    @property
    def blocked_fraction(self) -> float:
        return self.blocked / self.calls_observed

    @property
    def std_error(self) -> float:
        p = self.blocked_fraction
        return math.sqrt(p * (1.0 - p) / self.calls_observed)

    def to_dict(self) -> dict:
        return {
            "offered_erlangs": self.offered,
            "channels": self.channels,
            "blocked": self.blocked,
            "calls_observed": self.calls_observed,
            "blocked_fraction": self.blocked_fraction,
            "std_error": self.std_error,
        }


def pool(results: list[SimResult]) -> SimResult:
    """Merge replications by summing their counts."""
    if not results:
        raise ValueError("nothing to pool")
    first = results[0]
    return SimResult(
        first.offered,
        first.channels,
        sum(r.blocked for r in results),
        sum(r.calls_observed for r in results),
    )


def _arrival_times(cfg: SimConfig, rng: np.random.Generator, rate: float):
    if not cfg.per_user:
        t = 0.0
        while True:
            for gap in rng.exponential(1.0 / rate, _CHUNK).tolist():
                t += gap
                yield t
    # one Poisson stream per user, merged in time order
    users = int(cfg.scenario.users_M)
    if users != cfg.scenario.users_M:
        raise ValueError("per-user mode needs an integer user count")
    per_user = rate / users
    pending = [(float(rng.exponential(1.0 / per_user)), u) for u in range(users)]
    heapq.heapify(pending)
    while True:
        t, u = pending[0]
        heapq.heapreplace(pending, (t + float(rng.exponential(1.0 / per_user)), u))
        yield t


def _holding_times(cfg: SimConfig, rng: np.random.Generator, mean: float):
    if cfg.holding == "deterministic":
        while True:
            yield mean
    while True:
        yield from rng.exponential(mean, _CHUNK).tolist()


def simulate(cfg: SimConfig) -> SimResult:
    """Run one replication; identical configs give identical results.

    The arrival rate is ``A / t_h`` so the simulated load equals the
    offered traffic ``A`` that Erlang-B is evaluated at (``M * s`` when
    ``m = 1``).
    """
    sc = cfg.scenario
    k = sc.channels
    if k < 1:
        raise ValueError("the scenario provides zero channels")
    A = float(offered_traffic(sc))
    mean_hold = float(sc.holding_th)
    rate = A / mean_hold
    if rate <= 0:
        raise ValueError("arrival rate is zero")

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    arrivals = _arrival_times(cfg, rng, rate)
    holds = _holding_times(cfg, rng, mean_hold)
    busy: list[float] = []  # departure times of calls in service
    blocked = 0
    warmup = cfg.warmup_calls
    for n in range(cfg.total_calls):
        t = next(arrivals)
        while busy and busy[0] <= t:
            heapq.heappop(busy)
        if len(busy) >= k:
            if n >= warmup:
                blocked += 1
            continue
        heapq.heappush(busy, t + next(holds))
        assert len(busy) <= k
    return SimResult(A, k, blocked, cfg.total_calls - warmup)


def replicate(cfg: SimConfig, replications: int) -> list[SimResult]:
    """Independent replications with child seeds spawned from ``cfg.seed``."""
    if replications < 1:
        raise ValueError("replications must be at least 1")
    if replications == 1:
        return [simulate(cfg)]
    children = np.random.SeedSequence(cfg.seed).spawn(replications)
    out = []
    for child in children:
        seed = int(child.generate_state(2, np.uint64)[0])
        out.append(simulate(_with_seed(cfg, seed)))
    return out


def _with_seed(cfg: SimConfig, seed: int) -> SimConfig:
    return SimConfig(cfg.scenario, cfg.total_calls, seed, cfg.warmup_calls, cfg.holding, cfg.per_user)
