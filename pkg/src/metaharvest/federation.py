"""Quantitative comparison of federated (live, fan-out) search with the
harvest-and-index approach this toolkit takes.

A federated query succeeds only when every member repository is up, so the
composite uptime is the product of the individual uptimes, and the response
arrives no sooner than the slowest member plus any result-merging overhead.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass


class EmptyFederation(ValueError):
    pass


@dataclass(frozen=True)
class FederationSourceStats:
    uptime: float  # availability probability in [0, 1]
    latency_ms: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.uptime <= 1.0:
            raise ValueError(f"uptime {self.uptime} outside [0, 1]")
        if not math.isfinite(self.latency_ms) or self.latency_ms < 0:
            raise ValueError(f"latency {self.latency_ms} must be finite and >= 0")


def composite_uptime(sources: list[FederationSourceStats]) -> float:
    """Product of individual uptimes; the empty federation is always up."""
    return math.prod(s.uptime for s in sources)


def federated_latency(sources: list[FederationSourceStats], processing_ms: float = 0.0) -> float:
    """Slowest member plus integration overhead."""
    if not sources:
        raise EmptyFederation("a federation needs at least one source")
    return max(s.latency_ms for s in sources) + processing_ms


def simulate_availability(
    sources: list[FederationSourceStats], trials: int, seed: int = 0
) -> float:
    """Monte Carlo check of the closed form: per trial, each source is up
    independently with its own probability and the query succeeds only if all
    are. Deterministic for a fixed seed."""
    rng = random.Random(seed)
    successes = 0
    uptimes = [s.uptime for s in sources]
    for _ in range(trials):
        if all(rng.random() < u for u in uptimes):
            successes += 1
    return successes / trials if trials else 1.0
