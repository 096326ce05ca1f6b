"""Throughput harness: critiques processed per second by one sequential instance.

Measured mode runs the subject and uses wall-clock time. Simulated mode
replaces subject latency with a configured latency model and sums it
arithmetically (no sleeping), which keeps calibrated comparisons fast.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from typing import Callable, Sequence

logger = logging.getLogger(__name__)

__all__ = [
    "LatencyModel",
    "ThroughputResult",
    "measure_throughput",
    "critique_workload",
    "rule_critique_subject",
]


@dataclass(frozen=True)
class LatencyModel:
    """Fixed or normally sampled per-item latency in seconds."""

    fixed_s: float | None = None
    mean_s: float | None = None
    stddev_s: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if (self.fixed_s is None) == (self.mean_s is None):
            raise ValueError("specify exactly one of fixed_s or mean_s")

    def sample_all(self, count: int) -> list[float]:
        if self.fixed_s is not None:
            return [self.fixed_s] * count
        rng = random.Random(self.seed)
        return [max(0.0, rng.gauss(self.mean_s, self.stddev_s)) for _ in range(count)]

    def spec(self) -> dict:
        if self.fixed_s is not None:
            return {"fixed_s": self.fixed_s}
        return {"mean_s": self.mean_s, "stddev_s": self.stddev_s, "seed": self.seed}


@dataclass(frozen=True)
class ThroughputResult:
    subject: str
    items_processed: int
    wall_time_s: float
    rate_per_s: float
    mode: str  # "measured" | "simulated"
    latency_model: dict | None = None
    error: str | None = None


def measure_throughput(
    subject: Callable[[object], object],
    workload: Sequence[object],
    mode: str = "measured",
    latency_model: LatencyModel | None = None,
    subject_name: str = "subject",
) -> ThroughputResult:
    """Process the workload strictly sequentially and report the rate.

    A subject failure in measured mode aborts the run; the partial count is
    reported in the result together with the error.
    """
    if not workload:
        raise ValueError("workload must be non-empty")
    if mode not in ("measured", "simulated"):
        raise ValueError(f"unknown throughput mode: {mode!r}")

    if mode == "simulated":
        if latency_model is None:
            raise ValueError("simulated mode requires a latency model")
        wall = sum(latency_model.sample_all(len(workload)))
        return ThroughputResult(
            subject=subject_name,
            items_processed=len(workload),
            wall_time_s=wall,
            rate_per_s=len(workload) / wall,
            mode="simulated",
            latency_model=latency_model.spec(),
        )

    processed = 0
    error: str | None = None
    started = time.perf_counter()
    for item in workload:
        try:
            subject(item)
        except Exception as exc:  # partial counts are part of the contract
            error = f"{type(exc).__name__}: {exc}"
            logger.warning("throughput subject failed after %d items: %s", processed, error)
            break
        processed += 1
    wall = time.perf_counter() - started
    return ThroughputResult(
        subject=subject_name,
        items_processed=processed,
        wall_time_s=wall,
        rate_per_s=processed / wall if wall > 0 else 0.0,
        mode="measured",
        error=error,
    )


_WORKLOAD_TOPICS = (
    ("vaccination rates", "clinics in", "doses were administered"),
    ("river flooding", "gauges along", "homes were inundated"),
    ("school funding", "districts around", "grants were approved"),
    ("air quality", "sensors near", "readings were recorded"),
    ("road accidents", "intersections in", "collisions were reported"),
)

_WORKLOAD_PLACES = ("Ardale", "Brinton", "Corvey", "Dunmore", "Eastfall")


def critique_workload(n: int, seed: int = 0) -> list[tuple[str, str, str]]:
    """Synthetic (claim, evidence, response) triples for desk-scale benchmarking."""
    rng = random.Random(seed)
    workload = []
    for i in range(n):
        topic, prefix, suffix = _WORKLOAD_TOPICS[i % len(_WORKLOAD_TOPICS)]
        place = _WORKLOAD_PLACES[rng.randrange(len(_WORKLOAD_PLACES))]
        true_count = rng.randrange(1_000, 90_000)
        wrong_count = true_count + rng.randrange(1, 5_000)
        evidence = (
            f"The latest report covers {topic}. "
            f"At {prefix} {place}, {true_count:,} {suffix} during the survey period."
        )
        claim = f"At {prefix} {place}, {wrong_count:,} {suffix}."
        response = f"The report on {topic} shows that {true_count:,} {suffix} at {prefix} {place}."
        workload.append((claim, evidence, response))
    return workload


def rule_critique_subject(topic_threshold: float = 0.15) -> Callable[[object], object]:
    """A measured-mode subject that runs all three rule critics and aggregates."""
    from .critics import RuleCritics, aggregate
    from .core import ElementKind

    suite = RuleCritics(topic_threshold=topic_threshold)

    def run(item: object) -> object:
        claim, evidence, response = item  # type: ignore[misc]
        parts = [
            suite.critique(kind, claim, evidence, response)
            for kind in (ElementKind.NUMBER, ElementKind.ENTITY, ElementKind.TOPIC)
        ]
        return aggregate(*parts)

    return run
