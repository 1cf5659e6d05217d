"""Seeded generators for the three framework-capacity market scenarios."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .infrastructure import LineTopology
from .model import RailwayUndertaking, RequestSet, Scenario, ServiceRequest


class ScenarioKind(str, enum.Enum):
    BALANCED = "balanced"
    SEMI = "semi"
    UNBALANCED = "unbalanced"

    @classmethod
    def parse(cls, value: "str | ScenarioKind") -> "ScenarioKind":
        if isinstance(value, cls):
            return value
        aliases = {"semibalanced": "semi", "semi-balanced": "semi", "semi_balanced": "semi"}
        v = str(value).lower()
        try:
            return cls(aliases.get(v, v))
        except ValueError:
            raise ValueError(
                f"unknown scenario kind {value!r}; expected one of {[k.value for k in cls]}"
            ) from None


CAPACITIES = {
    ScenarioKind.UNBALANCED: (0.55, 0.25, 0.10, 0.05, 0.05),
    ScenarioKind.SEMI: (0.30, 0.25, 0.20, 0.15, 0.10),
    ScenarioKind.BALANCED: (0.20, 0.20, 0.20, 0.20, 0.20),
}

# Requested services per undertaking, in percent of the schedulable slots.
REQUEST_SHARES = {
    ScenarioKind.BALANCED: (10, 10, 10, 10, 10),
    ScenarioKind.SEMI: (15, 12, 10, 8, 5),
    ScenarioKind.UNBALANCED: (28, 12, 5, 2, 2),
}


@dataclass(frozen=True)
class GeneratorParams:
    line_segments: int = 4
    horizon_minutes: int = 240
    slot_base: int = 100
    headway_minutes: int = 5
    max_shift_minutes: int = 60
    penalty_per_minute: float = 0.01
    segment_minutes: tuple[int, int] = (8, 16)
    # Each undertaking runs one kind of rolling stock: a single slowdown
    # factor per undertaking unless ``speed_per_ru`` is switched off.
    speed_factor: tuple[float, float] = (1.0, 1.5)
    speed_per_ru: bool = True
    revenue_range: tuple[float, float] = (50.0, 150.0)


def request_counts(kind: "str | ScenarioKind", slot_base: int = 100) -> tuple[int, ...]:
    kind = ScenarioKind.parse(kind)
    return tuple(round(p * slot_base / 100) for p in REQUEST_SHARES[kind])


def make_scenario(kind: "str | ScenarioKind", seed: int = 0,
                  params: GeneratorParams | None = None, **overrides) -> Scenario:
    """Build one market instance.

    Capacities and request counts are fixed by ``kind``; the seed only
    drives routes, speeds, desired departures and base revenues.  Keyword
    overrides are applied on top of ``params`` (e.g. ``line_segments=6``).
    """
    kind = ScenarioKind.parse(kind)
    p = params or GeneratorParams()
    if overrides:
        p = GeneratorParams(**{**p.__dict__, **overrides})
    rng = np.random.default_rng(seed)
    segs = tuple(f"s{i + 1}" for i in range(p.line_segments))
    lo, hi = p.segment_minutes
    segment_base = rng.integers(lo, hi + 1, p.line_segments)

    undertakings, request_sets = [], []
    for pos, (cap, count) in enumerate(zip(CAPACITIES[kind], request_counts(kind, p.slot_base))):
        ru_id = pos + 1
        undertakings.append(RailwayUndertaking(ru_id, cap))
        reqs = []
        ru_factor = rng.uniform(*p.speed_factor)
        for k in range(count):
            a, b = sorted(rng.choice(p.line_segments + 1, 2, replace=False).tolist())
            factor = ru_factor if p.speed_per_ru else rng.uniform(*p.speed_factor)
            travel = tuple(max(1, int(round(segment_base[j] * factor))) for j in range(a, b))
            latest = p.horizon_minutes - sum(travel)
            desired = int(rng.integers(0, max(0, latest) + 1))
            reqs.append(ServiceRequest(
                ru_id=ru_id,
                service_id=k + 1,
                route=segs[a:b],
                desired_departure=desired,
                segment_travel_times=travel,
                importance=1.0 / count,
                base_revenue=round(float(rng.uniform(*p.revenue_range)), 2),
            ))
        request_sets.append(RequestSet(ru_id, tuple(reqs)))

    return Scenario(
        undertakings=tuple(undertakings),
        request_sets=tuple(request_sets),
        line=LineTopology(segs),
        horizon_minutes=p.horizon_minutes,
        max_services=p.slot_base,
        headway_minutes=p.headway_minutes,
        max_shift_minutes=p.max_shift_minutes,
        penalty_per_minute=p.penalty_per_minute,
    )
