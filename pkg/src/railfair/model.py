"""Problem instance data model: undertakings, requests, scenarios, allocations."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .infrastructure import LineTopology, ServiceKey

SCENARIO_FORMAT = "railfair.scenario/1"

# Requests may exceed what the line can carry; beyond this multiple of
# max_services the instance is almost certainly malformed.
MAX_REQUEST_MULTIPLE = 10
IMPORTANCE_TOL = 1e-9


@dataclass(frozen=True)
class RailwayUndertaking:
    id: int
    framework_capacity: float


@dataclass(frozen=True)
class ServiceRequest:
    ru_id: int
    service_id: int
    route: tuple[str, ...]
    desired_departure: float
    segment_travel_times: tuple[float, ...]
    importance: float
    base_revenue: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "route", tuple(self.route))
        object.__setattr__(self, "segment_travel_times", tuple(self.segment_travel_times))

    @property
    def key(self) -> ServiceKey:
        return (self.ru_id, self.service_id)

    @property
    def running_time(self) -> float:
        return sum(self.segment_travel_times)


@dataclass(frozen=True)
class RequestSet:
    ru_id: int
    requests: tuple[ServiceRequest, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "requests", tuple(self.requests))

    def __len__(self) -> int:
        return len(self.requests)


@dataclass(frozen=True)
class Scenario:
    undertakings: tuple[RailwayUndertaking, ...]
    request_sets: tuple[RequestSet, ...]
    line: LineTopology
    horizon_minutes: int
    max_services: int
    headway_minutes: int = 5
    max_shift_minutes: int = 60
    # Fraction of a service's base revenue lost per minute of deviation.
    penalty_per_minute: float = 0.01

    def __post_init__(self) -> None:
        object.__setattr__(self, "undertakings", tuple(self.undertakings))
        object.__setattr__(self, "request_sets", tuple(self.request_sets))

    @property
    def n_undertakings(self) -> int:
        return len(self.undertakings)

    @property
    def capacities(self) -> tuple[float, ...]:
        return tuple(u.framework_capacity for u in self.undertakings)

    @property
    def requests(self) -> tuple[ServiceRequest, ...]:
        """All requests, undertaking by undertaking, in request-set order."""
        return tuple(r for rs in self.request_sets for r in rs.requests)

    @property
    def n_requests(self) -> int:
        return sum(len(rs) for rs in self.request_sets)

    def ru_position(self, ru_id: int) -> int:
        for pos, u in enumerate(self.undertakings):
            if u.id == ru_id:
                return pos
        raise KeyError(f"no undertaking with id {ru_id}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": SCENARIO_FORMAT,
            "undertakings": [
                {"id": u.id, "framework_capacity": u.framework_capacity} for u in self.undertakings
            ],
            "request_sets": [
                {
                    "ru_id": rs.ru_id,
                    "requests": [
                        {
                            "ru_id": r.ru_id,
                            "service_id": r.service_id,
                            "route": list(r.route),
                            "desired_departure": r.desired_departure,
                            "segment_travel_times": list(r.segment_travel_times),
                            "importance": r.importance,
                            "base_revenue": r.base_revenue,
                        }
                        for r in rs.requests
                    ],
                }
                for rs in self.request_sets
            ],
            "line": {"segment_ids": list(self.line.segment_ids)},
            "horizon_minutes": self.horizon_minutes,
            "max_services": self.max_services,
            "headway_minutes": self.headway_minutes,
            "max_shift_minutes": self.max_shift_minutes,
            "penalty_per_minute": self.penalty_per_minute,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Scenario":
        fmt = doc.get("format", SCENARIO_FORMAT)
        if fmt != SCENARIO_FORMAT:
            raise ValueError(f"unsupported scenario format {fmt!r}")
        return cls(
            undertakings=tuple(
                RailwayUndertaking(int(u["id"]), float(u["framework_capacity"]))
                for u in doc["undertakings"]
            ),
            request_sets=tuple(
                RequestSet(int(rs["ru_id"]), tuple(ServiceRequest(**r) for r in rs["requests"]))
                for rs in doc["request_sets"]
            ),
            line=LineTopology(tuple(doc["line"]["segment_ids"])),
            horizon_minutes=doc["horizon_minutes"],
            max_services=doc["max_services"],
            headway_minutes=doc["headway_minutes"],
            max_shift_minutes=doc["max_shift_minutes"],
            penalty_per_minute=doc["penalty_per_minute"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.dumps(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class Allocation:
    """Which requests were granted, and when each granted service departs.

    ``granted[pos]`` is the bit vector for ``scenario.undertakings[pos]``.
    """

    granted: tuple[tuple[bool, ...], ...]
    departures: Mapping[ServiceKey, float] = field(default_factory=dict, hash=False)

    @classmethod
    def empty(cls, s: Scenario) -> "Allocation":
        return cls(tuple((False,) * len(rs) for rs in s.request_sets), {})

    @classmethod
    def from_departures(cls, s: Scenario, departures: Mapping[ServiceKey, float]) -> "Allocation":
        granted = tuple(tuple(r.key in departures for r in rs.requests) for rs in s.request_sets)
        return cls(granted, dict(departures))

    @property
    def scheduled_count(self) -> int:
        return sum(sum(g) for g in self.granted)

    def scheduled(self, s: Scenario) -> list[tuple[ServiceRequest, float]]:
        return [
            (r, self.departures[r.key])
            for rs, bits in zip(s.request_sets, self.granted)
            for r, bit in zip(rs.requests, bits)
            if bit
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "granted": [[int(b) for b in bits] for bits in self.granted],
            "departures": [
                {"ru_id": k[0], "service_id": k[1], "departure": d}
                for k, d in sorted(self.departures.items())
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Allocation":
        return cls(
            tuple(tuple(bool(b) for b in bits) for bits in doc["granted"]),
            {(d["ru_id"], d["service_id"]): d["departure"] for d in doc["departures"]},
        )


def validate_scenario(s: Scenario) -> list[str]:
    """List every broken invariant of ``s``; an empty list means valid."""
    problems: list[str] = []
    segs = s.line.segment_ids
    if not segs:
        problems.append("line.segment_ids: at least one segment required")
    if len(set(segs)) != len(segs):
        problems.append(f"line.segment_ids: duplicate ids in {list(segs)}")
    for name in ("horizon_minutes", "max_services", "headway_minutes"):
        v = getattr(s, name)
        if not (isinstance(v, int) and v > 0):
            problems.append(f"{name}: must be a positive integer, got {v!r}")
    if not (isinstance(s.max_shift_minutes, int) and s.max_shift_minutes >= 0):
        problems.append(f"max_shift_minutes: must be a non-negative integer, got {s.max_shift_minutes!r}")
    if not s.penalty_per_minute >= 0:
        problems.append(f"penalty_per_minute: must be non-negative, got {s.penalty_per_minute!r}")

    ids = [u.id for u in s.undertakings]
    if not ids:
        problems.append("undertakings: at least one undertaking required")
    if len(set(ids)) != len(ids):
        problems.append(f"undertakings.id: duplicate ids in {ids}")
    for u in s.undertakings:
        if not 0 < u.framework_capacity <= 1:
            problems.append(f"RU{u.id}.framework_capacity: {u.framework_capacity} not in (0, 1]")
    total_cap = math.fsum(u.framework_capacity for u in s.undertakings)
    if total_cap > 1 + 1e-9:
        problems.append(f"undertakings.framework_capacity: sum {total_cap} exceeds 1")

    set_ids = [rs.ru_id for rs in s.request_sets]
    if set_ids != ids:
        problems.append(f"request_sets: ru_ids {set_ids} do not match undertakings {ids}")
    known = set(segs)
    for rs in s.request_sets:
        sids = [r.service_id for r in rs.requests]
        if len(set(sids)) != len(sids):
            problems.append(f"RU{rs.ru_id}.service_id: duplicate ids in {sids}")
        total_w = math.fsum(r.importance for r in rs.requests)
        if abs(total_w - 1.0) > IMPORTANCE_TOL:
            problems.append(f"RU{rs.ru_id}.importance: weights sum to {total_w}, expected 1")
        for r in rs.requests:
            where = f"RU{rs.ru_id}.request[{r.service_id}]"
            if r.ru_id != rs.ru_id:
                problems.append(f"{where}.ru_id: {r.ru_id} inside request set of RU{rs.ru_id}")
            if not r.route:
                problems.append(f"{where}.route: empty")
            unknown = [seg for seg in r.route if seg not in known]
            if unknown:
                problems.append(f"{where}.route: unknown segments {unknown}")
            if len(r.segment_travel_times) != len(r.route):
                problems.append(
                    f"{where}.segment_travel_times: {len(r.segment_travel_times)} entries "
                    f"for {len(r.route)} segments"
                )
            if any(not t > 0 for t in r.segment_travel_times):
                problems.append(f"{where}.segment_travel_times: non-positive entry in {list(r.segment_travel_times)}")
            if not 0 <= r.desired_departure <= s.horizon_minutes:
                problems.append(f"{where}.desired_departure: {r.desired_departure} outside [0, {s.horizon_minutes}]")
            if not 0 <= r.importance <= 1:
                problems.append(f"{where}.importance: {r.importance} not in [0, 1]")
            if not r.base_revenue >= 0:
                problems.append(f"{where}.base_revenue: negative value {r.base_revenue}")
    if isinstance(s.max_services, int) and s.max_services > 0:
        if s.n_requests > MAX_REQUEST_MULTIPLE * s.max_services:
            problems.append(
                f"request_sets: {s.n_requests} requests exceed {MAX_REQUEST_MULTIPLE} x max_services"
            )
    return problems


class InvalidScenario(ValueError):
    def __init__(self, problems: Sequence[str]) -> None:
        super().__init__("invalid scenario:\n  " + "\n  ".join(problems))
        self.problems = list(problems)


def require_valid(s: Scenario) -> None:
    problems = validate_scenario(s)
    if problems:
        raise InvalidScenario(problems)


def granted_importance_sums(s: Scenario, a: Allocation) -> list[float]:
    """Per-undertaking sum of importance over granted requests."""
    if len(a.granted) != len(s.request_sets):
        raise ValueError(f"allocation covers {len(a.granted)} undertakings, scenario has {len(s.request_sets)}")
    sums = []
    for rs, bits in zip(s.request_sets, a.granted):
        if len(bits) != len(rs):
            raise ValueError(f"RU{rs.ru_id}: {len(bits)} grant bits for {len(rs)} requests")
        total = math.fsum(r.importance for r, b in zip(rs.requests, bits) if b)
        sums.append(min(1.0, total))
    return sums
