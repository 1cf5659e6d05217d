"""Equity-greedy conflict repair, IM revenue, and the revenue x fairness objective."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .fairness import FairnessConfig, IndexKind, fairness_value
from .infrastructure import ServiceKey, build_conflict_graph
from .model import Allocation, Scenario, ServiceRequest, granted_importance_sums


@dataclass(frozen=True)
class RepairStep:
    most_affected_ru: int
    chosen: ServiceKey
    discarded: tuple[ServiceKey, ...]


@dataclass(frozen=True)
class RepairTrace:
    scheduled_without_conflict: tuple[ServiceKey, ...]
    iterations: tuple[RepairStep, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "scheduled_without_conflict": [list(k) for k in self.scheduled_without_conflict],
            "iterations": [
                {
                    "most_affected_ru": st.most_affected_ru,
                    "chosen": list(st.chosen),
                    "discarded": [list(k) for k in st.discarded],
                }
                for st in self.iterations
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "RepairTrace":
        return cls(
            tuple(tuple(k) for k in doc["scheduled_without_conflict"]),
            tuple(
                RepairStep(st["most_affected_ru"], tuple(st["chosen"]),
                           tuple(tuple(k) for k in st["discarded"]))
                for st in doc["iterations"]
            ),
        )


def greedy_repair(
    ru_pos: Sequence[int],
    weights: Sequence[float],
    service_ids: Sequence[int],
    neighbours: Sequence[set[int]],
    ru_ids: Sequence[int],
    cfg: FairnessConfig,
) -> tuple[list[int], list[tuple[int, int, list[int]]]]:
    """Core of the repair on index-based inputs.

    Candidate ``i`` belongs to undertaking position ``ru_pos[i]``.  Returns
    the conflict-free candidate indices and one ``(ru_position, chosen,
    discarded)`` tuple per loop iteration.
    """
    n = len(ru_pos)
    sums = [0.0] * len(ru_ids)
    free = [i for i in range(n) if not neighbours[i]]
    for i in free:
        sums[ru_pos[i]] += weights[i]
    pending = {i for i in range(n) if neighbours[i]}
    kind = cfg.repair_kind
    steps = []
    while pending:
        owners = {ru_pos[i] for i in pending}
        affected = min(owners, key=lambda p: (sums[p], ru_ids[p]))
        scored: dict[float, float] = {}
        best, best_key = -1, None
        for i in pending:
            if ru_pos[i] != affected:
                continue
            w = weights[i]
            if w not in scored:
                trial = list(sums)
                trial[affected] += w
                scored[w] = fairness_value(trial, cfg, kind)
            key = (scored[w], w, -service_ids[i])
            if best_key is None or key > best_key:
                best, best_key = i, key
        pending.discard(best)
        dropped = sorted(pending & neighbours[best])
        pending.difference_update(dropped)
        sums[affected] += weights[best]
        steps.append((affected, best, dropped))
    return free, steps


def resolve_conflicts(
    s: Scenario,
    candidates: Sequence[tuple[ServiceRequest, float]],
    fairness: FairnessConfig,
) -> tuple[Allocation, RepairTrace]:
    """Turn a candidate timetable into a conflict-free allocation.

    Conflict-free candidates are kept as they are.  The rest are settled one
    at a time: the undertaking with the lowest granted importance so far
    gets whichever of its pending services scores best on the fairness
    index, and everything conflicting with that service is dropped.
    """
    graph = build_conflict_graph(candidates, s.headway_minutes, s.horizon_minutes)
    neighbours = graph.neighbours()
    ru_ids = [u.id for u in s.undertakings]
    ru_pos = [s.ru_position(req.ru_id) for req, _ in candidates]
    free, steps = greedy_repair(
        ru_pos,
        [req.importance for req, _ in candidates],
        [req.service_id for req, _ in candidates],
        neighbours,
        ru_ids,
        fairness,
    )
    keys = [req.key for req, _ in candidates]
    chosen = list(free) + [c for _, c, _ in steps]
    departures = {keys[i]: float(candidates[i][1]) for i in chosen}
    trace = RepairTrace(
        tuple(keys[i] for i in free),
        tuple(RepairStep(ru_ids[p], keys[c], tuple(keys[d] for d in dropped))
              for p, c, dropped in steps),
    )
    return Allocation.from_departures(s, departures), trace


def service_revenue(req: ServiceRequest, departure: float, penalty_per_minute: float) -> float:
    deviation = abs(departure - req.desired_departure)
    return req.base_revenue * max(0.0, 1.0 - penalty_per_minute * deviation)


def revenue(s: Scenario, a: Allocation) -> float:
    """IM revenue: base revenue of each scheduled service, less a linear
    deviation penalty proportional to that base revenue and floored at zero."""
    return math.fsum(
        service_revenue(req, dep, s.penalty_per_minute) for req, dep in a.scheduled(s)
    )


def fitness(s: Scenario, a: Allocation, cfg: FairnessConfig) -> float:
    rev = revenue(s, a)
    if cfg.index_kind is IndexKind.REVENUE:
        return rev
    return rev * fairness_value(granted_importance_sums(s, a), cfg)
