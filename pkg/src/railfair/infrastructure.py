"""Single-line infrastructure: segment occupancy and pairwise conflicts.

All services run the same direction along an ordered list of segments.  Two
services conflict when, on some segment they both use, their entry times are
closer than the headway or their occupancy windows overlap.  Entries exactly
one headway apart do not conflict.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .model import ServiceRequest

ServiceKey = tuple[int, int]  # (ru_id, service_id)


class HorizonExceeded(ValueError):
    """A service's path does not fit in the planning horizon."""


@dataclass(frozen=True)
class LineTopology:
    segment_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "segment_ids", tuple(self.segment_ids))

    @property
    def station_count(self) -> int:
        return len(self.segment_ids) + 1

    def index(self, segment_id: str) -> int:
        return self.segment_ids.index(segment_id)


@dataclass(frozen=True)
class OccupancyWindow:
    segment_id: str
    enter_minute: float
    exit_minute: float
    service: ServiceKey


@dataclass(frozen=True)
class ConflictGraph:
    """Candidate services and the unordered pairs of them that conflict.

    ``nodes[i]`` is ``(service_key, departure)``; edges are index pairs
    ``(i, j)`` with ``i < j``.
    """

    nodes: tuple[tuple[ServiceKey, float], ...]
    edges: frozenset[tuple[int, int]]

    def neighbours(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in self.nodes]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    @property
    def is_conflict_free(self) -> bool:
        return not self.edges


def occupancy(req: "ServiceRequest", departure: float,
              horizon: float | None = None) -> list[OccupancyWindow]:
    """Occupancy windows of ``req`` when it leaves at ``departure``.

    Raises:
        HorizonExceeded: if any window falls outside ``[0, horizon]``.
    """
    if not req.route:
        raise ValueError(f"service {req.key} has an empty route")
    if departure < 0 or (horizon is not None and departure > horizon):
        raise HorizonExceeded(f"service {req.key} departs at {departure}, outside the horizon")
    windows = []
    t = departure
    for seg, dt in zip(req.route, req.segment_travel_times):
        windows.append(OccupancyWindow(seg, t, t + dt, req.key))
        t += dt
    if horizon is not None and t > horizon:
        raise HorizonExceeded(
            f"service {req.key} leaving at {departure} ends at {t}, beyond horizon {horizon}"
        )
    return windows


def windows_conflict(a: OccupancyWindow, b: OccupancyWindow, headway: float) -> bool:
    if a.segment_id != b.segment_id:
        return False
    return (abs(a.enter_minute - b.enter_minute) < headway
            or (a.enter_minute < b.exit_minute and b.enter_minute < a.exit_minute))


def build_conflict_graph(candidates: Sequence[tuple["ServiceRequest", float]],
                         headway: float, horizon: float | None = None) -> ConflictGraph:
    occ = [occupancy(req, dep, horizon) for req, dep in candidates]
    edges = set()
    for i, j in itertools.combinations(range(len(candidates)), 2):
        if any(windows_conflict(a, b, headway) for a in occ[i] for b in occ[j]):
            edges.add((i, j))
    nodes = tuple((req.key, float(dep)) for req, dep in candidates)
    return ConflictGraph(nodes, frozenset(edges))


def is_conflict_free(scheduled: Iterable[tuple["ServiceRequest", float]], headway: float) -> bool:
    return build_conflict_graph(list(scheduled), headway).is_conflict_free


def conflict_matrix(enter: np.ndarray, exit_: np.ndarray, headway: float) -> np.ndarray:
    """Vectorised conflict test.

    Args:
        enter: ``(n, segments)`` entry minutes, NaN where a service does not
            use the segment.
        exit_: same shape, exit minutes.
        headway: minimum entry separation.

    Returns:
        Symmetric boolean ``(n, n)`` matrix with a False diagonal.
    """
    n = enter.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=bool)
    used = ~np.isnan(enter)
    e = np.where(used, enter, 0.0)
    x = np.where(used, exit_, 0.0)
    shared = used[:, None, :] & used[None, :, :]
    close = np.abs(e[:, None, :] - e[None, :, :]) < headway
    overlap = (e[:, None, :] < x[None, :, :]) & (e[None, :, :] < x[:, None, :])
    m = (shared & (close | overlap)).any(axis=2)
    np.fill_diagonal(m, False)
    return m
