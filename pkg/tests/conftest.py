from __future__ import annotations

import numpy as np
import pytest

from railfair.infrastructure import LineTopology
from railfair.model import (
    Allocation,
    RailwayUndertaking,
    RequestSet,
    Scenario,
    ServiceRequest,
)


def make_request(ru_id, service_id, route, departure, travel, importance, revenue=100.0):
    return ServiceRequest(
        ru_id=ru_id,
        service_id=service_id,
        route=tuple(route),
        desired_departure=departure,
        segment_travel_times=tuple(travel),
        importance=importance,
        base_revenue=revenue,
    )


def two_ru_scenario() -> Scenario:
    """Two undertakings with capacities 3/7 and 4/7 and seven slots."""
    r1 = [make_request(1, k + 1, ["s1", "s2"], 30 * k, [10, 10], w)
          for k, w in enumerate([0.2, 0.3, 0.5])]
    r2 = [make_request(2, k + 1, ["s2"], 25 + 30 * k, [12], w)
          for k, w in enumerate([0.45, 0.25, 0.2, 0.1])]
    return Scenario(
        undertakings=(RailwayUndertaking(1, 3 / 7), RailwayUndertaking(2, 4 / 7)),
        request_sets=(RequestSet(1, tuple(r1)), RequestSet(2, tuple(r2))),
        line=LineTopology(("s1", "s2")),
        horizon_minutes=240,
        max_services=7,
        headway_minutes=5,
        max_shift_minutes=10,
        penalty_per_minute=0.01,
    )


@pytest.fixture
def example_scenario() -> Scenario:
    return two_ru_scenario()


@pytest.fixture
def example_allocation(example_scenario) -> Allocation:
    granted = ((True, False, True), (True, True, True, False))
    deps = {}
    for rs, bits in zip(example_scenario.request_sets, granted):
        for r, b in zip(rs.requests, bits):
            if b:
                deps[r.key] = r.desired_departure
    return Allocation(granted, deps)


def random_instance(rng, max_services=10, max_rus=4, segments=("s1", "s2", "s3"), horizon=120):
    """Small random scenario plus a candidate timetable at the desired times.

    Departures are packed into a short window so that conflicts are common.
    """
    n_rus = int(rng.integers(2, max_rus + 1))
    counts = [1] * n_rus
    for _ in range(int(rng.integers(n_rus, max_services + 1)) - n_rus):
        counts[int(rng.integers(n_rus))] += 1
    undertakings, sets, cands = [], [], []
    for pos, count in enumerate(counts):
        ru = pos + 1
        undertakings.append(RailwayUndertaking(ru, 1.0 / n_rus))
        w = rng.dirichlet(np.ones(count))
        w[-1] = 1.0 - w[:-1].sum()
        reqs = []
        for k in range(count):
            a, b = sorted(rng.choice(len(segments) + 1, 2, replace=False).tolist())
            travel = rng.integers(3, 12, b - a).tolist()
            dep = int(rng.integers(0, 40))
            reqs.append(make_request(ru, k + 1, segments[a:b], dep, travel, float(w[k]),
                                     float(rng.uniform(50, 150))))
        sets.append(RequestSet(ru, tuple(reqs)))
        cands.extend((r, r.desired_departure) for r in reqs if rng.random() < 0.85)
    s = Scenario(
        undertakings=tuple(undertakings),
        request_sets=tuple(sets),
        line=LineTopology(tuple(segments)),
        horizon_minutes=horizon,
        max_services=max_services,
        headway_minutes=5,
        max_shift_minutes=5,
        penalty_per_minute=0.01,
    )
    return s, cands


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
