import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from railfair.infrastructure import (
    HorizonExceeded,
    build_conflict_graph,
    conflict_matrix,
    is_conflict_free,
    occupancy,
)

from conftest import make_request
from oracles import conflict_pairs_brute

SEGS = ("s1", "s2", "s3")


def test_occupancy_cumulative_windows():
    r = make_request(1, 1, ["s1", "s2"], 0, [10, 15], 1.0)
    w = occupancy(r, 100, horizon=1000)
    assert [(x.segment_id, x.enter_minute, x.exit_minute) for x in w] == [
        ("s1", 100, 110),
        ("s2", 110, 125),
    ]
    assert all(x.service == (1, 1) for x in w)


def test_occupancy_beyond_horizon():
    r = make_request(1, 1, ["s1"], 0, [30], 1.0)
    with pytest.raises(HorizonExceeded):
        occupancy(r, 240 - 10, horizon=240)
    with pytest.raises(HorizonExceeded):
        occupancy(r, -1, horizon=240)


def test_occupancy_empty_route():
    r = make_request(1, 1, [], 0, [], 1.0)
    with pytest.raises(ValueError):
        occupancy(r, 0)


def test_identical_access_conflicts():
    a = make_request(1, 1, ["s1"], 0, [3], 1.0)
    b = make_request(2, 1, ["s1"], 0, [3], 1.0)
    g = build_conflict_graph([(a, 100), (b, 100)], headway=5)
    assert g.edges == {(0, 1)}


def test_headway_boundary_is_exclusive():
    a = make_request(1, 1, ["s1"], 0, [3], 1.0)
    b = make_request(2, 1, ["s1"], 0, [3], 1.0)
    assert build_conflict_graph([(a, 100), (b, 105)], headway=5).edges == frozenset()
    assert build_conflict_graph([(a, 100), (b, 104)], headway=5).edges == {(0, 1)}


def test_overlap_without_close_entry_conflicts():
    slow = make_request(1, 1, ["s1"], 0, [30], 1.0)
    fast = make_request(2, 1, ["s1"], 0, [5], 1.0)
    assert build_conflict_graph([(slow, 0), (fast, 10)], headway=5).edges == {(0, 1)}


def test_disjoint_segments_never_conflict():
    a = make_request(1, 1, ["s1"], 0, [10], 1.0)
    b = make_request(2, 1, ["s2"], 0, [10], 1.0)
    assert is_conflict_free([(a, 0), (b, 0)], headway=5)


def random_candidates(rng, n, horizon=200):
    out = []
    for k in range(n):
        a, b = sorted(rng.choice(len(SEGS) + 1, 2, replace=False))
        travel = rng.integers(3, 15, b - a).tolist()
        dep = int(rng.integers(0, horizon - sum(travel)))
        out.append((make_request(1 + k % 3, k + 1, SEGS[a:b], dep, travel, 0.1), dep))
    return out


def matrix_edges(cands, headway):
    enter = np.full((len(cands), len(SEGS)), np.nan)
    exit_ = np.full_like(enter, np.nan)
    for i, (r, dep) in enumerate(cands):
        for w in occupancy(r, dep):
            j = SEGS.index(w.segment_id)
            enter[i, j], exit_[i, j] = w.enter_minute, w.exit_minute
    m = conflict_matrix(enter, exit_, headway)
    assert (m == m.T).all() and not m.diagonal().any()
    return {(i, j) for i, j in zip(*np.nonzero(m)) if i < j}


@pytest.mark.parametrize("seed", range(200))
def test_graph_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    cands = random_candidates(rng, 6)
    expected = conflict_pairs_brute(cands, 5)
    assert set(build_conflict_graph(cands, 5).edges) == expected
    assert matrix_edges(cands, 5) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(-50, 50))
def test_time_translation_invariance(seed, delta):
    rng = np.random.default_rng(seed)
    cands = random_candidates(rng, 8, horizon=150)
    shifted = [(r, dep + delta + 100) for r, dep in cands]
    base = [(r, dep + 100) for r, dep in cands]
    assert build_conflict_graph(shifted, 5).edges == build_conflict_graph(base, 5).edges


def test_graph_is_deterministic_and_irreflexive():
    rng = np.random.default_rng(11)
    cands = random_candidates(rng, 10)
    g1, g2 = build_conflict_graph(cands, 5), build_conflict_graph(cands, 5)
    assert g1 == g2
    assert all(i < j for i, j in g1.edges)
    nb = g1.neighbours()
    for i, js in enumerate(nb):
        assert i not in js
        for j in js:
            assert i in nb[j]
