"""Genetic algorithm over departure choices.

A chromosome holds one integer gene per requested service, in scenario
order (undertaking by undertaking).  Gene ``-1`` leaves the service out of
the candidate timetable; gene ``g >= 0`` proposes departure
``desired - max_shift + g``.  Decoding, conflict repair and scoring are
pure, so a population can be scored in any order without touching the
RNG stream that drives selection and variation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .allocator import RepairStep, RepairTrace, greedy_repair
from .fairness import (
    FairnessConfig,
    IndexKind,
    assigned_capacity_percent,
    assigned_importance_percent,
    fairness_value,
    inequity_percent,
)
from .infrastructure import ServiceKey, conflict_matrix
from .model import Allocation, Scenario, ServiceRequest, require_valid
from .records import EpochHistory, EpochRecord, RunRecord

SKIP = -1
INIT_SKIP_PROB = 0.25


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 64
    epochs: int = 100
    crossover_prob: float = 0.95
    mutation_prob: float = 0.025
    tournament_size: int = 2
    elitism_count: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        for name in ("population_size", "epochs", "tournament_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.elitism_count <= self.population_size:
            raise ValueError("elitism_count must lie in [0, population_size]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def gene_bounds(s: Scenario) -> tuple[int, int]:
    """Inclusive gene range ``(-1, 2 * max_shift)``."""
    return SKIP, 2 * s.max_shift_minutes


def check_chromosome(s: Scenario, genes: np.ndarray) -> None:
    lo, hi = gene_bounds(s)
    if genes.shape != (s.n_requests,):
        raise ValueError(f"chromosome has shape {genes.shape}, scenario needs ({s.n_requests},)")
    if genes.size and (genes.min() < lo or genes.max() > hi):
        raise ValueError(f"genes outside [{lo}, {hi}]")


def departure_for(s: Scenario, req: ServiceRequest, gene: int) -> float:
    return req.desired_departure - s.max_shift_minutes + gene


@dataclass(frozen=True)
class Evaluation:
    fitness: float
    revenue: float
    fairness: float
    inequity: float
    importance_sums: tuple[float, ...]
    departures: Mapping[ServiceKey, float] = field(hash=False)
    trace: RepairTrace = field(hash=False, compare=False)

    @property
    def scheduled_count(self) -> int:
        return len(self.departures)


class Evaluator:
    """Scores chromosomes for one scenario and fairness configuration.

    Per-request segment offsets are precomputed so that decoding a
    chromosome and building its conflict matrix are a handful of numpy
    operations.  Results are memoised by gene content.
    """

    def __init__(self, s: Scenario, cfg: FairnessConfig) -> None:
        self.scenario = s
        self.cfg = cfg
        reqs = s.requests
        self.requests = reqs
        self.keys = [r.key for r in reqs]
        self.ru_ids = [u.id for u in s.undertakings]
        self.ru_pos = np.array([s.ru_position(r.ru_id) for r in reqs], dtype=np.int64)
        self.weights = np.array([r.importance for r in reqs], dtype=float)
        self.service_ids = np.array([r.service_id for r in reqs], dtype=np.int64)
        self.desired = np.array([r.desired_departure for r in reqs], dtype=float)
        self.base = np.array([r.base_revenue for r in reqs], dtype=float)
        self.running = np.array([r.running_time for r in reqs], dtype=float)
        n_seg = len(s.line.segment_ids)
        self.enter_off = np.full((len(reqs), n_seg), np.nan)
        self.exit_off = np.full((len(reqs), n_seg), np.nan)
        for k, r in enumerate(reqs):
            t = 0.0
            for seg, dt in zip(r.route, r.segment_travel_times):
                j = s.line.index(seg)
                if not np.isnan(self.enter_off[k, j]):
                    raise ValueError(f"service {r.key} uses segment {seg!r} twice")
                self.enter_off[k, j] = t
                self.exit_off[k, j] = t + dt
                t += dt
        self._cache: dict[bytes, Evaluation] = {}

    def decode(self, genes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Candidate request indices and their departures; skipped genes and
        paths leaving the horizon are dropped."""
        dep = self.desired - self.scenario.max_shift_minutes + genes
        ok = (genes >= 0) & (dep >= 0) & (dep + self.running <= self.scenario.horizon_minutes)
        idx = np.flatnonzero(ok)
        return idx, dep[idx]

    def __call__(self, genes: np.ndarray) -> Evaluation:
        key = genes.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._evaluate(genes)
        return hit

    def _evaluate(self, genes: np.ndarray) -> Evaluation:
        s, cfg = self.scenario, self.cfg
        idx, dep = self.decode(genes)
        m = conflict_matrix(self.enter_off[idx] + dep[:, None],
                            self.exit_off[idx] + dep[:, None], s.headway_minutes)
        neighbours: list[set[int]] = [set() for _ in range(len(idx))]
        rows, cols = np.nonzero(m)
        for a, b in zip(rows.tolist(), cols.tolist()):
            neighbours[a].add(b)
        weights = self.weights[idx].tolist()
        free, steps = greedy_repair(
            self.ru_pos[idx].tolist(), weights, self.service_ids[idx].tolist(),
            neighbours, self.ru_ids, cfg,
        )
        chosen = sorted(free + [c for _, c, _ in steps])
        granted: list[list[float]] = [[] for _ in self.ru_ids]
        for c in chosen:
            granted[self.ru_pos[idx[c]]].append(weights[c])
        sums = [min(1.0, math.fsum(g)) for g in granted]
        deviation = np.abs(dep - self.desired[idx])
        per_service = self.base[idx] * np.maximum(0.0, 1.0 - s.penalty_per_minute * deviation)
        rev = math.fsum(per_service[chosen].tolist())
        fair = fairness_value(sums, cfg, cfg.repair_kind)
        fit = rev if cfg.index_kind is IndexKind.REVENUE else rev * fair
        keys = [self.keys[i] for i in idx]
        trace = RepairTrace(
            tuple(keys[i] for i in free),
            tuple(RepairStep(self.ru_ids[p], keys[c], tuple(keys[d] for d in dropped))
                  for p, c, dropped in steps),
        )
        return Evaluation(
            fitness=fit,
            revenue=rev,
            fairness=fair,
            inequity=inequity_percent(sums) if len(sums) >= 2 else 0.0,
            importance_sums=tuple(sums),
            departures={keys[c]: float(dep[c]) for c in chosen},
            trace=trace,
        )


def evaluate(s: Scenario, genes: np.ndarray,
             cfg: FairnessConfig) -> tuple[float, Allocation, Evaluation]:
    genes = np.asarray(genes, dtype=np.int64)
    check_chromosome(s, genes)
    ev = Evaluator(s, cfg)(genes)
    return ev.fitness, Allocation.from_departures(s, ev.departures), ev


def random_population(rng: np.random.Generator, size: int, n_genes: int, hi: int) -> np.ndarray:
    pop = np.empty((size, n_genes), dtype=np.int64)
    for i in range(size):
        skip = rng.random(n_genes) < INIT_SKIP_PROB
        vals = rng.integers(0, hi + 1, n_genes)
        pop[i] = np.where(skip, SKIP, vals)
    return pop


def tournament(rng: np.random.Generator, fitness: np.ndarray, k: int) -> int:
    contenders = rng.integers(0, len(fitness), k)
    return int(contenders[np.argmax(fitness[contenders])])


def mutate(rng: np.random.Generator, genes: np.ndarray, prob: float, hi: int) -> None:
    hit = rng.random(genes.size) < prob
    n = int(hit.sum())
    if n:
        genes[hit] = rng.integers(SKIP, hi + 1, n)


def next_generation(rng: np.random.Generator, pop: np.ndarray, fitness: np.ndarray,
                    ga: GaConfig, hi: int) -> np.ndarray:
    """Elites first, then tournament-selected pairs with single-point
    crossover and per-gene uniform-reset mutation."""
    size, n_genes = pop.shape
    order = np.argsort(-fitness, kind="stable")
    children = [pop[i].copy() for i in order[:ga.elitism_count]]
    while len(children) < size:
        a = pop[tournament(rng, fitness, ga.tournament_size)]
        b = pop[tournament(rng, fitness, ga.tournament_size)]
        if n_genes > 1 and rng.random() < ga.crossover_prob:
            cut = int(rng.integers(1, n_genes))
            c1 = np.concatenate([a[:cut], b[cut:]])
            c2 = np.concatenate([b[:cut], a[cut:]])
        else:
            c1, c2 = a.copy(), b.copy()
        for child in (c1, c2):
            mutate(rng, child, ga.mutation_prob, hi)
            if len(children) < size:
                children.append(child)
    return np.stack(children)


class RunResult(NamedTuple):
    allocation: Allocation
    history: EpochHistory
    record: RunRecord
    chromosome: np.ndarray
    evaluation: Evaluation


def make_record(s: Scenario, cfg: FairnessConfig, ev: Evaluation,
                run_number: int, seed: int) -> RunRecord:
    sums = list(ev.importance_sums)
    return RunRecord(
        index_kind=cfg.index_kind.value,
        alpha=cfg.alpha,
        run_number=run_number,
        seed=seed,
        inequity_percent=ev.inequity,
        revenue=ev.revenue,
        scheduled_train_count=ev.scheduled_count,
        importance_percents=tuple(100.0 * v for v in sums),
        assigned_importance_percent=assigned_importance_percent(sums),
        assigned_capacity_percent=assigned_capacity_percent(sums, s.capacities),
    )


def run(s: Scenario, ga: GaConfig, cfg: FairnessConfig, run_number: int = 1,
        on_epoch: Callable[[EpochRecord], None] | None = None) -> RunResult:
    """Evolve ``ga.epochs`` generations and return the best individual found.

    Each epoch scores the current population, logs its best member, then
    breeds the next generation (except after the last epoch).  Everything
    is driven by one ``numpy`` generator seeded with ``ga.seed``.
    """
    require_valid(s)
    rng = np.random.default_rng(ga.seed)
    _, hi = gene_bounds(s)
    evaluator = Evaluator(s, cfg)
    pop = random_population(rng, ga.population_size, s.n_requests, hi)
    records = []
    best_genes, best_eval = None, None
    for epoch in range(ga.epochs):
        evals = [evaluator(ind) for ind in pop]
        fit = np.array([e.fitness for e in evals])
        i = int(np.argmax(fit))
        if best_eval is None or fit[i] > best_eval.fitness:
            best_genes, best_eval = pop[i].copy(), evals[i]
        rec = EpochRecord(epoch + 1, evals[i].fitness, evals[i].revenue,
                          evals[i].fairness, evals[i].inequity)
        records.append(rec)
        if on_epoch is not None:
            on_epoch(rec)
        if epoch + 1 < ga.epochs:
            pop = next_generation(rng, pop, fit, ga, hi)
    assert best_genes is not None and best_eval is not None
    allocation = Allocation.from_departures(s, best_eval.departures)
    return RunResult(
        allocation,
        EpochHistory(tuple(records)),
        make_record(s, cfg, best_eval, run_number, ga.seed),
        best_genes,
        best_eval,
    )
