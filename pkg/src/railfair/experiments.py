"""Multi-run studies: alpha sweeps and scenario x index comparisons."""
from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .fairness import DEFAULT_ALPHA, FairnessConfig, IndexKind
from .ga import GaConfig, RunResult, run
from .model import Scenario, require_valid
from .records import RunRecord
from .scenarios import ScenarioKind, make_scenario

STUDY_ALPHAS = (1.0, 5.0, 10.0, 25.0, 50.0)
ALL_INDICES = (IndexKind.JAIN, IndexKind.GINI, IndexKind.ATKINSON, IndexKind.REVENUE)
ALL_KINDS = (ScenarioKind.BALANCED, ScenarioKind.SEMI, ScenarioKind.UNBALANCED)


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    vals = list(values)
    if not vals:
        raise ValueError("no values")
    return statistics.fmean(vals), statistics.stdev(vals) if len(vals) > 1 else 0.0


def _job(args: tuple[Scenario, GaConfig, FairnessConfig, int]) -> RunResult:
    s, ga, cfg, run_number = args
    return run(s, ga, cfg, run_number=run_number)


def run_many(s: Scenario, cfg: FairnessConfig, ga: GaConfig, runs: int,
             base_seed: int = 0, workers: int = 1) -> list[RunResult]:
    """``runs`` independent GA runs seeded ``base_seed + run_index``.

    Results come back in run order whatever ``workers`` is.
    """
    require_valid(s)
    jobs = [(s, replace(ga, seed=base_seed + r), cfg, r + 1) for r in range(runs)]
    return run_jobs(jobs, workers)


def run_jobs(jobs: Sequence[tuple[Scenario, GaConfig, FairnessConfig, int]],
             workers: int = 1) -> list[RunResult]:
    if workers <= 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs))


@dataclass(frozen=True)
class SeriesPoint:
    epoch: int
    mean: float
    std: float


def inequity_series(results: Sequence[RunResult]) -> list[SeriesPoint]:
    """Per-epoch mean and spread of the best individual's inequity across runs."""
    columns = [r.history.column("best_inequity") for r in results]
    return [SeriesPoint(e + 1, *mean_std([c[e] for c in columns]))
            for e in range(min(len(c) for c in columns))]


@dataclass(frozen=True)
class AlphaRow:
    index_kind: str
    alpha: float
    runs: int
    inequity_mean: float
    inequity_std: float


@dataclass(frozen=True)
class AlphaStudy:
    rows: tuple[AlphaRow, ...]
    records: tuple[RunRecord, ...]
    series: dict[float, list[SeriesPoint]]


def alpha_study(s: Scenario, index: "str | IndexKind", alphas: Iterable[float] = STUDY_ALPHAS,
                runs: int = 5, base_seed: int = 0, ga: GaConfig | None = None,
                epsilon: float = 0.5, workers: int = 1) -> AlphaStudy:
    ga = ga or GaConfig()
    alphas = [float(a) for a in alphas]
    jobs = [(s, replace(ga, seed=base_seed + r), FairnessConfig.for_index(index, a, epsilon), r + 1)
            for a in alphas for r in range(runs)]
    results = run_jobs(jobs, workers)
    rows, records, series = [], [], {}
    for k, a in enumerate(alphas):
        chunk = results[k * runs:(k + 1) * runs]
        m, sd = mean_std([r.record.inequity_percent for r in chunk])
        rows.append(AlphaRow(IndexKind.parse(index).value, a, runs, m, sd))
        records.extend(r.record for r in chunk)
        series[a] = inequity_series(chunk)
    return AlphaStudy(tuple(rows), tuple(records), series)


@dataclass(frozen=True)
class CompareCell:
    scenario: str
    index_kind: str
    alpha: float
    runs: int
    stats: dict[str, tuple[float, float]]
    records: tuple[RunRecord, ...]
    series: list[SeriesPoint]

    def metric_names(self) -> list[str]:
        return list(self.stats)


def summarise_records(records: Sequence[RunRecord]) -> dict[str, tuple[float, float]]:
    out = {
        "inequity": mean_std([r.inequity_percent for r in records]),
        "revenue": mean_std([r.revenue for r in records]),
    }
    for i in range(len(records[0].importance_percents)):
        out[f"I{i + 1}"] = mean_std([r.importance_percents[i] for r in records])
    out["total_importance"] = mean_std([r.assigned_importance_percent for r in records])
    out["assigned_capacity"] = mean_std([r.assigned_capacity_percent for r in records])
    return out


def compare(kinds: Iterable["str | ScenarioKind"] = ALL_KINDS,
            indices: Iterable["str | IndexKind"] = ALL_INDICES,
            runs: int = 5, base_seed: int = 0, scenario_seed: int = 1,
            ga: GaConfig | None = None, alphas: dict[IndexKind, float] | None = None,
            epsilon: float = 0.5, workers: int = 1,
            scenarios: dict[ScenarioKind, Scenario] | None = None) -> list[CompareCell]:
    """Every (scenario kind, index) cell over the same run seeds."""
    ga = ga or GaConfig()
    alphas = {**DEFAULT_ALPHA, **(alphas or {})}
    kinds = [ScenarioKind.parse(k) for k in kinds]
    indices = [IndexKind.parse(i) for i in indices]
    scenarios = dict(scenarios or {})
    for k in kinds:
        scenarios.setdefault(k, make_scenario(k, scenario_seed))
    jobs, cells_meta = [], []
    for k in kinds:
        for idx in indices:
            cfg = FairnessConfig(idx, alphas[idx], epsilon)
            cells_meta.append((k, cfg))
            jobs.extend((scenarios[k], replace(ga, seed=base_seed + r), cfg, r + 1)
                        for r in range(runs))
    results = run_jobs(jobs, workers)
    cells = []
    for c, (k, cfg) in enumerate(cells_meta):
        chunk = results[c * runs:(c + 1) * runs]
        recs = tuple(r.record for r in chunk)
        cells.append(CompareCell(k.value, cfg.index_kind.value, cfg.alpha, runs,
                                 summarise_records(recs), recs, inequity_series(chunk)))
    return cells
