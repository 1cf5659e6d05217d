"""Command line entry point: ``railfair <command> [options]``.

Exit codes: 0 success, 2 bad command line, 3 invalid scenario, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import experiments
from .fairness import FairnessConfig, IndexKind
from .ga import GaConfig, run
from .model import InvalidScenario, Scenario, validate_scenario
from .records import RunRecord, write_records, write_table
from .scenarios import ScenarioKind, make_scenario

log = logging.getLogger("railfair")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_IO = 4


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file.

    Raises:
        OSError: the file cannot be read.
        InvalidScenario: the document is malformed or breaks an invariant.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        s = Scenario.loads(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidScenario([f"{path}: cannot parse scenario document ({exc})"]) from exc
    problems = validate_scenario(s)
    if problems:
        raise InvalidScenario(problems)
    return s


def _outdir(path: str | Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(kind: str, seed: int, out: str | Path, segments: int | None = None,
                 horizon: int | None = None) -> Path:
    overrides = {}
    if segments is not None:
        overrides["line_segments"] = segments
    if horizon is not None:
        overrides["horizon_minutes"] = horizon
    kind = ScenarioKind.parse(kind)
    s = make_scenario(kind, seed, **overrides)
    return s.save(_outdir(out) / f"{kind.value}-seed{seed}.json")


def cmd_optimize(scenario_path: str | Path, index: str, alpha: float | None, epsilon: float,
                 ga: GaConfig, out: str | Path, run_number: int = 1) -> dict[str, Path]:
    s = load_scenario(scenario_path)
    cfg = FairnessConfig.for_index(index, alpha, epsilon)
    result = run(s, ga, cfg, run_number=run_number)
    out = _outdir(out)
    paths = {
        "run": write_records(out / "run.csv", [result.record]),
        "epochs": out / "epochs.json",
        "allocation": out / "allocation.json",
        "trace": out / "repair_trace.json",
    }
    paths["epochs"].write_text(result.history.dumps(), encoding="utf-8")
    paths["allocation"].write_text(json.dumps(result.allocation.to_dict(), indent=1) + "\n",
                                   encoding="utf-8")
    paths["trace"].write_text(json.dumps(result.evaluation.trace.to_dict(), indent=1) + "\n",
                              encoding="utf-8")
    return paths


def cmd_alpha_study(scenario_path: str | Path, index: str, alphas: Sequence[float], runs: int,
                    ga: GaConfig, out: str | Path, epsilon: float = 0.5,
                    workers: int = 1) -> dict[str, Path]:
    s = load_scenario(scenario_path)
    study = experiments.alpha_study(s, index, alphas, runs, ga.seed, ga, epsilon, workers)
    out = _outdir(out)
    return {
        "summary": write_table(
            out / "alpha_summary.csv",
            ["index", "alpha", "runs", "inequity_mean", "inequity_std"],
            [[r.index_kind, r.alpha, r.runs, r.inequity_mean, r.inequity_std] for r in study.rows],
        ),
        "runs": write_records(out / "alpha_runs.csv", list(study.records)),
        "series": write_table(
            out / "alpha_epochs.csv",
            ["index", "alpha", "epoch", "inequity_mean", "inequity_std"],
            [[IndexKind.parse(index).value, a, p.epoch, p.mean, p.std]
             for a, pts in study.series.items() for p in pts],
        ),
    }


def cmd_compare(kinds: Sequence[str], indices: Sequence[str], runs: int, ga: GaConfig,
                out: str | Path, scenario_seed: int = 1, epsilon: float = 0.5,
                alphas: dict[IndexKind, float] | None = None, workers: int = 1) -> dict[str, Path]:
    cells = experiments.compare(kinds, indices, runs, ga.seed, scenario_seed, ga, alphas,
                                epsilon, workers)
    out = _outdir(out)
    metrics = cells[0].metric_names()
    header = ["scenario", "index", "alpha", "runs"]
    for m in metrics:
        header += [f"{m}_mean", f"{m}_std"]
    rows = []
    for c in cells:
        row: list = [c.scenario, c.index_kind, c.alpha, c.runs]
        for m in metrics:
            row += list(c.stats[m])
        rows.append(row)
    records: list[RunRecord] = []
    for c in cells:
        records.extend(c.records)
    return {
        "summary": write_table(out / "compare_summary.csv", header, rows),
        "series": write_table(
            out / "compare_epochs.csv",
            ["scenario", "index", "epoch", "inequity_mean", "inequity_std"],
            [[c.scenario, c.index_kind, p.epoch, p.mean, p.std] for c in cells for p in c.series],
        ),
        "runs": write_table(
            out / "compare_runs.csv",
            ["scenario"] + list(records[0].columns()),
            [[c.scenario] + list(r.to_row().values()) for c in cells for r in c.records],
        ),
    }


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _ga_from(args: argparse.Namespace) -> GaConfig:
    return GaConfig(population_size=args.pop, epochs=args.epochs, seed=args.seed,
                    crossover_prob=args.crossover, mutation_prob=args.mutation)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="railfair",
        description="Fairness-aware allocation of contested railway capacity.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def ga_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--epochs", type=int, default=100, help="GA generations per run")
        p.add_argument("--pop", type=int, default=64, help="GA population size")
        p.add_argument("--seed", type=int, default=0, help="GA seed (run r uses seed + r)")
        p.add_argument("--crossover", type=float, default=0.95, help="crossover probability")
        p.add_argument("--mutation", type=float, default=0.025, help="per-gene mutation probability")
        p.add_argument("--epsilon", type=float, default=0.5, help="Atkinson inequality aversion")

    g = sub.add_parser("generate", help="write a generated scenario file", formatter_class=fmt)
    g.add_argument("--kind", default="unbalanced", choices=[k.value for k in ScenarioKind])
    g.add_argument("--seed", type=int, default=1, help="scenario generator seed")
    g.add_argument("--segments", type=int, default=None, help="line segments (default 4)")
    g.add_argument("--horizon", type=int, default=None, help="horizon in minutes (default 240)")
    g.add_argument("--out", default=".", help="output directory")

    v = sub.add_parser("validate", help="check a scenario file", formatter_class=fmt)
    v.add_argument("--scenario", required=True)

    o = sub.add_parser("optimize", help="one GA run on a scenario file", formatter_class=fmt)
    o.add_argument("--scenario", required=True)
    o.add_argument("--index", default="jain", choices=[k.value for k in IndexKind])
    o.add_argument("--alpha", type=float, default=None,
                   help="sensitivity exponent (default 25, or 10 for gini)")
    o.add_argument("--run", type=int, default=1, help="run number recorded in the output")
    o.add_argument("--out", default="out", help="output directory")
    ga_flags(o)

    a = sub.add_parser("alpha-study", help="inequity across sensitivity values", formatter_class=fmt)
    a.add_argument("--scenario", required=True)
    a.add_argument("--index", default="jain", choices=[k.value for k in IndexKind])
    a.add_argument("--alphas", default="1,5,10,25,50", help="comma-separated alpha values")
    a.add_argument("--runs", type=int, default=5)
    a.add_argument("--workers", type=int, default=1, help="parallel processes")
    a.add_argument("--out", default="out", help="output directory")
    ga_flags(a)

    c = sub.add_parser("compare", help="scenario x index comparison grid", formatter_class=fmt)
    c.add_argument("--kind", default="balanced,semi,unbalanced", help="comma-separated scenario kinds")
    c.add_argument("--index", default="jain,gini,atkinson,revenue", help="comma-separated indices")
    c.add_argument("--alpha", type=float, default=None,
                   help="override alpha for every index (default 25 jain/atkinson/revenue, 10 gini)")
    c.add_argument("--scenario-seed", type=int, default=1, help="generator seed for each scenario")
    c.add_argument("--runs", type=int, default=5)
    c.add_argument("--workers", type=int, default=1, help="parallel processes")
    c.add_argument("--out", default="out", help="output directory")
    ga_flags(c)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            print(cmd_generate(args.kind, args.seed, args.out, args.segments, args.horizon))
        elif args.command == "validate":
            load_scenario(args.scenario)
            print("ok")
        elif args.command == "optimize":
            paths = cmd_optimize(args.scenario, args.index, args.alpha, args.epsilon,
                                 _ga_from(args), args.out, args.run)
            print("\n".join(str(p) for p in paths.values()))
        elif args.command == "alpha-study":
            alphas = [float(x) for x in _csv_list(args.alphas)]
            paths = cmd_alpha_study(args.scenario, args.index, alphas, args.runs,
                                    _ga_from(args), args.out, args.epsilon, args.workers)
            print("\n".join(str(p) for p in paths.values()))
        elif args.command == "compare":
            alphas = None
            if args.alpha is not None:
                alphas = {k: args.alpha for k in IndexKind}
            paths = cmd_compare(_csv_list(args.kind), _csv_list(args.index), args.runs,
                                _ga_from(args), args.out, args.scenario_seed, args.epsilon,
                                alphas, args.workers)
            print("\n".join(str(p) for p in paths.values()))
    except InvalidScenario as exc:
        for p in exc.problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
