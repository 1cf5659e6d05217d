"""Run records and epoch series, with their CSV / JSON encodings."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

LEAD_COLUMNS = ("index", "alpha", "run", "seed", "inequity_pct", "revenue", "scheduled_trains")
TAIL_COLUMNS = ("assigned_importance_pct", "assigned_capacity_pct")


@dataclass(frozen=True)
class RunRecord:
    index_kind: str
    alpha: float
    run_number: int
    seed: int
    inequity_percent: float
    revenue: float
    scheduled_train_count: int
    importance_percents: tuple[float, ...]
    assigned_importance_percent: float
    assigned_capacity_percent: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "importance_percents", tuple(self.importance_percents))

    def columns(self) -> tuple[str, ...]:
        return record_columns(len(self.importance_percents))

    def to_row(self) -> dict[str, Any]:
        # repr() keeps floats exact through a text round trip.
        row: dict[str, Any] = {
            "index": self.index_kind,
            "alpha": repr(float(self.alpha)),
            "run": str(self.run_number),
            "seed": str(self.seed),
            "inequity_pct": repr(float(self.inequity_percent)),
            "revenue": repr(float(self.revenue)),
            "scheduled_trains": str(self.scheduled_train_count),
        }
        for i, v in enumerate(self.importance_percents, start=1):
            row[f"I{i}_pct"] = repr(float(v))
        row["assigned_importance_pct"] = repr(float(self.assigned_importance_percent))
        row["assigned_capacity_pct"] = repr(float(self.assigned_capacity_percent))
        return row

    @classmethod
    def from_row(cls, row: Mapping[str, str]) -> "RunRecord":
        n = sum(1 for k in row if k.startswith("I") and k.endswith("_pct"))
        return cls(
            index_kind=row["index"],
            alpha=float(row["alpha"]),
            run_number=int(row["run"]),
            seed=int(row["seed"]),
            inequity_percent=float(row["inequity_pct"]),
            revenue=float(row["revenue"]),
            scheduled_train_count=int(row["scheduled_trains"]),
            importance_percents=tuple(float(row[f"I{i}_pct"]) for i in range(1, n + 1)),
            assigned_importance_percent=float(row["assigned_importance_pct"]),
            assigned_capacity_percent=float(row["assigned_capacity_pct"]),
        )


def record_columns(n_undertakings: int) -> tuple[str, ...]:
    return LEAD_COLUMNS + tuple(f"I{i}_pct" for i in range(1, n_undertakings + 1)) + TAIL_COLUMNS


def records_to_csv(records: Sequence[RunRecord]) -> str:
    if not records:
        raise ValueError("no records to write")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=records[0].columns(), lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.to_row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[RunRecord]:
    return [RunRecord.from_row(row) for row in csv.DictReader(io.StringIO(text))]


def write_records(path: str | Path, records: Sequence[RunRecord]) -> Path:
    path = Path(path)
    path.write_text(records_to_csv(records), encoding="utf-8")
    return path


def read_records(path: str | Path) -> list[RunRecord]:
    return records_from_csv(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    best_fitness: float
    best_revenue: float
    best_fairness: float
    best_inequity: float


@dataclass(frozen=True)
class EpochHistory:
    records: tuple[EpochRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> list[float]:
        return [getattr(r, name) for r in self.records]

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": "railfair.epochs/1",
            "columns": ["epoch", "best_fitness", "best_revenue", "best_fairness", "best_inequity"],
            "rows": [
                [r.epoch, r.best_fitness, r.best_revenue, r.best_fairness, r.best_inequity]
                for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "EpochHistory":
        return cls(tuple(EpochRecord(int(r[0]), *map(float, r[1:])) for r in doc["rows"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "EpochHistory":
        return cls.from_dict(json.loads(text))


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def read_table(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
