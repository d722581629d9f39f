"""Aggregation of negotiation records into per-cell metrics and CSV output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

from ..model import NegotiationRecord

#: Two-sided 95% normal quantile used for confidence half-widths.
Z_95 = 1.96


def genuine_utilities(record: NegotiationRecord) -> list[float]:
    """Final utilities of the real team members (infiltrators excluded).

    A failed negotiation scores zero for everyone, which the record already
    encodes.
    """
    return [u for u, g in zip(record.final_utilities, record.genuine) if g]


class CellAccumulator:
    """Streams records of one experiment cell into metric samples."""

    def __init__(self) -> None:
        self.mins = []
        self.avgs = []
        self.failures = 0

    def add(self, record: NegotiationRecord) -> None:
        utilities = genuine_utilities(record)
        if record.failed:
            self.failures += 1
        if utilities:
            self.mins.append(min(utilities))
            self.avgs.append(sum(utilities) / len(utilities))
        else:
            self.mins.append(0.0)
            self.avgs.append(0.0)

    @property
    def samples(self) -> int:
        return len(self.mins)


def half_width(values: Sequence[float]) -> float:
    """95% confidence half-width of the mean, zero for fewer than two samples."""
    n = len(values)
    if n < 2:
        return 0.0
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return Z_95 * math.sqrt(var / n)


@dataclass(frozen=True)
class MetricsRow:
    """One experiment cell's aggregate metrics.

    ``cell`` holds the ordered identifying columns (already stringified) so
    every experiment can label its sweep dimensions without schema changes.
    """

    experiment: str
    cell: tuple[tuple[str, str], ...]
    mean_min: float
    mean_avg: float
    ci_min: float
    ci_avg: float
    failures: int
    samples: int

    @property
    def failure_rate(self) -> float:
        return self.failures / self.samples if self.samples else 0.0


def summarize_cell(
    experiment: str, cell: Sequence[tuple[str, str]], acc: CellAccumulator
) -> MetricsRow:
    n = acc.samples
    return MetricsRow(
        experiment=experiment,
        cell=tuple(cell),
        mean_min=sum(acc.mins) / n if n else 0.0,
        mean_avg=sum(acc.avgs) / n if n else 0.0,
        ci_min=half_width(acc.mins),
        ci_avg=half_width(acc.avgs),
        failures=acc.failures,
        samples=n,
    )


@dataclass(frozen=True)
class CurveRow:
    """Mean opponent utility of the team offer at one round of one model."""

    model: str
    deadline: str
    round: int
    mean_u_op: float


def write_metrics_csv(path: str, rows: Sequence[MetricsRow]) -> None:
    if not rows:
        raise ValueError("no metric rows to write")
    cell_columns = [name for name, _ in rows[0].cell]
    header = cell_columns + [
        "mean_min",
        "ci_min",
        "mean_avg",
        "ci_avg",
        "failures",
        "failure_rate",
        "samples",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            if [name for name, _ in row.cell] != cell_columns:
                raise ValueError("inconsistent cell columns across rows")
            writer.writerow(
                [value for _, value in row.cell]
                + [
                    f"{row.mean_min:.6f}",
                    f"{row.ci_min:.6f}",
                    f"{row.mean_avg:.6f}",
                    f"{row.ci_avg:.6f}",
                    str(row.failures),
                    f"{row.failure_rate:.6f}",
                    str(row.samples),
                ]
            )


def write_curves_csv(path: str, rows: Sequence[CurveRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "deadline", "round", "mean_u_op"])
        for row in rows:
            writer.writerow(
                [row.model, row.deadline, str(row.round), f"{row.mean_u_op:.6f}"]
            )
