"""Decision stream CSV: the data behind the speed traces."""

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .layers import SpeedDecision

COLUMNS = [
    "t",
    "legal_kph",
    "context_kph",
    "proximity_kph",
    "final_kph",
    "n_2d",
    "n_3d",
    "driver_kph",
]


def _fmt(value: float | None) -> str:
    # repr is the shortest exact float text, so replays diff byte-for-byte
    return "" if value is None else repr(float(value))


def _opt(text: str) -> float | None:
    return float(text) if text != "" else None


@dataclass(frozen=True)
class DecisionRow:
    """A decision as read back from CSV."""

    t: float
    legal_kph: float
    context_kph: float
    proximity_kph: float | None
    final_kph: float
    n_2d: int
    n_3d: int
    driver_kph: float | None


def write_decisions(decisions: Iterable[SpeedDecision], out: TextIO) -> int:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    count = 0
    for d in decisions:
        writer.writerow(
            [
                _fmt(d.timestamp),
                _fmt(d.layers.legal),
                _fmt(d.layers.context),
                _fmt(d.layers.proximity),
                _fmt(d.final),
                d.n_2d,
                d.n_3d,
                _fmt(d.driver_speed),
            ]
        )
        count += 1
    return count


def save_decisions(decisions: Iterable[SpeedDecision], path: Path) -> int:
    with Path(path).open("w", newline="") as handle:
        return write_decisions(decisions, handle)


def decisions_to_csv(decisions: Iterable[SpeedDecision]) -> str:
    buffer = io.StringIO()
    write_decisions(decisions, buffer)
    return buffer.getvalue()


def read_decisions(path: Path) -> list[DecisionRow]:
    with Path(path).open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        return [
            DecisionRow(
                t=float(row["t"]),
                legal_kph=float(row["legal_kph"]),
                context_kph=float(row["context_kph"]),
                proximity_kph=_opt(row["proximity_kph"]),
                final_kph=float(row["final_kph"]),
                n_2d=int(row["n_2d"]),
                n_3d=int(row["n_3d"]),
                driver_kph=_opt(row["driver_kph"]),
            )
            for row in reader
        ]


def to_row(decision: SpeedDecision) -> DecisionRow:
    return DecisionRow(
        t=decision.timestamp,
        legal_kph=decision.layers.legal,
        context_kph=decision.layers.context,
        proximity_kph=decision.layers.proximity,
        final_kph=decision.final,
        n_2d=decision.n_2d,
        n_3d=decision.n_3d,
        driver_kph=decision.driver_speed,
    )
