"""Compare controller decisions against the driver's speed."""

import csv
import json
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import structlog

from ..config import Settings
from ..context import ProfileContext
from ..controller import ControllerConfig, DecisionRow, SpeedController, SpeedDecision, to_row
from ..errors import MismatchedStreams
from .io import ScenarioFile

logger = structlog.get_logger(__name__)

HISTOGRAM_BIN_KPH = 1.0
LAYERS = ("legal", "context", "proximity")


def difference_bin(difference: float) -> int:
    """1 KPH bin holding a (final - driver) difference; bin b covers [b, b+1)."""
    # Round first so -5.000000000000002 lands in -5, not -6
    return math.floor(round(difference / HISTOGRAM_BIN_KPH, 6))


@dataclass
class EvalReport:
    """Decision stream scored against the driver."""

    rows: list[DecisionRow]
    road_types: list[ProfileContext]
    histogram: Counter = field(default_factory=Counter)
    by_context: dict[ProfileContext, Counter] = field(default_factory=dict)
    differences: list[float] = field(default_factory=list)
    layer_activation: dict[str, float] = field(default_factory=dict)

    @property
    def n_frames(self) -> int:
        return len(self.rows)

    @property
    def n_with_driver(self) -> int:
        return len(self.differences)

    @property
    def mean_difference(self) -> float | None:
        return math.fsum(self.differences) / len(self.differences) if self.differences else None

    @property
    def median_difference(self) -> float | None:
        return statistics.median(self.differences) if self.differences else None

    @property
    def fraction_conservative(self) -> float | None:
        """Share of frames where the controller is slower than the driver."""
        if not self.differences:
            return None
        return sum(d < 0 for d in self.differences) / len(self.differences)

    def summary(self) -> dict:
        return {
            "frames": self.n_frames,
            "frames_with_driver": self.n_with_driver,
            "mean_difference_kph": self.mean_difference,
            "median_difference_kph": self.median_difference,
            "fraction_conservative": self.fraction_conservative,
            "layer_activation": dict(self.layer_activation),
            "histogram_bin_kph": HISTOGRAM_BIN_KPH,
        }


def _as_rows(decisions: Iterable[SpeedDecision | DecisionRow]) -> list[DecisionRow]:
    return [d if isinstance(d, DecisionRow) else to_row(d) for d in decisions]


def _active(row: DecisionRow) -> list[str]:
    speeds = {"legal": row.legal_kph, "context": row.context_kph, "proximity": row.proximity_kph}
    return [name for name, v in speeds.items() if v is not None and v == row.final_kph]


def evaluate(
    decisions: Sequence[SpeedDecision | DecisionRow], scenario: ScenarioFile
) -> EvalReport:
    """
    Difference histogram (final - driver) and layer activation for a replay.

    Raises:
        MismatchedStreams: frame counts or timestamps differ
    """
    rows = _as_rows(decisions)
    if len(rows) != len(scenario.frames):
        raise MismatchedStreams(
            f"{len(rows)} decisions for {len(scenario.frames)} scenario frames"
        )
    for i, (row, frame) in enumerate(zip(rows, scenario.frames)):
        if not math.isclose(row.t, frame.timestamp, rel_tol=0.0, abs_tol=1e-9):
            raise MismatchedStreams(f"decision {i} at t={row.t}, frame at t={frame.timestamp}")

    report = EvalReport(
        rows=rows,
        road_types=[ProfileContext.for_road(f.road_type) for f in scenario.frames],
        by_context={c: Counter() for c in ProfileContext},
    )
    activations: Counter = Counter()
    for row, context in zip(rows, report.road_types):
        activations.update(_active(row))
        if row.driver_kph is None:
            continue
        difference = row.final_kph - row.driver_kph
        report.differences.append(difference)
        report.histogram[difference_bin(difference)] += 1
        report.by_context[context][difference_bin(difference)] += 1

    report.layer_activation = {
        name: (activations[name] / len(rows) if rows else 0.0) for name in LAYERS
    }
    logger.info(
        "Replay evaluated",
        frames=report.n_frames,
        with_driver=report.n_with_driver,
        mean_difference=report.mean_difference,
        conservative=report.fraction_conservative,
    )
    return report


# ========== report files ==========

_PLOT_SCRIPT = """\
set datafile separator ','
set terminal pngcairo size 1200,900
set output 'speeds.png'
set multiplot layout 2,1
set title 'Layer speeds'
set xlabel 't [s]'
set ylabel 'speed [KPH]'
set key outside
plot 'trace.csv' using 1:2 with lines title 'legal', \\
     '' using 1:3 with lines title 'context', \\
     '' using 1:4 with points pt 7 ps 0.4 title 'proximity', \\
     '' using 1:5 with lines lw 2 title 'final', \\
     '' using 1:8 with lines dt 2 title 'driver'
set title 'Final - driver'
set xlabel 'difference [KPH]'
set ylabel 'frames'
set style fill solid 0.5
plot 'histogram.csv' using ($1+0.5):3 with boxes title 'shared', \\
     '' using ($1+0.5):4 with boxes title 'regular'
unset multiplot
"""


def write_report(report: EvalReport, out_dir: Path) -> None:
    """histogram.csv, trace.csv, summary.json and a gnuplot script into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with (out_dir / "histogram.csv").open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["bin_kph", "count", "shared", "regular"])
        for b in sorted(report.histogram):
            writer.writerow(
                [
                    b,
                    report.histogram[b],
                    report.by_context[ProfileContext.SHARED][b],
                    report.by_context[ProfileContext.REGULAR][b],
                ]
            )

    with (out_dir / "trace.csv").open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["t", "legal_kph", "context_kph", "proximity_kph", "final_kph", "n_2d", "n_3d", "driver_kph", "context"]
        )
        for row, context in zip(report.rows, report.road_types):
            writer.writerow(
                [
                    repr(row.t),
                    repr(row.legal_kph),
                    repr(row.context_kph),
                    "" if row.proximity_kph is None else repr(row.proximity_kph),
                    repr(row.final_kph),
                    row.n_2d,
                    row.n_3d,
                    "" if row.driver_kph is None else repr(row.driver_kph),
                    context.value,
                ]
            )

    (out_dir / "summary.json").write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    (out_dir / "plot.gp").write_text(_PLOT_SCRIPT)
    logger.info("Report written", out_dir=str(out_dir))


# ========== replay helpers ==========


def config_for_scenario(scenario: ScenarioFile, settings: Settings) -> ControllerConfig:
    """Controller config with the scenario's camera, segments and default legal limit."""
    return replace(
        ControllerConfig.from_settings(settings, camera=scenario.camera, segments=scenario.segments),
        default_legal_kph=scenario.default_legal_kph,
    )


@dataclass(frozen=True)
class SweepRow:
    scaling_factor: float
    mean_difference: float | None
    median_difference: float | None
    fraction_conservative: float | None
    mean_final: float
    proximity_activation: float


def sweep(
    scenario: ScenarioFile, config: ControllerConfig, factors: Iterable[float]
) -> list[SweepRow]:
    """Replay one scenario at several lateral scaling factors."""
    results = []
    for factor in factors:
        decisions = SpeedController(config.with_scaling_factor(factor)).run(scenario.frames)
        report = evaluate(decisions, scenario)
        finals = [d.final for d in decisions]
        results.append(
            SweepRow(
                scaling_factor=float(factor),
                mean_difference=report.mean_difference,
                median_difference=report.median_difference,
                fraction_conservative=report.fraction_conservative,
                mean_final=math.fsum(finals) / len(finals) if finals else 0.0,
                proximity_activation=report.layer_activation["proximity"],
            )
        )
        logger.info("Sweep step", scaling_factor=factor, mean_difference=report.mean_difference)
    return results


def write_sweep(rows: Sequence[SweepRow], path: Path) -> None:
    fields = list(SweepRow.__dataclass_fields__)
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow(["" if getattr(row, f) is None else repr(getattr(row, f)) for f in fields])
