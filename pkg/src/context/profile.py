"""Speed Profile: pedestrian density -> mean human driving speed, per road context."""

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import structlog

from ..core import RoadType, SceneFrame
from ..errors import MissingBin

logger = structlog.get_logger(__name__)

DENSITY_BIN_WIDTH = 3
N_DENSITY_BINS = 4
SPEED_BIN_KPH = 5.0


class ProfileContext(str, Enum):
    """Road contexts with their own speed column."""

    SHARED = "shared"  # Shared and semi-shared roads together
    REGULAR = "regular"

    @classmethod
    def for_road(cls, road_type: RoadType) -> "ProfileContext":
        if RoadType(road_type) == RoadType.REGULAR:
            return cls.REGULAR
        return cls.SHARED


@dataclass(frozen=True)
class DensityBin:
    """Pedestrian-count bin, width 3, last bin open."""

    index: int
    lower: int
    upper: int | None  # inclusive; None for the open bin

    @property
    def label(self) -> str:
        return f"{self.lower}+" if self.upper is None else f"{self.lower}-{self.upper}"


DENSITY_BINS: tuple[DensityBin, ...] = tuple(
    DensityBin(
        index=i,
        lower=i * DENSITY_BIN_WIDTH,
        upper=None if i == N_DENSITY_BINS - 1 else i * DENSITY_BIN_WIDTH + DENSITY_BIN_WIDTH - 1,
    )
    for i in range(N_DENSITY_BINS)
)


def density_bin(count: int) -> DensityBin:
    """0-2 -> 0, 3-5 -> 1, 6-8 -> 2, 9+ -> 3. No pedestrians falls in the first bin."""
    if count < 0:
        raise ValueError(f"pedestrian count must be >= 0, got {count}")
    return DENSITY_BINS[min(count // DENSITY_BIN_WIDTH, N_DENSITY_BINS - 1)]


def discretise_speed(speed: float) -> int:
    """5 KPH speed bin index; bin b covers [5b, 5b + 5)."""
    if speed < 0:
        raise ValueError(f"speed must be >= 0, got {speed}")
    return int(math.floor(speed / SPEED_BIN_KPH))


@dataclass(frozen=True)
class ProfileSample:
    """One log observation: odometry speed and person-bbox count."""

    speed: float  # KPH
    pedestrian_count: int
    road_type: RoadType

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        if self.pedestrian_count < 0:
            raise ValueError(f"pedestrian_count must be >= 0, got {self.pedestrian_count}")


@dataclass(frozen=True)
class SpeedProfile:
    """Lookup table of mean speed per (context, density bin)."""

    means: dict[ProfileContext, tuple[float | None, ...]]
    sample_counts: dict[ProfileContext, tuple[int, ...]]
    # (context, density bin index) -> {speed bin index: tally}
    speed_tallies: dict[tuple[ProfileContext, int], dict[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for context in ProfileContext:
            means = self.means.get(context)
            counts = self.sample_counts.get(context)
            if means is None or len(means) != N_DENSITY_BINS:
                raise ValueError(f"profile needs {N_DENSITY_BINS} means for '{context.value}'")
            if counts is None or len(counts) != N_DENSITY_BINS:
                raise ValueError(f"profile needs {N_DENSITY_BINS} counts for '{context.value}'")
            for mean, count in zip(means, counts):
                if mean is not None and mean < 0:
                    raise ValueError(f"negative mean speed {mean} for '{context.value}'")
                if count > 0 and mean is None:
                    raise ValueError(f"bin with samples lacks a mean for '{context.value}'")

    def mean(self, context: ProfileContext, bin_index: int) -> float | None:
        return self.means[context][bin_index]

    def rows(self) -> list[tuple[ProfileContext, DensityBin, float | None, int]]:
        return [
            (context, dbin, self.means[context][dbin.index], self.sample_counts[context][dbin.index])
            for context in ProfileContext
            for dbin in DENSITY_BINS
        ]

    def save(self, path: Path) -> None:
        """Text table: context,bin_lower,bin_upper,mean_kph,sample_count."""
        with Path(path).open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["context", "bin_lower", "bin_upper", "mean_kph", "sample_count"])
            for context, dbin, mean, count in self.rows():
                writer.writerow(
                    [
                        context.value,
                        dbin.lower,
                        "" if dbin.upper is None else dbin.upper,
                        "" if mean is None else repr(mean),
                        count,
                    ]
                )

    @classmethod
    def load(cls, path: Path) -> "SpeedProfile":
        means = {c: [None] * N_DENSITY_BINS for c in ProfileContext}
        counts = {c: [0] * N_DENSITY_BINS for c in ProfileContext}
        with Path(path).open(newline="") as handle:
            for row in csv.DictReader(handle):
                context = ProfileContext(row["context"])
                dbin = density_bin(int(row["bin_lower"]))
                if dbin.lower != int(row["bin_lower"]):
                    raise ValueError(f"{path}: bin_lower {row['bin_lower']} is not a bin edge")
                means[context][dbin.index] = float(row["mean_kph"]) if row["mean_kph"] else None
                counts[context][dbin.index] = int(row["sample_count"] or 0)
        return cls(
            means={c: tuple(v) for c, v in means.items()},
            sample_counts={c: tuple(v) for c, v in counts.items()},
        )


# Shared: {0-2, 3-5, 6-8, 9+}; Regular likewise. Human-driven reference means.
DEFAULT_PROFILE = SpeedProfile(
    means={
        ProfileContext.SHARED: (14.7, 13.0, 11.1, 8.5),
        ProfileContext.REGULAR: (20.0, 19.7, 18.2, 18.8),
    },
    sample_counts={
        ProfileContext.SHARED: (0, 0, 0, 0),
        ProfileContext.REGULAR: (0, 0, 0, 0),
    },
)


def build_speed_profile(samples: Iterable[ProfileSample]) -> SpeedProfile:
    """
    Group samples by (context, density bin) and take the mean raw speed.

    Shared and semi-shared samples share one context. 5 KPH tallies are kept
    for histogram output. Empty groups have no mean.
    """
    speeds: dict[tuple[ProfileContext, int], list[float]] = {}
    tallies: dict[tuple[ProfileContext, int], Counter] = {}
    for sample in samples:
        key = (ProfileContext.for_road(sample.road_type), density_bin(sample.pedestrian_count).index)
        speeds.setdefault(key, []).append(sample.speed)
        tallies.setdefault(key, Counter())[discretise_speed(sample.speed)] += 1

    means = {}
    counts = {}
    for context in ProfileContext:
        group = [speeds.get((context, i), []) for i in range(N_DENSITY_BINS)]
        # fsum is exact, so the mean does not depend on sample order
        means[context] = tuple(math.fsum(g) / len(g) if g else None for g in group)
        counts[context] = tuple(len(g) for g in group)

    profile = SpeedProfile(
        means=means,
        sample_counts=counts,
        speed_tallies={key: dict(sorted(t.items())) for key, t in sorted(tallies.items())},
    )
    logger.info(
        "Speed profile built",
        samples=sum(sum(c) for c in counts.values()),
        shared=counts[ProfileContext.SHARED],
        regular=counts[ProfileContext.REGULAR],
    )
    return profile


def context_speed(profile: SpeedProfile, road_type: RoadType, pedestrian_count: int) -> float:
    """
    Context-layer speed for a road type and visible pedestrian count.

    Raises:
        MissingBin: the profile has no mean for that (context, bin)
    """
    context = ProfileContext.for_road(road_type)
    dbin = density_bin(pedestrian_count)
    mean = profile.mean(context, dbin.index)
    if mean is None:
        raise MissingBin(context.value, dbin.index)
    return mean


def samples_from_frames(frames: Iterable[SceneFrame]) -> list[ProfileSample]:
    """Odometry speed and person-bbox count of every frame, tagged by road type."""
    return [
        ProfileSample(
            speed=frame.vehicle.speed,
            pedestrian_count=frame.pedestrian_count,
            road_type=frame.road_type,
        )
        for frame in frames
    ]


def speed_histogram(profile: SpeedProfile) -> list[dict]:
    """
    Normalised speed distribution per density bin (stacked-bar data).

    Each density bin's fractions sum to 1.
    """
    rows = []
    for (context, bin_index), tally in sorted(profile.speed_tallies.items()):
        total = sum(tally.values())
        for speed_bin, count in sorted(tally.items()):
            rows.append(
                {
                    "context": context.value,
                    "density_bin": DENSITY_BINS[bin_index].label,
                    "speed_lower_kph": speed_bin * SPEED_BIN_KPH,
                    "speed_upper_kph": (speed_bin + 1) * SPEED_BIN_KPH,
                    "count": count,
                    "fraction": count / total,
                }
            )
    return rows


def write_speed_histogram(profile: SpeedProfile, path: Path) -> None:
    fieldnames = ["context", "density_bin", "speed_lower_kph", "speed_upper_kph", "count", "fraction"]
    with Path(path).open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(speed_histogram(profile))
