"""Proximity-layer speed from the nearest pedestrian's effective along-path range."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import structlog

from ..config import Settings
from ..core import VehicleState
from ..errors import BehindVehicle
from ..fusion import PedestrianDetection3D
from .path import PathRelativePosition, path_relative

logger = structlog.get_logger(__name__)

MPS_TO_KPH = 3.6


class SpeedLaw(str, Enum):
    """Range -> speed conversion."""

    TTC = "ttc"  # v = r / ttc
    BRAKING = "braking"  # v = sqrt(2 a r)


class RangeMode(str, Enum):
    """How lateral distance turns into range down the path."""

    ADDITIVE = "additive"  # along + k * lateral
    REPLACEMENT = "replacement"  # max(along, k * lateral)


@dataclass(frozen=True)
class ProximityParams:
    """Tunables of the proximity layer."""

    lateral_scaling_factor: float = 3.0
    ttc: float = 3.0  # seconds
    max_considered_range: float = 15.0  # meters
    speed_law: SpeedLaw = SpeedLaw.TTC
    decel: float = 2.0  # m/s^2, braking law only
    range_mode: RangeMode = RangeMode.ADDITIVE

    def __post_init__(self) -> None:
        for name in ("lateral_scaling_factor", "ttc", "max_considered_range", "decel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        object.__setattr__(self, "speed_law", SpeedLaw(self.speed_law))
        object.__setattr__(self, "range_mode", RangeMode(self.range_mode))

    @classmethod
    def from_settings(cls, settings: Settings) -> "ProximityParams":
        return cls(
            lateral_scaling_factor=settings.scaling_factor,
            ttc=settings.ttc_s,
            max_considered_range=settings.max_range_m,
            speed_law=SpeedLaw(settings.speed_law),
            decel=settings.decel_mps2,
            range_mode=RangeMode(settings.range_mode),
        )


def effective_range(rel: PathRelativePosition, params: ProximityParams) -> float:
    """Range down the path a pedestrian is treated as standing at."""
    scaled = params.lateral_scaling_factor * rel.lateral
    if params.range_mode == RangeMode.REPLACEMENT:
        return max(rel.along, scaled)
    return rel.along + scaled


def speed_for_range(range_m: float, params: ProximityParams) -> float:
    """KPH that keeps range_m within the time (or braking) budget."""
    if params.speed_law == SpeedLaw.BRAKING:
        return MPS_TO_KPH * math.sqrt(2.0 * params.decel * range_m)
    return MPS_TO_KPH * range_m / params.ttc


def effective_ranges(
    detections: Iterable[PedestrianDetection3D],
    vehicle: VehicleState,
    params: ProximityParams,
) -> list[float]:
    """Effective ranges of the detections that are ahead and within max_considered_range."""
    ranges = []
    for detection in detections:
        try:
            rel = path_relative(detection.position, vehicle)
        except BehindVehicle:
            continue
        r = effective_range(rel, params)
        if r <= params.max_considered_range:
            ranges.append(r)
    return ranges


def proximity_speed(
    detections: Iterable[PedestrianDetection3D],
    vehicle: VehicleState,
    params: ProximityParams = ProximityParams(),
) -> float | None:
    """
    Speed governed by the closest pedestrian in effective range.

    None when nobody is ahead within max_considered_range (layer inactive).
    """
    ranges = effective_ranges(detections, vehicle, params)
    if not ranges:
        return None
    return speed_for_range(min(ranges), params)
