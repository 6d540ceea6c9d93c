"""Proximity layer - along-path pedestrian ranges and time-to-collision speed."""

from .path import PathKind, PathModel, PathRelativePosition, path_relative
from .speed import (
    ProximityParams,
    RangeMode,
    SpeedLaw,
    effective_range,
    effective_ranges,
    proximity_speed,
    speed_for_range,
)

__all__ = [
    "PathKind",
    "PathModel",
    "PathRelativePosition",
    "path_relative",
    "ProximityParams",
    "RangeMode",
    "SpeedLaw",
    "effective_range",
    "effective_ranges",
    "proximity_speed",
    "speed_for_range",
]
