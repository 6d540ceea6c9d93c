"""Instantaneous vehicle path from the wheel angle, and positions relative to it."""

import math
from dataclasses import dataclass
from enum import Enum

import structlog

from ..core import Point3, VehicleState
from ..errors import BehindVehicle

logger = structlog.get_logger(__name__)

MAX_CURVATURE = 0.999  # 1/m
STRAIGHT_EPS = 1e-9


class PathKind(str, Enum):
    STRAIGHT = "straight"
    ARC = "arc"


@dataclass(frozen=True)
class PathModel:
    """Constant-curvature path, signed positive to the left."""

    kind: PathKind
    curvature: float = 0.0

    def __post_init__(self) -> None:
        if not abs(self.curvature) < 1.0:
            raise ValueError(f"|curvature| must be < 1, got {self.curvature}")

    @classmethod
    def from_vehicle(cls, vehicle: VehicleState) -> "PathModel":
        """Kinematic bicycle model: curvature = tan(wheel_angle) / wheelbase."""
        curvature = math.tan(vehicle.wheel_angle) / vehicle.wheelbase
        if abs(curvature) < STRAIGHT_EPS:
            return cls(PathKind.STRAIGHT, 0.0)
        if abs(curvature) > MAX_CURVATURE:
            logger.warning("Curvature clamped", curvature=curvature, limit=MAX_CURVATURE)
            curvature = math.copysign(MAX_CURVATURE, curvature)
        return cls(PathKind.ARC, curvature)

    def point_at(self, arc_length: float) -> tuple[float, float]:
        """Ground-plane point reached after arc_length meters along the path."""
        if self.kind == PathKind.STRAIGHT:
            return arc_length, 0.0
        radius = 1.0 / self.curvature
        heading = arc_length * self.curvature
        return radius * math.sin(heading), radius * (1.0 - math.cos(heading))


@dataclass(frozen=True)
class PathRelativePosition:
    """Distance along the path to the perpendicular foot, and unsigned distance off it."""

    along: float
    lateral: float

    def __post_init__(self) -> None:
        for name, value in (("along", self.along), ("lateral", self.lateral)):
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


def path_relative(position: Point3, vehicle: VehicleState) -> PathRelativePosition:
    """
    Decompose a ground-plane position into along/lateral path distances.

    Raises:
        BehindVehicle: the perpendicular foot is not ahead of the vehicle
    """
    path = PathModel.from_vehicle(vehicle)
    x, y = position.x, position.y

    if path.kind == PathKind.STRAIGHT:
        if x <= 0:
            raise BehindVehicle(f"x = {x:.3f} m")
        return PathRelativePosition(along=x, lateral=abs(y))

    radius = 1.0 / path.curvature  # signed, centre at (0, radius)
    dx, dy = x, y - radius
    radial = math.hypot(dx, dy)
    if radial == 0.0:
        raise BehindVehicle("position at the turning centre")

    start = math.atan2(-radius, 0.0)
    foot = math.atan2(dy, dx)
    # Left turns sweep counter-clockwise around the centre, right turns clockwise
    swept = (foot - start) % (2 * math.pi) if radius > 0 else (start - foot) % (2 * math.pi)
    if not 0.0 < swept <= math.pi:
        raise BehindVehicle(f"swept angle {swept:.3f} rad")

    return PathRelativePosition(along=abs(radius) * swept, lateral=abs(radial - abs(radius)))
