"""Domain types shared by every layer of the controller.

Body frame: x forward, y left, z up (meters). Camera frame: the usual optical
convention, x right, y down, z along the optical axis.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class RoadType(str, Enum):
    """Road environments the speed profile distinguishes."""

    SHARED = "shared"  # No segregation of people and vehicles
    SEMI_SHARED = "semi_shared"  # Heavy interaction, marked driving area
    REGULAR = "regular"  # Pedestrians on sidewalks only


class ObjectClass(str, Enum):
    """2D detector classes. Only PERSON is consumed."""

    PERSON = "person"
    BICYCLE = "bicycle"
    CAR = "car"
    OTHER = "other"


@dataclass(frozen=True)
class Point3:
    """A point in the body frame, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"Point3 needs finite coordinates, got {self}")

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Point3":
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def norm(self) -> float:
        """Euclidean distance from the body origin."""
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class PointUV:
    """Continuous pixel coordinates, possibly outside the image."""

    u: float
    v: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"PointUV needs finite coordinates, got {self}")


@dataclass(frozen=True)
class BBox2D:
    """Axis-aligned 2D detection in pixel coordinates."""

    u_min: float
    v_min: float
    u_max: float
    v_max: float
    class_label: ObjectClass = ObjectClass.PERSON
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not self.u_min < self.u_max:
            raise ValueError(f"BBox2D needs u_min < u_max, got {self.u_min}, {self.u_max}")
        if not self.v_min < self.v_max:
            raise ValueError(f"BBox2D needs v_min < v_max, got {self.v_min}, {self.v_max}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"BBox2D confidence must be in [0, 1], got {self.confidence}")

    @property
    def is_person(self) -> bool:
        return self.class_label == ObjectClass.PERSON

    @property
    def width(self) -> float:
        return self.u_max - self.u_min

    @property
    def height(self) -> float:
        return self.v_max - self.v_min

    def contains(self, uv: np.ndarray) -> np.ndarray:
        """Mask of the (N, 2) UV rows inside the box, edges included. NaN rows are outside."""
        u = uv[:, 0]
        v = uv[:, 1]
        return (u >= self.u_min) & (u <= self.u_max) & (v >= self.v_min) & (v <= self.v_max)


@dataclass(frozen=True, eq=False)
class CameraModel:
    """Pinhole camera with a rigid body->camera extrinsic, no distortion."""

    fx: float
    fy: float
    cx: float
    cy: float
    image_width: int
    image_height: int
    rotation: tuple[tuple[float, float, float], ...] = (
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (0.0, 0.0, 1.0),
    )
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    _R: np.ndarray = field(init=False, repr=False)
    _t: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"Focal lengths must be positive, got {self.fx}, {self.fy}")
        if self.image_width <= 0 or self.image_height <= 0:
            raise ValueError("Image dimensions must be positive")
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if R.shape != (3, 3) or t.shape != (3,):
            raise ValueError("Extrinsic needs a 3x3 rotation and a 3-vector translation")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9, rtol=0.0):
            raise ValueError("Extrinsic rotation is not orthonormal")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "_R", R)
        object.__setattr__(self, "_t", t)

    @property
    def R(self) -> np.ndarray:
        return self._R

    @property
    def t(self) -> np.ndarray:
        return self._t

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CameraModel):
            return NotImplemented
        return (
            (self.fx, self.fy, self.cx, self.cy, self.image_width, self.image_height)
            == (other.fx, other.fy, other.cx, other.cy, other.image_width, other.image_height)
            and np.array_equal(self._R, other._R)
            and np.array_equal(self._t, other._t)
        )

    @classmethod
    def default(cls, mount_height: float = 1.5) -> "CameraModel":
        """Forward-looking 1280x720 camera mounted above the body origin."""
        # x_c = -y_b, y_c = -z_b, z_c = x_b
        rotation = ((0.0, -1.0, 0.0), (0.0, 0.0, -1.0), (1.0, 0.0, 0.0))
        # t = -R @ mount position (0, 0, h)
        translation = (0.0, mount_height, 0.0)
        return cls(
            fx=600.0,
            fy=600.0,
            cx=640.0,
            cy=360.0,
            image_width=1280,
            image_height=720,
            rotation=rotation,
            translation=translation,
        )

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "image_width": self.image_width,
            "image_height": self.image_height,
            "rotation": [list(row) for row in self.rotation],
            "translation": list(self.translation),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CameraModel":
        return cls(
            fx=float(data["fx"]),
            fy=float(data["fy"]),
            cx=float(data["cx"]),
            cy=float(data["cy"]),
            image_width=int(data["image_width"]),
            image_height=int(data["image_height"]),
            rotation=tuple(tuple(float(c) for c in row) for row in data["rotation"]),
            translation=tuple(float(c) for c in data["translation"]),
        )


@dataclass(frozen=True)
class VehicleState:
    """Odometry snapshot."""

    speed: float  # KPH
    wheel_angle: float = 0.0  # radians, positive left
    wheelbase: float = 2.5  # meters

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValueError(f"Vehicle speed must be >= 0, got {self.speed}")
        if self.wheelbase <= 0:
            raise ValueError(f"Wheelbase must be positive, got {self.wheelbase}")
        if not abs(self.wheel_angle) < math.pi / 2:
            raise ValueError(f"|wheel_angle| must be < pi/2, got {self.wheel_angle}")


def as_point_array(points: object) -> np.ndarray:
    """Coerce points into a read-only (N, 3) float array."""
    array = np.array(points, dtype=float).reshape(-1, 3)
    if not np.all(np.isfinite(array)):
        raise ValueError("Point cloud contains non-finite coordinates")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SceneFrame:
    """One time step of a drive: odometry, LIDAR points, 2D detections."""

    timestamp: float
    vehicle: VehicleState
    points: np.ndarray  # (N, 3), body frame
    bboxes: tuple[BBox2D, ...] = ()
    road_type: RoadType = RoadType.REGULAR
    driver_speed: float | None = None  # KPH, human reference
    segment: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", as_point_array(self.points))
        object.__setattr__(self, "bboxes", tuple(self.bboxes))
        object.__setattr__(self, "road_type", RoadType(self.road_type))
        if self.driver_speed is not None and self.driver_speed < 0:
            raise ValueError(f"Driver speed must be >= 0, got {self.driver_speed}")

    @property
    def person_bboxes(self) -> list[BBox2D]:
        return [b for b in self.bboxes if b.is_person]

    @property
    def pedestrian_count(self) -> int:
        """Pedestrian density: number of person boxes in view."""
        return len(self.person_bboxes)
