"""Core module - domain types and the pinhole camera model."""

from .camera import back_project, project_cloud, project_point, project_points
from .types import (
    BBox2D,
    CameraModel,
    ObjectClass,
    Point3,
    PointUV,
    RoadType,
    SceneFrame,
    VehicleState,
    as_point_array,
)

__all__ = [
    # Types
    "BBox2D",
    "CameraModel",
    "ObjectClass",
    "Point3",
    "PointUV",
    "RoadType",
    "SceneFrame",
    "VehicleState",
    "as_point_array",
    # Projection
    "back_project",
    "project_cloud",
    "project_point",
    "project_points",
]
