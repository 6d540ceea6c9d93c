"""Shared fixtures: cameras, models and small synthetic scenes."""

import numpy as np
import pytest

from src.context import DEFAULT_PROFILE
from src.core import CameraModel, Point3
from src.fusion import MatchKind, PedestrianDetection3D, RangeHeightModel


@pytest.fixture
def default_camera() -> CameraModel:
    return CameraModel.default()


@pytest.fixture
def identity_camera() -> CameraModel:
    """Optical axis along body z: u = 100 x / z + 50, v = 100 y / z + 50."""
    return CameraModel(fx=100.0, fy=100.0, cx=50.0, cy=50.0, image_width=100, image_height=100)


@pytest.fixture
def default_profile():
    return DEFAULT_PROFILE


@pytest.fixture
def loose_model() -> RangeHeightModel:
    """Accepts any bbox height at any range."""
    return RangeHeightModel(slope=0.0, intercept=100.0, residual_std=1e6)


@pytest.fixture
def person_points():
    """Builder for an upright person's point column centred at (x, y) on the ground."""

    def build(x: float, y: float, levels: int = 10) -> np.ndarray:
        z = (np.arange(levels) + 0.5) * 1.7 / levels
        return np.array(
            [[x + dx, y + dy, zz] for dx in (-0.125, 0.125) for dy in (-0.125, 0.125) for zz in z]
        )

    return build


@pytest.fixture
def detection_at():
    """Builder for a validated pedestrian at a body-frame position."""

    def build(x: float, y: float, z: float = 0.85) -> PedestrianDetection3D:
        position = Point3(x, y, z)
        return PedestrianDetection3D(
            position=position,
            range=position.norm,
            source_bbox=0,
            points=position.as_array()[np.newaxis, :],
            cluster_id=0,
            match_kind=MatchKind.FULL_CLUSTER,
            overlap_fraction=1.0,
            z_score=0.0,
        )

    return build
