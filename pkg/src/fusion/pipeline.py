"""LIDAR/camera fusion: clusters + person bboxes -> pedestrians in 3D."""

from dataclasses import dataclass, replace

import numpy as np
import structlog

from ..config import Settings
from ..core import CameraModel, Point3, SceneFrame, project_points
from .clustering import Cluster, euclidean_cluster
from .hull import HullMode, Polygon2D, hull_or_centroid
from .matching import MatchKind, MatchResult, classify_polygons
from .sanity import HeightModel

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class FusionParams:
    """Tunables of the 3D detection stage."""

    cluster_distance: float = 0.5  # meters
    min_cluster_size: int = 5
    hull_mode: HullMode = HullMode.CONVEX
    concave_k: int = 8

    def __post_init__(self) -> None:
        if self.cluster_distance <= 0:
            raise ValueError("cluster_distance must be positive")
        if self.min_cluster_size < 1:
            raise ValueError("min_cluster_size must be >= 1")
        object.__setattr__(self, "hull_mode", HullMode(self.hull_mode))

    @classmethod
    def from_settings(cls, settings: Settings) -> "FusionParams":
        return cls(
            cluster_distance=settings.cluster_distance,
            min_cluster_size=settings.min_cluster_size,
            hull_mode=HullMode(settings.hull_mode),
            concave_k=settings.concave_k,
        )


@dataclass(frozen=True, eq=False)
class PedestrianDetection3D:
    """A cluster (or part of one) validated as a person."""

    position: Point3  # centroid of the validated points
    range: float
    source_bbox: int  # index into the frame's bbox list
    points: np.ndarray
    cluster_id: int
    match_kind: MatchKind
    overlap_fraction: float
    z_score: float
    hull: Polygon2D = ()  # ground footprint of the matched cluster

    def __post_init__(self) -> None:
        if not self.range > 0:
            raise ValueError(f"Detection range must be > 0, got {self.range}")


def project_clusters(clusters: list[Cluster], cloud: np.ndarray, cam: CameraModel) -> list[Cluster]:
    """Attach per-point UV (the XYZUV cloud) to each cluster."""
    uv, valid = project_points(cloud, cam)
    return [
        replace(c, projected=uv[c.member_indices], projected_valid=valid[c.member_indices])
        for c in clusters
    ]


def to_detection(
    match: MatchResult, source_bbox: int, hull: Polygon2D = ()
) -> PedestrianDetection3D | None:
    position = Point3.from_array(match.validated_points.mean(axis=0))
    if position.norm <= 0:
        return None
    return PedestrianDetection3D(
        position=position,
        range=position.norm,
        source_bbox=source_bbox,
        points=match.validated_points,
        cluster_id=match.cluster_id,
        match_kind=match.match_kind,
        overlap_fraction=match.overlap_fraction,
        z_score=match.z_score,
        hull=hull,
    )


def detect_pedestrians_3d(
    frame: SceneFrame,
    cam: CameraModel,
    model: HeightModel,
    params: FusionParams = FusionParams(),
) -> list[PedestrianDetection3D]:
    """
    Full fusion pipeline for one frame: cluster, project, classify.

    Only `person` bboxes take part. Ground hulls are built only for clusters
    that validate a bbox. Detections come out in bbox order and
    carry the bbox's index in frame.bboxes.
    """
    person_index = [i for i, b in enumerate(frame.bboxes) if b.is_person]
    if frame.points.shape[0] == 0 or not person_index:
        return []

    clusters = euclidean_cluster(frame.points, params.cluster_distance, params.min_cluster_size)
    if not clusters:
        return []
    clusters = project_clusters(clusters, frame.points, cam)
    by_id = {c.id: c for c in clusters}

    matches = classify_polygons([frame.bboxes[i] for i in person_index], clusters, model)
    hulls: dict[int, Polygon2D] = {}
    detections = []
    for match in matches:
        if match.cluster_id not in hulls:
            hulls[match.cluster_id] = hull_or_centroid(
                by_id[match.cluster_id].points, params.hull_mode, params.concave_k
            )
        detection = to_detection(match, person_index[match.bbox_index], hulls[match.cluster_id])
        if detection is not None:
            detections.append(detection)

    logger.debug(
        "Fusion done",
        t=frame.timestamp,
        clusters=len(clusters),
        bboxes=len(person_index),
        detections=len(detections),
    )
    return detections
