"""Fusion module - 3D pedestrian detection from LIDAR clusters and 2D person boxes."""

from .clustering import Cluster, euclidean_cluster
from .hull import HullMode, concave_hull, convex_hull, ground_hull, hull_or_centroid
from .matching import MatchKind, MatchResult, classify_polygons, get_overlap
from .pipeline import FusionParams, PedestrianDetection3D, detect_pedestrians_3d, project_clusters
from .sanity import (
    CameraHeightModel,
    HeightModel,
    RangeHeightModel,
    bbox_in_bounds,
    fit_range_height_model,
    height_z_score,
    in_bounds_mask,
)

__all__ = [
    # Clustering
    "Cluster",
    "euclidean_cluster",
    # Hulls
    "HullMode",
    "concave_hull",
    "convex_hull",
    "ground_hull",
    "hull_or_centroid",
    # Matching
    "MatchKind",
    "MatchResult",
    "classify_polygons",
    "get_overlap",
    # Sanity check
    "CameraHeightModel",
    "HeightModel",
    "RangeHeightModel",
    "bbox_in_bounds",
    "fit_range_height_model",
    "height_z_score",
    "in_bounds_mask",
    # Pipeline
    "FusionParams",
    "PedestrianDetection3D",
    "detect_pedestrians_3d",
    "project_clusters",
]
