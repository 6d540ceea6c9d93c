"""Bbox-to-cluster matching (polygon classification) on the XYZUV cloud."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..core import BBox2D
from .clustering import Cluster
from .sanity import HeightModel, height_z_score, in_bounds_mask

FULL_CLUSTER_OVERLAP = 0.8
PARTIAL_POINTS_OVERLAP = 0.3


class MatchKind(str, Enum):
    """How much of the cluster a match validates."""

    FULL_CLUSTER = "full_cluster"
    PARTIAL_POINTS = "partial_points"


@dataclass(frozen=True, eq=False)
class MatchResult:
    """One bbox validated against one cluster."""

    bbox_index: int
    cluster_id: int
    overlap_fraction: float
    overlapped_count: int
    validated_points: np.ndarray  # (M, 3)
    match_kind: MatchKind
    z_score: float = 0.0  # bbox-height residual in residual stds


def get_overlap(bbox: BBox2D, cluster: Cluster) -> tuple[float, np.ndarray]:
    """
    Fraction of the cluster's projectable points that land inside the bbox,
    with those points. Points behind the camera never count.
    """
    if not cluster.is_projected:
        raise ValueError(f"Cluster {cluster.id} has no UV projection")
    inside = bbox.contains(cluster.projected) & cluster.projected_valid
    n_valid = int(cluster.projected_valid.sum())
    overlapped = cluster.points[inside]
    if n_valid == 0:
        return 0.0, overlapped
    return overlapped.shape[0] / n_valid, overlapped


def classify_polygons(
    bboxes: list[BBox2D],
    clusters: list[Cluster],
    model: HeightModel,
) -> list[MatchResult]:
    """
    Match each bbox independently to its best in-bounds cluster.

    Overlap above 0.8 validates the whole cluster, above 0.3 only the
    overlapped points, anything else leaves the bbox unmatched. A cluster
    may validate several bboxes; a bbox validates at most one cluster.
    Ties on overlap go to the lower cluster id. Results are ordered by
    bbox index.
    """
    if not bboxes or not clusters:
        return []
    for cluster in clusters:
        if not cluster.is_projected:
            raise ValueError(f"Cluster {cluster.id} has no UV projection")

    # Flatten the XYZUV clusters once; per-bbox overlap becomes a bincount
    sizes = np.array([c.size for c in clusters])
    owner = np.repeat(np.arange(len(clusters)), sizes)
    uv = np.concatenate([c.projected for c in clusters])
    valid = np.concatenate([c.projected_valid for c in clusters])
    n_valid = np.bincount(owner[valid], minlength=len(clusters))
    ids = np.array([c.id for c in clusters])
    ranges = np.array([c.range for c in clusters])

    results = []
    for index, bbox in enumerate(bboxes):
        inside = bbox.contains(uv) & valid
        counts = np.bincount(owner[inside], minlength=len(clusters))
        overlap = np.divide(
            counts, n_valid, out=np.zeros(len(clusters)), where=n_valid > 0
        )
        candidate = (overlap > 0.0) & in_bounds_mask(bbox, ranges, model)
        if not candidate.any():
            continue
        best_overlap = overlap[candidate].max()
        if best_overlap <= PARTIAL_POINTS_OVERLAP:
            continue
        tied = np.flatnonzero(candidate & (overlap == best_overlap))
        best = clusters[int(tied[np.argmin(ids[tied])])]

        fraction, overlapped = get_overlap(bbox, best)
        if fraction > FULL_CLUSTER_OVERLAP:
            kind, validated = MatchKind.FULL_CLUSTER, best.points
        else:
            kind, validated = MatchKind.PARTIAL_POINTS, overlapped
        results.append(
            MatchResult(
                bbox_index=index,
                cluster_id=best.id,
                overlap_fraction=fraction,
                overlapped_count=int(overlapped.shape[0]),
                validated_points=validated,
                match_kind=kind,
                z_score=height_z_score(bbox, best.range, model),
            )
        )
    return results
