"""Euclidean clustering of the LIDAR cloud into anonymous objects."""

from dataclasses import dataclass

import numpy as np
import structlog
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..core import Point3, as_point_array

logger = structlog.get_logger(__name__)

NEIGHBOURS = 8  # per-point neighbour list of the hop graph


@dataclass(frozen=True, eq=False)
class Cluster:
    """A group of nearby points, optionally carrying its XYZUV projection."""

    id: int
    points: np.ndarray  # (K, 3)
    centroid: Point3
    range: float  # meters, body origin to centroid
    member_indices: np.ndarray  # rows of the source cloud
    projected: np.ndarray | None = None  # (K, 2) UV, NaN where behind the camera
    projected_valid: np.ndarray | None = None  # (K,) bool

    def __post_init__(self) -> None:
        if self.points.shape[0] == 0:
            raise ValueError("Cluster needs at least one point")
        if self.range < 0:
            raise ValueError(f"Cluster range must be >= 0, got {self.range}")

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_projected(self) -> bool:
        return self.projected is not None


def make_cluster(cluster_id: int, points: np.ndarray, member_indices: np.ndarray) -> Cluster:
    centroid = Point3.from_array(points.mean(axis=0))
    return Cluster(
        id=cluster_id,
        points=points,
        centroid=centroid,
        range=centroid.norm,
        member_indices=member_indices,
    )


def _merge_saturated(
    cloud: np.ndarray,
    labels: np.ndarray,
    saturated: np.ndarray,
    distance_threshold: float,
) -> np.ndarray:
    """
    Join components linked by an edge the k-nearest query left out.

    A skipped edge (p, q) within the threshold means both p and q had a
    full neighbour list, so only saturated points need a second look.
    """
    sat = np.flatnonzero(saturated)
    groups, inverse = np.unique(labels[sat], return_inverse=True)
    if groups.size < 2:
        return labels

    order = np.argsort(inverse, kind="stable")
    members = np.split(sat[order], np.cumsum(np.bincount(inverse))[:-1])
    lo = np.array([cloud[m].min(axis=0) for m in members]) - distance_threshold
    hi = np.array([cloud[m].max(axis=0) for m in members]) + distance_threshold
    # Bounding boxes grown by the threshold must overlap for any link to exist
    near = np.all((lo[:, None, :] <= hi[None, :, :]) & (lo[None, :, :] <= hi[:, None, :]), axis=2)
    first, second = np.nonzero(np.triu(near, k=1))
    if first.size == 0:
        return labels

    trees: dict[int, cKDTree] = {}

    def tree(i: int) -> cKDTree:
        if i not in trees:
            trees[i] = cKDTree(cloud[members[i]])
        return trees[i]

    linked = [
        (i, j)
        for i, j in zip(first.tolist(), second.tolist())
        if tree(i).count_neighbors(tree(j), distance_threshold) > 0
    ]
    if not linked:
        return labels

    a, b = np.array(linked).T
    graph = csr_matrix((np.ones(a.size, dtype=np.int8), (a, b)), shape=(groups.size, groups.size))
    n_merged, merged = connected_components(graph, directed=False)
    # Each merged set takes its smallest original label
    smallest = np.full(n_merged, labels.max() + 1)
    np.minimum.at(smallest, merged, groups)
    remap = np.arange(labels.max() + 1)
    remap[groups] = smallest[merged]
    return remap[labels]


def euclidean_cluster(
    points: np.ndarray,
    distance_threshold: float = 0.5,
    min_cluster_size: int = 5,
) -> list[Cluster]:
    """
    Single-link clustering: two points share a cluster iff a chain of hops,
    each no longer than distance_threshold, connects them.

    Clusters below min_cluster_size are dropped. Output is ordered by each
    cluster's smallest member index; ids follow that order.
    """
    if distance_threshold <= 0:
        raise ValueError(f"distance_threshold must be positive, got {distance_threshold}")
    if min_cluster_size < 1:
        raise ValueError(f"min_cluster_size must be >= 1, got {min_cluster_size}")

    cloud = as_point_array(points)
    n = cloud.shape[0]
    if n == 0:
        return []

    # Hop graph from a bounded k-nearest query; dense clouds would otherwise
    # produce every pair inside the threshold
    k = min(NEIGHBOURS + 1, n)
    tree = cKDTree(cloud)
    dist, idx = tree.query(cloud, k=k, distance_upper_bound=np.nextafter(distance_threshold, np.inf))
    dist, idx = dist.reshape(n, k), idx.reshape(n, k)
    near = dist <= distance_threshold
    rows = np.broadcast_to(np.arange(n)[:, None], (n, k))[near]
    graph = csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, idx[near])), shape=(n, n))
    n_components, labels = connected_components(graph, directed=False)
    if k < n:
        labels = _merge_saturated(cloud, labels, near[:, -1], distance_threshold)

    # Group rows by label; stable sort keeps members in input order
    order = np.argsort(labels, kind="stable")
    counts = np.bincount(labels)
    groups = np.split(order, np.cumsum(counts)[:-1])
    groups = [g for g in groups if g.size >= min_cluster_size]
    groups.sort(key=lambda g: int(g[0]))

    clusters = [make_cluster(i, cloud[g], g) for i, g in enumerate(groups)]
    logger.debug(
        "Cloud clustered",
        points=n,
        components=int(n_components),
        clusters=len(clusters),
    )
    return clusters
