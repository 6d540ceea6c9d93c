"""Ground-plane polygons around clusters: convex by default, k-NN concave on request."""

import math
from enum import Enum

import numpy as np
import shapely
from scipy.spatial import ConvexHull, QhullError
from shapely.geometry import Polygon

from ..errors import DegenerateCluster

Polygon2D = tuple[tuple[float, float], ...]


class HullMode(str, Enum):
    """Polygon extraction strategy."""

    CONVEX = "convex"
    CONCAVE = "concave"


def _canonical(vertices: np.ndarray) -> Polygon2D:
    """CCW, starting at the lowest (then leftmost) vertex."""
    x, y = vertices[:, 0], vertices[:, 1]
    signed_area = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    if signed_area < 0:
        vertices = vertices[::-1]
    start = int(np.lexsort((vertices[:, 0], vertices[:, 1]))[0])
    vertices = np.roll(vertices, -start, axis=0)
    return tuple((float(u), float(v)) for u, v in vertices)


def _ground_points(points: np.ndarray) -> np.ndarray:
    xy = np.unique(np.asarray(points, dtype=float).reshape(-1, 3)[:, :2], axis=0)
    if xy.shape[0] < 3:
        raise DegenerateCluster(f"{xy.shape[0]} distinct ground-plane points")
    if np.linalg.matrix_rank(xy - xy[0], tol=1e-9) < 2:
        raise DegenerateCluster("ground-plane points are collinear")
    return xy


def convex_hull(xy: np.ndarray) -> Polygon2D:
    """
    Convex hull of (x, y) rows; duplicates are fine.

    Raises:
        DegenerateCluster: fewer than 3 distinct or only collinear points
    """
    xy = np.asarray(xy, dtype=float)
    if xy.shape[0] < 3:
        raise DegenerateCluster(f"{xy.shape[0]} ground-plane points")
    try:
        hull = ConvexHull(xy)
    except QhullError as e:
        raise DegenerateCluster("ground-plane points span no area") from e
    # scipy returns 2D hull vertices counter-clockwise
    return _canonical(xy[hull.vertices])


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def _segments_cross(p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> bool:
    """Proper intersection only; shared endpoints do not count."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def _knn_hull_attempt(xy: np.ndarray, k: int) -> np.ndarray | None:
    n = xy.shape[0]
    first = int(np.lexsort((xy[:, 0], xy[:, 1]))[0])
    available = np.ones(n, dtype=bool)
    available[first] = False
    hull = [first]
    current = first
    back_angle = math.pi  # virtual previous vertex to the left of the start
    step = 2

    while True:
        if step == 5:
            available[first] = True
        candidates = np.flatnonzero(available)
        if candidates.size == 0:
            break
        dist = np.hypot(*(xy[candidates] - xy[current]).T)
        nearest = candidates[np.argsort(dist, kind="stable")[:k]]
        delta = xy[nearest] - xy[current]
        turn = (np.arctan2(delta[:, 1], delta[:, 0]) - back_angle) % (2 * math.pi)
        turn[turn == 0.0] = 2 * math.pi

        chosen = None
        for c in nearest[np.argsort(turn, kind="stable")]:
            closing = c == first
            start = 1 if closing else 0
            if not any(
                _segments_cross(xy[current], xy[c], xy[hull[i]], xy[hull[i + 1]])
                for i in range(start, len(hull) - 2)
            ):
                chosen = int(c)
                break
        if chosen is None:
            return None
        if chosen == first:
            break
        back = xy[current] - xy[chosen]
        back_angle = math.atan2(back[1], back[0])
        hull.append(chosen)
        available[chosen] = False
        current = chosen
        step += 1

    if len(hull) < 3:
        return None
    vertices = xy[hull]
    polygon = Polygon(vertices)
    if not polygon.is_valid:
        return None
    if not shapely.covers(polygon.buffer(1e-9), shapely.points(xy)).all():
        return None
    return vertices


def concave_hull(xy: np.ndarray, k: int = 8) -> Polygon2D:
    """k-nearest-neighbour concave hull, widening k until every point is enclosed."""
    n = xy.shape[0]
    if n == 3:
        return _canonical(xy)
    kk = min(max(k, 3), n - 1)
    while kk < n:
        vertices = _knn_hull_attempt(xy, kk)
        if vertices is not None:
            return _canonical(vertices)
        kk += 1
    return convex_hull(xy)


def ground_hull(points: np.ndarray, mode: HullMode = HullMode.CONVEX, k: int = 8) -> Polygon2D:
    """
    Polygon around a cluster's (x, y) footprint.

    Raises:
        DegenerateCluster: fewer than 3 distinct or only collinear ground points
    """
    if HullMode(mode) == HullMode.CONCAVE:
        return concave_hull(_ground_points(points), k)
    return convex_hull(np.asarray(points, dtype=float).reshape(-1, 3)[:, :2])


def hull_or_centroid(points: np.ndarray, mode: HullMode = HullMode.CONVEX, k: int = 8) -> Polygon2D:
    """ground_hull, falling back to the single centroid vertex for degenerate clusters."""
    try:
        return ground_hull(points, mode, k)
    except DegenerateCluster:
        centre = np.asarray(points, dtype=float).reshape(-1, 3)[:, :2].mean(axis=0)
        return ((float(centre[0]), float(centre[1])),)
