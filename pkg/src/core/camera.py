"""Pinhole projection between the body frame and image UV coordinates."""

import numpy as np

from .types import CameraModel, Point3, PointUV


def to_camera_frame(points: np.ndarray, cam: CameraModel) -> np.ndarray:
    """Body-frame (N, 3) points into the camera frame."""
    return points @ cam.R.T + cam.t


def project_points(points: np.ndarray, cam: CameraModel) -> tuple[np.ndarray, np.ndarray]:
    """
    Vectorised projection of an (N, 3) body-frame cloud.

    Returns:
        (uv, valid): uv is (N, 2) with NaN rows where the point is behind
        the camera; valid is the boolean mask of rows with a UV.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    cam_pts = to_camera_frame(points, cam)
    depth = cam_pts[:, 2]
    valid = depth > 0.0

    uv = np.full((points.shape[0], 2), np.nan)
    z = depth[valid]
    uv[valid, 0] = cam.fx * (cam_pts[valid, 0] / z) + cam.cx
    uv[valid, 1] = cam.fy * (cam_pts[valid, 1] / z) + cam.cy
    return uv, valid


def project_point(p: Point3, cam: CameraModel) -> PointUV | None:
    """Project one point; None when it sits at or behind the image plane."""
    uv, valid = project_points(p.as_array()[np.newaxis, :], cam)
    if not valid[0]:
        return None
    return PointUV(float(uv[0, 0]), float(uv[0, 1]))


def project_cloud(points: list[Point3], cam: CameraModel) -> list[tuple[Point3, PointUV | None]]:
    """Element-wise project_point, order and length preserved (the XYZUV cloud)."""
    if not points:
        return []
    array = np.array([p.as_array() for p in points])
    uv, valid = project_points(array, cam)
    return [
        (p, PointUV(float(uv[i, 0]), float(uv[i, 1])) if valid[i] else None)
        for i, p in enumerate(points)
    ]


def back_project(uv: PointUV, depth: float, cam: CameraModel) -> Point3:
    """Inverse of project_point for a known camera-frame depth."""
    cam_pt = np.array(
        [
            (uv.u - cam.cx) / cam.fx * depth,
            (uv.v - cam.cy) / cam.fy * depth,
            depth,
        ]
    )
    return Point3.from_array(cam.R.T @ (cam_pt - cam.t))
