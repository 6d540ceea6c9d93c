"""Height-vs-range sanity check for bbox/cluster matches."""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import structlog

from ..core import BBox2D, CameraModel, project_points
from ..errors import InsufficientSamples

logger = structlog.get_logger(__name__)

SIGMA_BOUND = 2.0
ZERO_STD_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RangeHeightModel:
    """Linear trendline of bbox pixel height against 1/range."""

    slope: float
    intercept: float
    residual_std: float  # pixels

    def __post_init__(self) -> None:
        if self.residual_std < 0:
            raise ValueError(f"residual_std must be >= 0, got {self.residual_std}")

    def predicted_height(self, range_m: float) -> float:
        return self.slope / range_m + self.intercept

    def residual(self, bbox_height: float, range_m: float) -> float:
        return bbox_height - self.predicted_height(range_m)

    def z_score(self, bbox_height: float, range_m: float) -> float:
        """Residual in units of residual_std (inf/0 when the model is exact)."""
        return _z(self.residual(bbox_height, range_m), self.residual_std)

    def expected_heights(self, bbox: BBox2D, ranges: np.ndarray) -> np.ndarray:
        """Trendline heights at positive ranges; the bbox position plays no part."""
        return self.slope / ranges + self.intercept

    def save(self, path: Path) -> None:
        Path(path).write_text(f"{self.slope!r} {self.intercept!r} {self.residual_std!r}\n")

    @classmethod
    def load(cls, path: Path) -> "RangeHeightModel":
        fields = Path(path).read_text().split()
        if len(fields) != 3:
            raise ValueError(f"{path}: expected 'slope intercept residual_std'")
        slope, intercept, residual_std = (float(f) for f in fields)
        return cls(slope=slope, intercept=intercept, residual_std=residual_std)


@dataclass(frozen=True)
class CameraHeightModel:
    """
    Geometric prior: the bbox span of an upright person standing on the
    ground plane (body z = 0) at the given range.

    The bearing comes from the bbox's centre column, the horizontal distance
    from the range (the cluster centroid sits at half the person's height).
    Head and feet are projected through the camera and clipped to the image,
    so close pedestrians whose feet leave the frame keep a matching prior.
    """

    camera: CameraModel
    person_height: float = 1.7  # meters
    residual_std: float = 60.0  # pixels

    def __post_init__(self) -> None:
        if self.person_height <= 0:
            raise ValueError(f"person_height must be positive, got {self.person_height}")
        if self.residual_std < 0:
            raise ValueError(f"residual_std must be >= 0, got {self.residual_std}")

    def bearing(self, bbox: BBox2D) -> float:
        """Body-frame azimuth (radians, left positive) of the bbox's centre column."""
        cam = self.camera
        u = 0.5 * (bbox.u_min + bbox.u_max)
        ray = cam.R.T @ np.array([(u - cam.cx) / cam.fx, 0.0, 1.0])
        return math.atan2(ray[1], ray[0])

    def expected_heights(self, bbox: BBox2D, ranges: np.ndarray) -> np.ndarray:
        """Visible pixel span at each range; NaN where head or feet fall behind the camera."""
        ranges = np.asarray(ranges, dtype=float)
        half = 0.5 * self.person_height
        ground = np.sqrt(np.maximum(ranges**2 - half**2, 0.0))
        phi = self.bearing(bbox)
        x, y = ground * math.cos(phi), ground * math.sin(phi)

        n = ranges.shape[0]
        feet = np.column_stack([x, y, np.zeros(n)])
        head = np.column_stack([x, y, np.full(n, self.person_height)])
        uv, valid = project_points(np.concatenate([feet, head]), self.camera)
        v = np.clip(uv[:, 1], 0.0, float(self.camera.image_height))
        span = np.abs(v[:n] - v[n:])
        return np.where(valid[:n] & valid[n:], span, np.nan)


HeightModel = RangeHeightModel | CameraHeightModel


def _z(residual: float, std: float) -> float:
    if std == 0:
        return 0.0 if abs(residual) <= ZERO_STD_TOLERANCE else float("inf")
    return residual / std


def _least_squares(inv_range: np.ndarray, heights: np.ndarray) -> tuple[float, float]:
    design = np.column_stack([inv_range, np.ones_like(inv_range)])
    (slope, intercept), *_ = np.linalg.lstsq(design, heights, rcond=None)
    return float(slope), float(intercept)


def fit_range_height_model(
    samples: list[tuple[float, float]],
    clip_sigma: float | None = None,
    max_iterations: int = 5,
) -> RangeHeightModel:
    """
    Least-squares fit of height = slope / range + intercept.

    Args:
        samples: (range meters, bbox height pixels) pairs
        clip_sigma: when set, refit after dropping samples whose residual
            exceeds clip_sigma residual stds, until the kept set is stable
        max_iterations: cap on refits when clipping

    Raises:
        InsufficientSamples: fewer than 3 samples (or kept samples)
    """
    if len(samples) < 3:
        raise InsufficientSamples(f"need >= 3 samples, got {len(samples)}")
    data = np.asarray(samples, dtype=float)
    ranges, heights = data[:, 0], data[:, 1]
    if np.any(ranges <= 0):
        raise ValueError("ranges must be positive")
    inv_range = 1.0 / ranges

    keep = np.ones(len(samples), dtype=bool)
    for _ in range(max_iterations + 1):
        if keep.sum() < 3:
            raise InsufficientSamples(f"only {int(keep.sum())} samples survive clipping")
        slope, intercept = _least_squares(inv_range[keep], heights[keep])
        residuals = heights - (slope * inv_range + intercept)
        std = float(np.std(residuals[keep]))
        if clip_sigma is None:
            break
        new_keep = np.abs(residuals) <= clip_sigma * std if std > 0 else keep
        if np.array_equal(new_keep, keep):
            break
        keep = new_keep

    model = RangeHeightModel(slope=slope, intercept=intercept, residual_std=std)
    logger.info(
        "Range-height model fitted",
        samples=len(samples),
        kept=int(keep.sum()),
        slope=round(slope, 3),
        intercept=round(intercept, 3),
        residual_std=round(std, 3),
    )
    return model


def in_bounds_mask(bbox: BBox2D, ranges: np.ndarray, model: HeightModel) -> np.ndarray:
    """True where the bbox height sits within 2 residual stds of the model at that range."""
    ranges = np.asarray(ranges, dtype=float)
    mask = ranges > 0
    expected = model.expected_heights(bbox, np.where(mask, ranges, 1.0))
    residual = np.abs(bbox.height - expected)
    if model.residual_std == 0:
        return mask & (residual <= ZERO_STD_TOLERANCE)
    return mask & (residual <= SIGMA_BOUND * model.residual_std)


def bbox_in_bounds(bbox: BBox2D, range_m: float, model: HeightModel) -> bool:
    return bool(in_bounds_mask(bbox, np.array([range_m]), model)[0])


def height_z_score(bbox: BBox2D, range_m: float, model: HeightModel) -> float:
    """Bbox-height residual at range_m in residual stds; inf when the model has no prediction."""
    if range_m <= 0:
        return float("inf")
    expected = float(model.expected_heights(bbox, np.array([range_m]))[0])
    if math.isnan(expected):
        return float("inf")
    return _z(bbox.height - expected, model.residual_std)
