"""Pydantic schemas for API requests and responses."""

from pydantic import BaseModel, ConfigDict, Field

from ..fusion import MatchKind
from ..scenario.records import FrameRecord


class DecideRequest(FrameRecord):
    """One frame, in the same shape as a scenario `frame` record (inline points only)."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "timestamp": 0.0,
                "vehicle": {"speed": 12.0, "wheel_angle": 0.0, "wheelbase": 2.5},
                "road_type": "shared",
                "points": [[6.0, 0.0, 0.5], [6.0, 0.1, 0.9], [6.1, 0.0, 1.3]],
                "bboxes": [{"u_min": 590, "v_min": 280, "u_max": 690, "v_max": 540}],
            }
        }
    )


class LayerSpeedsResponse(BaseModel):
    legal: float = Field(..., description="Posted limit [KPH]")
    context: float = Field(..., description="Pedestrian-density speed [KPH]")
    proximity: float | None = Field(None, description="Nearest-pedestrian speed [KPH], absent if none")


class DetectionResponse(BaseModel):
    """A pedestrian validated in 3D."""

    x: float
    y: float
    z: float
    range: float = Field(..., description="Meters from the body origin")
    bbox_index: int = Field(..., description="Index into the request's bboxes")
    cluster_id: int
    match_kind: MatchKind
    overlap_fraction: float
    z_score: float = Field(..., description="Bbox-height residual in residual-std units")
    hull: list[tuple[float, float]] = Field(default_factory=list, description="Ground footprint (x, y) vertices")


class DecisionResponse(BaseModel):
    """Response body for /decide."""

    timestamp: float
    layers: LayerSpeedsResponse
    final: float = Field(..., description="Minimum of the present layers [KPH]")
    governing_layers: list[str]
    n_2d: int = Field(..., description="Person bboxes in view")
    n_3d: int = Field(..., description="Pedestrians validated in 3D")
    driver_speed: float | None = None
    detections: list[DetectionResponse]


class ProfileBinResponse(BaseModel):
    context: str
    bin: str = Field(..., description="Pedestrian count bin, e.g. '0-2' or '9+'")
    mean_kph: float | None
    sample_count: int


class ProfileResponse(BaseModel):
    """The speed lookup table in use."""

    bins: list[ProfileBinResponse]


class HealthResponse(BaseModel):
    """Response body for /health."""

    status: str = Field(..., description="'healthy' or 'degraded'")
    controller_loaded: bool
    scaling_factor: float | None = None
    ttc_s: float | None = None
    legal_limit_kph: float | None = None
