"""Pydantic records of the line-delimited scenario format.

One JSON object per line: a single `header` record first, then `frame`
records in timestamp order.
"""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from ..core import ObjectClass, RoadType

FORMAT_VERSION = 1


class CameraRecord(BaseModel):
    """Pinhole intrinsics plus body->camera extrinsic."""

    model_config = ConfigDict(extra="forbid")

    fx: float = Field(..., gt=0)
    fy: float = Field(..., gt=0)
    cx: float
    cy: float
    image_width: int = Field(..., gt=0)
    image_height: int = Field(..., gt=0)
    rotation: list[list[float]] = Field(
        default=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        description="3x3 body->camera rotation, row-major",
    )
    translation: list[float] = Field(default=[0.0, 0.0, 0.0], min_length=3, max_length=3)


class SegmentRecord(BaseModel):
    """Road segment with its posted limit."""

    model_config = ConfigDict(extra="forbid")

    name: str
    legal_limit_kph: float = Field(default=40.0, ge=0)


class GroundTruthRecord(BaseModel):
    """Where a generated pedestrian really was in one frame."""

    model_config = ConfigDict(extra="forbid")

    frame: int = Field(..., ge=0)
    pedestrian_id: int = Field(..., ge=0)
    x: float
    y: float
    z: float
    bbox_index: int | None = None
    in_lidar: bool = True


class HeaderRecord(BaseModel):
    """Scenario-wide data, first line of the file."""

    model_config = ConfigDict(extra="forbid")

    record: Literal["header"] = "header"
    version: int = FORMAT_VERSION
    description: str = ""
    camera: CameraRecord
    segments: list[SegmentRecord] = []
    default_legal_kph: float = Field(default=40.0, ge=0)
    seed: int | None = None
    ground_truth: list[GroundTruthRecord] = []


class VehicleRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    speed: float = Field(..., ge=0, description="KPH")
    wheel_angle: float = Field(default=0.0, gt=-1.5707963267948966, lt=1.5707963267948966)
    wheelbase: float = Field(default=2.5, gt=0)


class BBoxRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u_min: float
    v_min: float
    u_max: float
    v_max: float
    class_label: ObjectClass = ObjectClass.PERSON
    confidence: float = Field(default=1.0, ge=0, le=1)


class FrameRecord(BaseModel):
    """One time step."""

    model_config = ConfigDict(extra="forbid")

    record: Literal["frame"] = "frame"
    timestamp: float
    vehicle: VehicleRecord
    road_type: RoadType = RoadType.REGULAR
    segment: str | None = None
    driver_speed: float | None = Field(default=None, ge=0)
    points: list[tuple[float, float, float]] = []
    points_file: str | None = Field(
        default=None, description="Side-loaded .npy cloud, relative to the scenario file"
    )
    bboxes: list[BBoxRecord] = []


ScenarioRecord = Annotated[Union[HeaderRecord, FrameRecord], Field(discriminator="record")]
record_adapter: TypeAdapter[HeaderRecord | FrameRecord] = TypeAdapter(ScenarioRecord)
