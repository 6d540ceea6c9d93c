"""Load and save scenario logs."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import structlog
from pydantic import ValidationError

from ..controller import RoadSegment
from ..core import BBox2D, CameraModel, Point3, SceneFrame, VehicleState
from ..errors import ScenarioParseError, ScenarioValidationError
from .records import (
    BBoxRecord,
    CameraRecord,
    FrameRecord,
    GroundTruthRecord,
    HeaderRecord,
    SegmentRecord,
    VehicleRecord,
    record_adapter,
)

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class GroundTruth:
    """Generator ground truth for one pedestrian in one frame."""

    frame: int
    pedestrian_id: int
    position: Point3  # body frame, body centre
    bbox_index: int | None = None
    in_lidar: bool = True


@dataclass(eq=False)
class ScenarioFile:
    """A validated scenario: header data plus ordered frames."""

    camera: CameraModel
    frames: list[SceneFrame]
    segments: tuple[RoadSegment, ...] = ()
    default_legal_kph: float = 40.0
    seed: int | None = None
    description: str = ""
    ground_truth: tuple[GroundTruth, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        names = [s.name for s in self.segments]
        if len(set(names)) != len(names):
            raise ScenarioValidationError("unique_segments", f"duplicate segment names in {names}")
        for i in range(1, len(self.frames)):
            if not self.frames[i].timestamp > self.frames[i - 1].timestamp:
                raise ScenarioValidationError(
                    "timestamps_increasing",
                    f"frame {i} at t={self.frames[i].timestamp} "
                    f"follows t={self.frames[i - 1].timestamp}",
                )
        known = set(names)
        for i, frame in enumerate(self.frames):
            if frame.segment is not None and frame.segment not in known:
                raise ScenarioValidationError(
                    "segment_defined", f"frame {i} names unknown segment '{frame.segment}'"
                )

    def ground_truth_for(self, frame_index: int) -> list[GroundTruth]:
        return [g for g in self.ground_truth if g.frame == frame_index]


# ========== record <-> domain ==========


def camera_from_record(record: CameraRecord) -> CameraModel:
    return CameraModel.from_dict(record.model_dump())


def camera_to_record(cam: CameraModel) -> CameraRecord:
    return CameraRecord(**cam.to_dict())


def frame_from_record(record: FrameRecord, base_dir: Path) -> SceneFrame:
    if record.points_file is not None:
        points = np.load(base_dir / record.points_file)
    else:
        points = np.array(record.points, dtype=float).reshape(-1, 3)
    return SceneFrame(
        timestamp=record.timestamp,
        vehicle=VehicleState(**record.vehicle.model_dump()),
        points=points,
        bboxes=tuple(BBox2D(**b.model_dump()) for b in record.bboxes),
        road_type=record.road_type,
        driver_speed=record.driver_speed,
        segment=record.segment,
    )


def frame_to_record(frame: SceneFrame, points_file: str | None = None) -> FrameRecord:
    return FrameRecord(
        timestamp=frame.timestamp,
        vehicle=VehicleRecord(
            speed=frame.vehicle.speed,
            wheel_angle=frame.vehicle.wheel_angle,
            wheelbase=frame.vehicle.wheelbase,
        ),
        road_type=frame.road_type,
        segment=frame.segment,
        driver_speed=frame.driver_speed,
        points=[] if points_file else [tuple(p) for p in frame.points.tolist()],
        points_file=points_file,
        bboxes=[
            BBoxRecord(
                u_min=b.u_min,
                v_min=b.v_min,
                u_max=b.u_max,
                v_max=b.v_max,
                class_label=b.class_label,
                confidence=b.confidence,
            )
            for b in frame.bboxes
        ],
    )


def header_to_record(scenario: ScenarioFile) -> HeaderRecord:
    return HeaderRecord(
        description=scenario.description,
        camera=camera_to_record(scenario.camera),
        segments=[
            SegmentRecord(name=s.name, legal_limit_kph=s.legal_limit_kph) for s in scenario.segments
        ],
        default_legal_kph=scenario.default_legal_kph,
        seed=scenario.seed,
        ground_truth=[
            GroundTruthRecord(
                frame=g.frame,
                pedestrian_id=g.pedestrian_id,
                x=g.position.x,
                y=g.position.y,
                z=g.position.z,
                bbox_index=g.bbox_index,
                in_lidar=g.in_lidar,
            )
            for g in scenario.ground_truth
        ],
    )


def _scenario_from_records(
    header: HeaderRecord, frames: list[SceneFrame]
) -> ScenarioFile:
    return ScenarioFile(
        camera=camera_from_record(header.camera),
        frames=frames,
        segments=tuple(RoadSegment(s.name, s.legal_limit_kph) for s in header.segments),
        default_legal_kph=header.default_legal_kph,
        seed=header.seed,
        description=header.description,
        ground_truth=tuple(
            GroundTruth(
                frame=g.frame,
                pedestrian_id=g.pedestrian_id,
                position=Point3(g.x, g.y, g.z),
                bbox_index=g.bbox_index,
                in_lidar=g.in_lidar,
            )
            for g in header.ground_truth
        ),
    )


# ========== files ==========


def load_scenario(path: Path) -> ScenarioFile:
    """
    Parse and validate a scenario file.

    Raises:
        ScenarioParseError: malformed record (with its line number)
        ScenarioValidationError: a scenario invariant fails
    """
    path = Path(path)
    header: HeaderRecord | None = None
    frames: list[SceneFrame] = []

    with path.open() as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = record_adapter.validate_json(line)
            except ValidationError as e:
                raise ScenarioParseError(str(e.errors()[0]["msg"]), line_no) from e

            if isinstance(record, HeaderRecord):
                if header is not None:
                    raise ScenarioValidationError("single_header", f"second header on line {line_no}")
                header = record
                continue
            if header is None:
                raise ScenarioValidationError("header_first", f"frame on line {line_no} precedes the header")
            try:
                frames.append(frame_from_record(record, path.parent))
            except (ValueError, OSError) as e:
                raise ScenarioValidationError("frame_valid", f"line {line_no}: {e}") from e

    if header is None:
        raise ScenarioValidationError("header_first", f"{path} has no header record")
    try:
        scenario = _scenario_from_records(header, frames)
    except ValueError as e:
        raise ScenarioValidationError("header_valid", str(e)) from e

    logger.info("Scenario loaded", path=str(path), frames=len(frames))
    return scenario


def save_scenario(scenario: ScenarioFile, path: Path, blob_threshold: int | None = None) -> None:
    """
    Write a scenario as JSON lines.

    Clouds larger than blob_threshold points go to `<name>.blobs/NNNNNN.npy`
    next to the file, referenced by `points_file`.
    """
    path = Path(path)
    blob_dir = path.parent / f"{path.name}.blobs"

    with path.open("w") as handle:
        handle.write(header_to_record(scenario).model_dump_json() + "\n")
        for index, frame in enumerate(scenario.frames):
            points_file = None
            if blob_threshold is not None and frame.points.shape[0] > blob_threshold:
                blob_dir.mkdir(exist_ok=True)
                points_file = f"{blob_dir.name}/{index:06d}.npy"
                np.save(path.parent / points_file, np.asarray(frame.points))
            handle.write(frame_to_record(frame, points_file).model_dump_json() + "\n")

    logger.info("Scenario saved", path=str(path), frames=len(scenario.frames))
