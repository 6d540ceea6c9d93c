"""Per-frame Contextual Speed Controller."""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

import structlog

from ..config import Settings
from ..context import DEFAULT_PROFILE, SpeedProfile, context_speed
from ..core import CameraModel, SceneFrame
from ..errors import MissingBin
from ..fusion import (
    CameraHeightModel,
    FusionParams,
    HeightModel,
    RangeHeightModel,
    detect_pedestrians_3d,
)
from ..proximity import ProximityParams, proximity_speed
from .layers import DEFAULT_LEGAL_KPH, LayerSpeeds, RoadSegment, SpeedDecision, compose_speed, legal_speed

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ControllerConfig:
    """Everything process_frame needs besides the frame."""

    camera: CameraModel
    profile: SpeedProfile = DEFAULT_PROFILE
    range_height_model: HeightModel | None = None  # None = derived from the camera
    fusion: FusionParams = FusionParams()
    proximity: ProximityParams = ProximityParams()
    segments: dict[str, RoadSegment] = field(default_factory=dict)
    default_legal_kph: float = DEFAULT_LEGAL_KPH

    def __post_init__(self) -> None:
        if self.range_height_model is None:
            object.__setattr__(self, "range_height_model", CameraHeightModel(self.camera))

    @classmethod
    def from_settings(
        cls,
        settings: Settings,
        camera: CameraModel | None = None,
        segments: Iterable[RoadSegment] = (),
    ) -> "ControllerConfig":
        """Build from settings; explicit camera/segments win over settings files."""
        if camera is None:
            camera = (
                CameraModel.from_dict(json.loads(Path(settings.camera_path).read_text()))
                if settings.camera_path
                else CameraModel.default()
            )
        profile = SpeedProfile.load(settings.profile_path) if settings.profile_path else DEFAULT_PROFILE
        model = (
            RangeHeightModel.load(settings.range_height_model_path)
            if settings.range_height_model_path
            else CameraHeightModel(camera, settings.person_height_m, settings.height_tolerance_px)
        )
        return cls(
            camera=camera,
            profile=profile,
            range_height_model=model,
            fusion=FusionParams.from_settings(settings),
            proximity=ProximityParams.from_settings(settings),
            segments={s.name: s for s in segments},
            default_legal_kph=settings.legal_limit_kph,
        )

    def with_scaling_factor(self, factor: float) -> "ControllerConfig":
        return replace(self, proximity=replace(self.proximity, lateral_scaling_factor=factor))


def process_frame(frame: SceneFrame, config: ControllerConfig) -> SpeedDecision:
    """
    Run fusion and the three layers on one frame and take their minimum.

    Missing data degrades instead of raising: no bboxes means density 0, no
    points means the proximity layer stays inactive.
    """
    segment = config.segments.get(frame.segment) if frame.segment else None
    legal = legal_speed(segment, config.default_legal_kph)

    n_2d = frame.pedestrian_count
    try:
        context = context_speed(config.profile, frame.road_type, n_2d)
    except MissingBin as e:
        logger.warning("Context bin missing, using legal limit", t=frame.timestamp, error=str(e))
        context = legal

    detections = detect_pedestrians_3d(
        frame, config.camera, config.range_height_model, config.fusion
    )
    proximity = proximity_speed(detections, frame.vehicle, config.proximity)

    layers = LayerSpeeds(legal=legal, context=context, proximity=proximity)
    decision = SpeedDecision(
        timestamp=frame.timestamp,
        layers=layers,
        final=compose_speed(layers),
        n_2d=n_2d,
        n_3d=len(detections),
        driver_speed=frame.driver_speed,
        detections=tuple(detections),
    )
    logger.debug(
        "Frame processed",
        t=frame.timestamp,
        legal=legal,
        context=context,
        proximity=proximity,
        final=decision.final,
        n_2d=n_2d,
        n_3d=decision.n_3d,
    )
    return decision


class SpeedController:
    """Stateless controller bound to one configuration."""

    def __init__(self, config: ControllerConfig):
        self.config = config

    def process(self, frame: SceneFrame) -> SpeedDecision:
        return process_frame(frame, self.config)

    def replay(self, frames: Iterable[SceneFrame]) -> Iterator[SpeedDecision]:
        """Decisions in frame order."""
        for frame in frames:
            yield self.process(frame)

    def run(self, frames: Iterable[SceneFrame]) -> list[SpeedDecision]:
        decisions = list(self.replay(frames))
        logger.info(
            "Replay finished",
            frames=len(decisions),
            proximity_active=sum(d.layers.proximity is not None for d in decisions),
        )
        return decisions
