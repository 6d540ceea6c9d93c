"""API routes for the speed controller service."""

from pathlib import Path

from fastapi import APIRouter, HTTPException

from ..controller import SpeedController
from ..errors import SpeedControllerError
from ..scenario.io import frame_from_record
from .schemas import (
    DecideRequest,
    DecisionResponse,
    DetectionResponse,
    HealthResponse,
    LayerSpeedsResponse,
    ProfileBinResponse,
    ProfileResponse,
)

router = APIRouter()

# Controller instance (set by main.py on startup)
_controller: SpeedController | None = None


def register_controller(controller: SpeedController | None) -> None:
    """Register (or clear, with None) the controller instance."""
    global _controller
    _controller = controller


def get_controller() -> SpeedController:
    """Get the controller or raise if not loaded."""
    if _controller is None:
        raise HTTPException(status_code=503, detail="Speed controller not loaded")
    return _controller


@router.post("/decide", response_model=DecisionResponse)
async def decide(request: DecideRequest) -> DecisionResponse:
    """
    Run fusion and the Legal, Context and Proximity layers on one frame.

    Side-loaded point files are not accepted over HTTP; send points inline.
    """
    controller = get_controller()
    if request.points_file is not None:
        raise HTTPException(status_code=422, detail="points_file is not supported, send points inline")

    try:
        frame = frame_from_record(request, Path("."))
        decision = controller.process(frame)
    except (SpeedControllerError, ValueError) as e:
        raise HTTPException(status_code=422, detail=str(e))

    return DecisionResponse(
        timestamp=decision.timestamp,
        layers=LayerSpeedsResponse(
            legal=decision.layers.legal,
            context=decision.layers.context,
            proximity=decision.layers.proximity,
        ),
        final=decision.final,
        governing_layers=decision.governing_layers,
        n_2d=decision.n_2d,
        n_3d=decision.n_3d,
        driver_speed=decision.driver_speed,
        detections=[
            DetectionResponse(
                x=d.position.x,
                y=d.position.y,
                z=d.position.z,
                range=d.range,
                bbox_index=d.source_bbox,
                cluster_id=d.cluster_id,
                match_kind=d.match_kind,
                overlap_fraction=d.overlap_fraction,
                z_score=d.z_score,
                hull=list(d.hull),
            )
            for d in decision.detections
        ],
    )


@router.get("/profile", response_model=ProfileResponse)
async def get_profile() -> ProfileResponse:
    """Speed profile the context layer looks up."""
    controller = get_controller()
    return ProfileResponse(
        bins=[
            ProfileBinResponse(context=context.value, bin=dbin.label, mean_kph=mean, sample_count=count)
            for context, dbin, mean, count in controller.config.profile.rows()
        ]
    )


@router.get("/health", response_model=HealthResponse)
async def health_check() -> HealthResponse:
    """Check service health."""
    if _controller is None:
        return HealthResponse(status="degraded", controller_loaded=False)

    config = _controller.config
    return HealthResponse(
        status="healthy",
        controller_loaded=True,
        scaling_factor=config.proximity.lateral_scaling_factor,
        ttc_s=config.proximity.ttc,
        legal_limit_kph=config.default_legal_kph,
    )
