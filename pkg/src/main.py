"""Contextual Speed Controller Service - FastAPI entrypoint."""

from contextlib import asynccontextmanager

import structlog
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from .api.routes import register_controller, router
from .config import configure_logging, settings
from .controller import ControllerConfig, SpeedController
from .errors import SpeedControllerError

configure_logging(settings.debug)

logger = structlog.get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan manager - loads the controller configuration."""
    logger.info(
        "Starting Speed Controller Service",
        profile=str(settings.profile_path) if settings.profile_path else "default",
        camera=str(settings.camera_path) if settings.camera_path else "default",
        scaling_factor=settings.scaling_factor,
        ttc_s=settings.ttc_s,
    )

    try:
        config = ControllerConfig.from_settings(settings)
        register_controller(SpeedController(config))
        logger.info("Speed controller ready", legal_limit_kph=config.default_legal_kph)
    except (SpeedControllerError, ValueError, OSError) as e:
        # Keep serving /health so the failure is visible
        logger.error("Failed to load speed controller", error=str(e))

    yield

    logger.info("Shutting down Speed Controller Service")
    register_controller(None)


# Create FastAPI app
app = FastAPI(
    title="Contextual Speed Controller",
    description="Legal, pedestrian-density and pedestrian-proximity speed limits from LIDAR/camera frames",
    version="1.0.0",
    lifespan=lifespan,
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routes
app.include_router(router)


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "src.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
    )
