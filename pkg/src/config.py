"""Configuration for the Contextual Speed Controller."""

import logging
import sys
from pathlib import Path

import structlog
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(env_prefix="CSC_", case_sensitive=False)

    # Server
    host: str = "0.0.0.0"
    port: int = 8001
    debug: bool = False

    # Inputs (None = bundled default)
    profile_path: Path | None = None
    range_height_model_path: Path | None = None
    camera_path: Path | None = None
    legal_limit_kph: float = 40.0

    # Fusion
    cluster_distance: float = 0.5
    min_cluster_size: int = 5
    hull_mode: str = "convex"  # convex | concave
    concave_k: int = 8
    person_height_m: float = 1.7
    height_tolerance_px: float = 60.0

    # Proximity layer
    scaling_factor: float = 3.0
    ttc_s: float = 3.0
    speed_law: str = "ttc"  # ttc | braking
    decel_mps2: float = 2.0
    max_range_m: float = 15.0
    range_mode: str = "additive"  # additive | replacement


def configure_logging(debug: bool = False) -> None:
    """Configure structlog once for the service and the CLI."""
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer() if debug else structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.DEBUG if debug else logging.INFO
        ),
        context_class=dict,
        # stderr keeps CSV output on stdout clean
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=True,
    )


settings = Settings()
