"""Controller module - composes the Legal, Context and Proximity layers."""

from .decisions import (
    COLUMNS,
    DecisionRow,
    decisions_to_csv,
    read_decisions,
    save_decisions,
    to_row,
    write_decisions,
)
from .layers import (
    DEFAULT_LEGAL_KPH,
    LayerSpeeds,
    RoadSegment,
    SpeedDecision,
    compose_speed,
    legal_speed,
)
from .speed_controller import ControllerConfig, SpeedController, process_frame

__all__ = [
    # Layers
    "DEFAULT_LEGAL_KPH",
    "LayerSpeeds",
    "RoadSegment",
    "SpeedDecision",
    "compose_speed",
    "legal_speed",
    # Controller
    "ControllerConfig",
    "SpeedController",
    "process_frame",
    # Decision stream
    "COLUMNS",
    "DecisionRow",
    "decisions_to_csv",
    "read_decisions",
    "save_decisions",
    "to_row",
    "write_decisions",
]
