"""Layer composition: legal, context and proximity speeds -> final speed."""

from dataclasses import dataclass, field

from ..fusion import PedestrianDetection3D

DEFAULT_LEGAL_KPH = 40.0


@dataclass(frozen=True)
class RoadSegment:
    """Stretch of road with a posted limit."""

    name: str
    legal_limit_kph: float = DEFAULT_LEGAL_KPH

    def __post_init__(self) -> None:
        if self.legal_limit_kph < 0:
            raise ValueError(f"legal limit must be >= 0, got {self.legal_limit_kph}")


@dataclass(frozen=True)
class LayerSpeeds:
    """Output of each layer for one frame, KPH. Proximity is None when inactive."""

    legal: float
    context: float
    proximity: float | None = None

    def __post_init__(self) -> None:
        for name in ("legal", "context", "proximity"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} speed must be >= 0, got {value}")

    def present(self) -> dict[str, float]:
        values = {"legal": self.legal, "context": self.context}
        if self.proximity is not None:
            values["proximity"] = self.proximity
        return values


@dataclass(frozen=True)
class SpeedDecision:
    """Per-frame controller record."""

    timestamp: float
    layers: LayerSpeeds
    final: float
    n_2d: int  # person bboxes in view
    n_3d: int  # pedestrians validated in 3D
    driver_speed: float | None = None
    detections: tuple[PedestrianDetection3D, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.final != min(self.layers.present().values()):
            raise ValueError(f"final {self.final} is not the minimum of {self.layers}")
        # Each person bbox validates at most one detection
        if self.n_3d > self.n_2d:
            raise ValueError(f"n_3d ({self.n_3d}) exceeds n_2d ({self.n_2d})")

    @property
    def governing_layers(self) -> list[str]:
        """Layers whose value equals the final speed (ties included)."""
        return [name for name, value in self.layers.present().items() if value == self.final]


def compose_speed(layers: LayerSpeeds) -> float:
    """Final speed: the minimum of every present layer."""
    return min(layers.present().values())


def legal_speed(segment: RoadSegment | None, default: float = DEFAULT_LEGAL_KPH) -> float:
    """Posted limit of the frame's segment, or the default when unconfigured."""
    if segment is None:
        return default
    return segment.legal_limit_kph
