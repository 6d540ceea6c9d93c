"""Domain errors raised by the speed controller."""


class SpeedControllerError(Exception):
    """Base class for every error the controller raises on purpose."""


class DegenerateCluster(SpeedControllerError):
    """Fewer than 3 distinct (or only collinear) ground-plane points."""


class InsufficientSamples(SpeedControllerError):
    """Not enough samples to fit a model."""


class MissingBin(SpeedControllerError):
    """The speed profile holds no mean for the queried (context, bin)."""

    def __init__(self, context: str, bin_index: int):
        super().__init__(f"No speed for context '{context}' bin {bin_index}")
        self.context = context
        self.bin_index = bin_index


class BehindVehicle(SpeedControllerError):
    """Detection lies behind the vehicle along its path."""


class ScenarioParseError(SpeedControllerError):
    """A scenario record could not be parsed."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ScenarioValidationError(SpeedControllerError):
    """A scenario parsed but breaks one of its invariants."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class MismatchedStreams(SpeedControllerError):
    """Decision stream and scenario frames do not line up."""
