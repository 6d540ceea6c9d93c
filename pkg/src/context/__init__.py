"""Context layer - pedestrian-density speed lookup."""

from .profile import (
    DENSITY_BINS,
    DEFAULT_PROFILE,
    DensityBin,
    ProfileContext,
    ProfileSample,
    SpeedProfile,
    build_speed_profile,
    context_speed,
    density_bin,
    discretise_speed,
    samples_from_frames,
    speed_histogram,
    write_speed_histogram,
)

__all__ = [
    "DENSITY_BINS",
    "DEFAULT_PROFILE",
    "DensityBin",
    "ProfileContext",
    "ProfileSample",
    "SpeedProfile",
    "build_speed_profile",
    "context_speed",
    "density_bin",
    "discretise_speed",
    "samples_from_frames",
    "speed_histogram",
    "write_speed_histogram",
]
