"""Scenario logs - file format, synthetic generation and replay evaluation."""

from .evaluate import (
    EvalReport,
    SweepRow,
    config_for_scenario,
    difference_bin,
    evaluate,
    sweep,
    write_report,
    write_sweep,
)
from .generator import GenSpec, PedestrianScript, SpeedKnot, envelope_bbox, generate_scenario, make_benchmark_frame
from .io import GroundTruth, ScenarioFile, load_scenario, save_scenario

__all__ = [
    # Files
    "GroundTruth",
    "ScenarioFile",
    "load_scenario",
    "save_scenario",
    # Generation
    "GenSpec",
    "PedestrianScript",
    "SpeedKnot",
    "envelope_bbox",
    "generate_scenario",
    "make_benchmark_frame",
    # Evaluation
    "EvalReport",
    "SweepRow",
    "config_for_scenario",
    "difference_bin",
    "evaluate",
    "sweep",
    "write_report",
    "write_sweep",
]
