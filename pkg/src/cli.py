"""Command-line surface: replay, generate, build profiles, compare, sweep, bench.

Exit code 0 on success, 2 on any validation failure.
"""

import argparse
import statistics
import sys
import time
from pathlib import Path
from typing import Iterable

import structlog

from .config import Settings, configure_logging, settings
from .context import build_speed_profile, samples_from_frames, write_speed_histogram
from .controller import SpeedController, save_decisions, read_decisions, write_decisions
from .core import CameraModel
from .errors import SpeedControllerError
from .fusion import CameraHeightModel, FusionParams, detect_pedestrians_3d, fit_range_height_model
from .scenario import (
    GenSpec,
    config_for_scenario,
    evaluate,
    generate_scenario,
    load_scenario,
    make_benchmark_frame,
    save_scenario,
    sweep,
    write_report,
    write_sweep,
)

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2


def _overrides(args: argparse.Namespace) -> Settings:
    """Settings with this invocation's flags applied."""
    update = {
        "profile_path": getattr(args, "profile", None),
        "range_height_model_path": getattr(args, "model", None),
        "scaling_factor": getattr(args, "scaling_factor", None),
        "ttc_s": getattr(args, "ttc", None),
        "speed_law": getattr(args, "speed_law", None),
        "range_mode": getattr(args, "range_mode", None),
        "hull_mode": getattr(args, "hull_mode", None),
        "decel_mps2": getattr(args, "decel", None),
        "max_range_m": getattr(args, "max_range", None),
    }
    return settings.model_copy(update={k: v for k, v in update.items() if v is not None})


# ========== subcommands ==========


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    controller = SpeedController(config_for_scenario(scenario, _overrides(args)))
    decisions = controller.run(scenario.frames)
    if str(args.out) == "-":
        write_decisions(decisions, sys.stdout)
    else:
        save_decisions(decisions, args.out)
        logger.info("Decisions written", out=str(args.out), frames=len(decisions))
    return EXIT_OK


def cmd_gen_scenario(args: argparse.Namespace) -> int:
    spec = GenSpec.model_validate_json(Path(args.spec).read_text()) if args.spec else GenSpec()
    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    scenario = generate_scenario(spec)
    save_scenario(scenario, args.out, blob_threshold=args.blob_threshold)
    return EXIT_OK


def cmd_build_profile(args: argparse.Namespace) -> int:
    samples = []
    for path in args.input:
        samples.extend(samples_from_frames(load_scenario(path).frames))
    profile = build_speed_profile(samples)
    profile.save(args.out)
    if args.hist:
        write_speed_histogram(profile, args.hist)
    logger.info("Profile written", out=str(args.out), samples=len(samples))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    report = evaluate(read_decisions(args.decisions), scenario)
    write_report(report, args.out)
    return EXIT_OK


def cmd_fit_model(args: argparse.Namespace) -> int:
    """Fit the height-vs-range trendline from a generated scenario's ground truth."""
    scenario = load_scenario(args.scenario)
    samples = []
    for truth in scenario.ground_truth:
        if truth.bbox_index is None or not truth.in_lidar:
            continue
        bbox = scenario.frames[truth.frame].bboxes[truth.bbox_index]
        samples.append((truth.position.norm, bbox.height))
    model = fit_range_height_model(samples, clip_sigma=args.clip_sigma)
    model.save(args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    rows = sweep(scenario, config_for_scenario(scenario, _overrides(args)), args.factors)
    write_sweep(rows, args.out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    cam = CameraModel.default()
    frame = make_benchmark_frame(seed=args.seed, cam=cam)
    model = CameraHeightModel(cam)
    params = FusionParams.from_settings(_overrides(args))

    timings = []
    for _ in range(args.runs):
        start = time.perf_counter()
        detect_pedestrians_3d(frame, cam, model, params)
        timings.append((time.perf_counter() - start) * 1000.0)

    median = statistics.median(timings)
    logger.info(
        "Fusion benchmark",
        points=int(frame.points.shape[0]),
        bboxes=len(frame.bboxes),
        runs=args.runs,
        median_ms=round(median, 3),
    )
    print(f"median_ms={median:.3f}")
    return EXIT_OK


# ========== parser ==========


def _add_controller_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--profile", type=Path, default=None, help="Speed profile CSV (default: built-in)")
    parser.add_argument("--model", type=Path, default=None, help="Range-height model file (default: from camera)")
    parser.add_argument("--scaling-factor", type=float, default=None, help="Lateral scaling factor")
    parser.add_argument("--ttc", type=float, default=None, help="Time-to-collision budget [s]")
    parser.add_argument("--speed-law", choices=["ttc", "braking"], default=None)
    parser.add_argument("--range-mode", choices=["additive", "replacement"], default=None)
    parser.add_argument("--hull-mode", choices=["convex", "concave"], default=None)
    parser.add_argument("--decel", type=float, default=None, help="Braking deceleration for the braking law [m/s^2]")
    parser.add_argument("--max-range", type=float, default=None, help="Detections beyond this range are ignored [m]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csc", description=__doc__)
    parser.add_argument("--debug", action="store_true", help="Human-readable DEBUG logs")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Replay a scenario through the controller")
    run.add_argument("--scenario", type=Path, required=True)
    run.add_argument("--out", type=Path, required=True, help="Decision CSV, '-' for stdout")
    run.add_argument("--seed", type=int, default=None, help="Accepted for uniformity; replay is deterministic")
    _add_controller_flags(run)
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen-scenario", help="Generate a synthetic scenario")
    gen.add_argument("--spec", type=Path, default=None, help="GenSpec JSON (default: all defaults)")
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--seed", type=int, default=None, help="Overrides the spec's seed")
    gen.add_argument("--blob-threshold", type=int, default=None, help="Side-load clouds above N points")
    gen.set_defaults(func=cmd_gen_scenario)

    build = sub.add_parser("build-profile", help="Build a speed profile from scenario logs")
    build.add_argument("--input", type=Path, nargs="+", required=True)
    build.add_argument("--out", "--output", dest="out", type=Path, required=True)
    build.add_argument("--hist", type=Path, default=None, help="Also write the speed histogram CSV")
    build.set_defaults(func=cmd_build_profile)

    compare = sub.add_parser("compare", help="Score a decision CSV against the driver")
    compare.add_argument("--decisions", type=Path, required=True)
    compare.add_argument("--scenario", type=Path, required=True)
    compare.add_argument("--out", type=Path, required=True, help="Report directory")
    compare.set_defaults(func=cmd_compare)

    fit = sub.add_parser("fit-model", help="Fit the bbox height-vs-range model")
    fit.add_argument("--scenario", type=Path, required=True)
    fit.add_argument("--out", type=Path, required=True)
    fit.add_argument("--clip-sigma", type=float, default=None)
    fit.set_defaults(func=cmd_fit_model)

    sw = sub.add_parser("sweep", help="Replay at several lateral scaling factors")
    sw.add_argument("--scenario", type=Path, required=True)
    sw.add_argument("--factors", type=float, nargs="+", default=[2.0, 3.0, 5.0])
    sw.add_argument("--out", type=Path, required=True)
    _add_controller_flags(sw)
    sw.set_defaults(func=cmd_sweep)

    bench = sub.add_parser("bench", help="Median fusion latency on a dense synthetic frame")
    bench.add_argument("--runs", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--hull-mode", choices=["convex", "concave"], default=None)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Iterable[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.debug or settings.debug)
    try:
        return args.func(args)
    except (SpeedControllerError, ValueError, FileNotFoundError) as e:
        logger.error("Command failed", command=args.command, error=str(e))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
