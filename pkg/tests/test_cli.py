"""Tests for the command-line surface."""

import io
import json
import sys

import pytest

from src.cli import EXIT_INVALID, EXIT_OK, _overrides, build_parser, main
from src.context import SpeedProfile
from src.fusion import RangeHeightModel


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(
        json.dumps(
            {
                "duration": 2.0,
                "frame_rate": 5.0,
                "random_pedestrians": 5,
                "distractors": 2,
                "far_pedestrians": 1,
                "speed_script": [{"t": 0.0, "kph": 6.0}, {"t": 2.0, "kph": 12.0}],
                "point_jitter": 0.01,
                "bbox_jitter": 1.0,
            }
        )
    )
    return path


@pytest.fixture
def scenario_file(tmp_path, spec_file):
    path = tmp_path / "scene.jsonl"
    assert main(["gen-scenario", "--spec", str(spec_file), "--out", str(path), "--seed", "4"]) == EXIT_OK
    return path


def test_run_is_byte_identical(tmp_path, scenario_file):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        assert main(["run", "--scenario", str(scenario_file), "--scaling-factor", "3", "--ttc", "3", "--out", str(out)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines()[0] == "t,legal_kph,context_kph,proximity_kph,final_kph,n_2d,n_3d,driver_kph"
    assert len(first.read_text().splitlines()) == 11


def test_braking_flags_reach_settings(tmp_path, scenario_file):
    out = tmp_path / "braking.csv"
    argv = ["run", "--scenario", str(scenario_file), "--speed-law", "braking", "--decel", "4", "--max-range", "8", "--out", str(out)]

    settings = _overrides(build_parser().parse_args(argv))
    assert (settings.speed_law, settings.decel_mps2, settings.max_range_m) == ("braking", 4.0, 8.0)

    assert main(argv) == EXIT_OK
    assert len(out.read_text().splitlines()) == 11


def test_run_to_stdout(monkeypatch, scenario_file):
    out = io.StringIO()
    monkeypatch.setattr(sys, "stdout", out)
    assert main(["run", "--scenario", str(scenario_file), "--out", "-"]) == EXIT_OK
    assert out.getvalue().startswith("t,legal_kph")


def test_gen_scenario_seed_changes_output(tmp_path, spec_file):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["gen-scenario", "--spec", str(spec_file), "--out", str(a), "--seed", "1"])
    main(["gen-scenario", "--spec", str(spec_file), "--out", str(b), "--seed", "2"])
    assert a.read_bytes() != b.read_bytes()


def test_invalid_scenario_exits_with_2(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text('{"record": "frame", "timestamp": 0.0, "vehicle": {"speed": 1.0}}\n')
    assert main(["run", "--scenario", str(path), "--out", str(tmp_path / "d.csv")]) == EXIT_INVALID


def test_missing_file_exits_with_2(tmp_path):
    assert main(["run", "--scenario", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "d.csv")]) == EXIT_INVALID


def test_invalid_gen_spec_exits_with_2(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"duration": -1}')
    assert main(["gen-scenario", "--spec", str(spec), "--out", str(tmp_path / "s.jsonl")]) == EXIT_INVALID


def test_build_profile_and_replay_with_it(tmp_path, scenario_file):
    profile, hist = tmp_path / "profile.csv", tmp_path / "hist.csv"
    assert main(["build-profile", "--input", str(scenario_file), "--out", str(profile), "--hist", str(hist)]) == EXIT_OK
    assert sum(sum(c) for c in SpeedProfile.load(profile).sample_counts.values()) == 10
    assert hist.read_text().startswith("context,density_bin")
    assert main(["run", "--scenario", str(scenario_file), "--profile", str(profile), "--out", str(tmp_path / "d.csv")]) == EXIT_OK


def test_compare_writes_report(tmp_path, scenario_file):
    decisions = tmp_path / "d.csv"
    main(["run", "--scenario", str(scenario_file), "--out", str(decisions)])
    assert main(["compare", "--decisions", str(decisions), "--scenario", str(scenario_file), "--out", str(tmp_path / "report")]) == EXIT_OK
    summary = json.loads((tmp_path / "report" / "summary.json").read_text())
    assert summary["frames"] == 10
    assert summary["frames_with_driver"] == 10


def test_fit_model(tmp_path, scenario_file):
    out = tmp_path / "model.txt"
    assert main(["fit-model", "--scenario", str(scenario_file), "--out", str(out), "--clip-sigma", "3"]) == EXIT_OK
    model = RangeHeightModel.load(out)
    assert model.slope > 0
    assert main(["run", "--scenario", str(scenario_file), "--model", str(out), "--out", str(tmp_path / "d.csv")]) == EXIT_OK


def test_sweep(tmp_path, scenario_file):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--scenario", str(scenario_file), "--factors", "2", "3", "5", "--out", str(out)]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 4


def test_bench(monkeypatch):
    out = io.StringIO()
    monkeypatch.setattr(sys, "stdout", out)
    assert main(["bench", "--runs", "3"]) == EXIT_OK
    assert out.getvalue().startswith("median_ms=")
