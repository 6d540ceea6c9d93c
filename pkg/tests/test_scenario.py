"""Tests for scenario files and the synthetic scenario generator."""

import json
import math

import numpy as np
import pytest

from src.controller import ControllerConfig, SpeedController
from src.core import CameraModel, RoadType
from src.errors import ScenarioParseError, ScenarioValidationError
from src.fusion import CameraHeightModel, detect_pedestrians_3d
from src.scenario import (
    GenSpec,
    PedestrianScript,
    SpeedKnot,
    generate_scenario,
    load_scenario,
    save_scenario,
)

CAMERA = CameraModel.default().to_dict()


def write_lines(path, *records) -> None:
    path.write_text("".join(json.dumps(r) + "\n" for r in records))


def header(**extra) -> dict:
    return {"record": "header", "camera": CAMERA, **extra}


def standing(x: float, y: float) -> GenSpec:
    """One motionless pedestrian seen by a stopped vehicle."""
    return GenSpec(duration=0.1, pedestrians=[PedestrianScript(x=x, y=y)], speed_script=[SpeedKnot(t=0.0, kph=0.0)])


def frame(t: float, **extra) -> dict:
    return {"record": "frame", "timestamp": t, "vehicle": {"speed": 10.0}, **extra}


def assert_same_scenario(a, b) -> None:
    assert a.camera == b.camera
    assert a.segments == b.segments
    assert a.default_legal_kph == b.default_legal_kph
    assert a.seed == b.seed
    assert a.ground_truth == b.ground_truth
    assert len(a.frames) == len(b.frames)
    for fa, fb in zip(a.frames, b.frames):
        assert fa.timestamp == fb.timestamp
        assert fa.vehicle == fb.vehicle
        assert fa.bboxes == fb.bboxes
        assert fa.road_type == fb.road_type
        assert fa.driver_speed == fb.driver_speed
        assert fa.segment == fb.segment
        assert np.array_equal(fa.points, fb.points)


class TestLoad:
    def test_minimal_file(self, tmp_path):
        path = tmp_path / "minimal.jsonl"
        write_lines(path, header(), frame(0.0))
        scenario = load_scenario(path)
        assert len(scenario.frames) == 1
        assert scenario.frames[0].points.shape == (0, 3)
        assert scenario.frames[0].road_type == RoadType.REGULAR

    def test_decreasing_timestamps_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_lines(path, header(), frame(1.0), frame(0.5))
        with pytest.raises(ScenarioValidationError) as excinfo:
            load_scenario(path)
        assert excinfo.value.invariant == "timestamps_increasing"

    def test_malformed_record_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(header()) + "\n" + '{"record": "frame", "timestamp": \n')
        with pytest.raises(ScenarioParseError) as excinfo:
            load_scenario(path)
        assert excinfo.value.line == 2

    def test_unknown_field_is_a_parse_error(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_lines(path, header(), frame(0.0, lidar="velodyne"))
        with pytest.raises(ScenarioParseError):
            load_scenario(path)

    @pytest.mark.parametrize(
        "records, invariant",
        [
            ([frame(0.0)], "header_first"),
            ([header(), header()], "single_header"),
            ([header(), frame(0.0, segment="gate")], "segment_defined"),
            (
                [header(segments=[{"name": "a"}, {"name": "a"}])],
                "unique_segments",
            ),
            ([header(), frame(0.0, bboxes=[{"u_min": 5, "v_min": 0, "u_max": 1, "v_max": 1}])], "frame_valid"),
        ],
    )
    def test_invariant_violations(self, tmp_path, records, invariant):
        path = tmp_path / "bad.jsonl"
        write_lines(path, *records)
        with pytest.raises(ScenarioValidationError) as excinfo:
            load_scenario(path)
        assert excinfo.value.invariant == invariant

    def test_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "spaced.jsonl"
        path.write_text(json.dumps(header()) + "\n\n" + json.dumps(frame(0.0)) + "\n")
        assert len(load_scenario(path).frames) == 1


class TestRoundTrip:
    @pytest.fixture
    def scenario(self):
        spec = GenSpec(
            duration=1.0,
            frame_rate=5.0,
            random_pedestrians=4,
            far_pedestrians=2,
            distractors=2,
            point_jitter=0.01,
            bbox_jitter=1.5,
            seed=21,
        )
        return generate_scenario(spec)

    def test_save_then_load(self, tmp_path, scenario):
        path = tmp_path / "scene.jsonl"
        save_scenario(scenario, path)
        assert_same_scenario(load_scenario(path), scenario)

    def test_load_then_save_is_byte_identical(self, tmp_path, scenario):
        first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_scenario(scenario, first)
        save_scenario(load_scenario(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_side_loaded_point_blobs(self, tmp_path, scenario):
        path = tmp_path / "scene.jsonl"
        save_scenario(scenario, path, blob_threshold=10)
        assert (tmp_path / "scene.jsonl.blobs").is_dir()
        assert '"points_file":"scene.jsonl.blobs/000000.npy"' in path.read_text()
        assert_same_scenario(load_scenario(path), scenario)


class TestGenerator:
    def test_same_seed_same_file(self, tmp_path):
        spec = GenSpec(duration=1.0, random_pedestrians=5, bbox_jitter=2.0, point_jitter=0.02, seed=9)
        save_scenario(generate_scenario(spec), tmp_path / "a.jsonl")
        save_scenario(generate_scenario(spec), tmp_path / "b.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_no_pedestrians_gives_empty_frames(self):
        scenario = generate_scenario(GenSpec(duration=1.0, frame_rate=10.0))
        assert len(scenario.frames) == 10
        assert all(f.points.shape == (0, 3) and f.bboxes == () for f in scenario.frames)
        assert scenario.ground_truth == ()

    def test_timestamps_and_speed_script(self):
        spec = GenSpec(
            duration=2.0,
            frame_rate=2.0,
            speed_script=[SpeedKnot(t=0.0, kph=0.0), SpeedKnot(t=1.0, kph=10.0)],
        )
        scenario = generate_scenario(spec)
        assert [f.timestamp for f in scenario.frames] == [0.0, 0.5, 1.0, 1.5]
        assert [f.vehicle.speed for f in scenario.frames] == [0.0, 5.0, 10.0, 10.0]
        assert all(f.driver_speed == f.vehicle.speed for f in scenario.frames)

    def test_pedestrian_point_columns(self):
        scenario = generate_scenario(GenSpec(duration=0.1, pedestrians=[PedestrianScript(x=5.0, y=0.0)]))
        points = scenario.frames[0].points
        assert points.shape[0] % 4 == 0 and 20 <= points.shape[0] <= 60
        assert np.all(np.abs(points[:, 0] - 5.0) <= 0.25)
        assert np.all((points[:, 2] > 0.0) & (points[:, 2] < 1.7))

    def test_far_pedestrians_have_boxes_but_no_points(self):
        scenario = generate_scenario(GenSpec(duration=0.1, far_pedestrians=3, seed=2))
        assert scenario.frames[0].points.shape == (0, 3)
        assert len(scenario.frames[0].bboxes) == 3
        assert all(not g.in_lidar for g in scenario.ground_truth)

    def test_static_pedestrian_detected_at_its_range(self):
        spec = GenSpec(
            duration=1.0,
            pedestrians=[PedestrianScript(x=5.0, y=0.0)],
            speed_script=[SpeedKnot(t=0.0, kph=0.0)],
        )
        scenario = generate_scenario(spec)
        model = CameraHeightModel(scenario.camera)
        for f in scenario.frames:
            [detection] = detect_pedestrians_3d(f, scenario.camera, model)
            assert abs(detection.range - 5.0) <= 0.2

    def test_noiseless_recall_and_position_error(self):
        spec = GenSpec(
            duration=1.0,
            frame_rate=5.0,
            random_pedestrians=6,
            distractors=3,
            speed_script=[SpeedKnot(t=0.0, kph=0.0)],
            seed=17,
        )
        scenario = generate_scenario(spec)
        model = CameraHeightModel(scenario.camera)

        checked = 0
        for index, f in enumerate(scenario.frames):
            detections = {d.source_bbox: d for d in detect_pedestrians_3d(f, scenario.camera, model)}
            for truth in scenario.ground_truth_for(index):
                if truth.bbox_index is None or not truth.in_lidar or truth.position.norm > 15.0:
                    continue
                detection = detections[truth.bbox_index]
                error = math.dist(
                    (detection.position.x, detection.position.y, detection.position.z),
                    (truth.position.x, truth.position.y, truth.position.z),
                )
                assert error <= 0.3
                checked += 1
        assert checked > 0

    @pytest.mark.parametrize("x, y", [(1.5, 0.0), (2.0, -0.9), (3.0, 2.8), (6.0, -5.5)])
    def test_near_and_frustum_edge_pedestrians_are_detected(self, x, y):
        scenario = generate_scenario(standing(x, y))
        [truth] = scenario.ground_truth_for(0)
        assert truth.bbox_index is not None

        model = CameraHeightModel(scenario.camera)
        detections = detect_pedestrians_3d(scenario.frames[0], scenario.camera, model)

        [detection] = [d for d in detections if d.source_bbox == truth.bbox_index]
        # Bboxes of near pedestrians are clipped at the image floor, so only
        # the ground-plane position is reliable
        assert math.dist((detection.position.x, detection.position.y), (x, y)) <= 0.3

    def test_closer_pedestrian_never_raises_speed(self):
        finals = []
        for x in (6.0, 3.0, 2.0, 1.5):
            scenario = generate_scenario(standing(x, 0.0))
            decision = SpeedController(ControllerConfig(camera=scenario.camera)).run(scenario.frames)[0]
            assert decision.layers.proximity is not None
            finals.append(decision.final)
        assert finals == sorted(finals, reverse=True)
        assert finals[-1] < 14.7

    def test_gen_spec_validation(self):
        with pytest.raises(ValueError):
            GenSpec(duration=0.0)
        with pytest.raises(ValueError):
            GenSpec(min_ahead=10.0, max_ahead=5.0)
        with pytest.raises(ValueError):
            GenSpec(speed_script=[SpeedKnot(t=2.0, kph=1.0), SpeedKnot(t=1.0, kph=1.0)])
