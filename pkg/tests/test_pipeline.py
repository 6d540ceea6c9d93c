"""Tests for the end-to-end 3D pedestrian detection pipeline."""

import os
import statistics
import time

import numpy as np
import pytest

from src.core import BBox2D, ObjectClass, RoadType, SceneFrame, VehicleState
from src.fusion import CameraHeightModel, FusionParams, HullMode, MatchKind, detect_pedestrians_3d
from src.scenario import envelope_bbox, make_benchmark_frame


def lamppost(x: float, y: float) -> np.ndarray:
    z = (np.arange(10) + 0.5) * 0.3
    return np.array([[x + dx, y + dy, zz] for dx in (-0.05, 0.05) for dy in (-0.05, 0.05) for zz in z])


def frame_of(points, bboxes) -> SceneFrame:
    return SceneFrame(
        timestamp=0.0,
        vehicle=VehicleState(speed=10.0),
        points=points,
        bboxes=tuple(bboxes),
        road_type=RoadType.SHARED,
    )


@pytest.fixture
def camera_model(default_camera) -> CameraHeightModel:
    return CameraHeightModel(default_camera)


class TestDetectPedestrians3D:
    def test_person_detected_lamppost_ignored(self, default_camera, camera_model, person_points):
        cloud = np.concatenate([person_points(6.0, 0.0), lamppost(7.0, 6.0)])
        frame = frame_of(cloud, [envelope_bbox(6.0, 0.0, default_camera)])

        [detection] = detect_pedestrians_3d(frame, default_camera, camera_model)

        assert detection.match_kind == MatchKind.FULL_CLUSTER
        assert detection.source_bbox == 0
        assert detection.points.shape == (40, 3)
        assert detection.position.x == pytest.approx(6.0, abs=0.3)
        assert detection.position.y == pytest.approx(0.0, abs=0.3)
        assert detection.range == pytest.approx(np.hypot(6.0, 0.85))
        assert abs(detection.z_score) < 2.0
        assert len(detection.hull) >= 3

    def test_indices_refer_to_the_full_bbox_list(self, default_camera, camera_model, person_points):
        car = BBox2D(0.0, 0.0, 100.0, 100.0, class_label=ObjectClass.CAR)
        frame = frame_of(
            np.concatenate([person_points(5.0, 1.0), person_points(8.0, -1.5)]),
            [car, envelope_bbox(5.0, 1.0, default_camera), car, envelope_bbox(8.0, -1.5, default_camera)],
        )
        detections = detect_pedestrians_3d(frame, default_camera, camera_model)
        assert [d.source_bbox for d in detections] == [1, 3]
        assert detections[1].position.x == pytest.approx(8.0)

    def test_bbox_without_points_stays_2d(self, default_camera, camera_model, person_points):
        frame = frame_of(
            person_points(5.0, 0.0),
            [envelope_bbox(5.0, 0.0, default_camera), envelope_bbox(30.0, 3.0, default_camera)],
        )
        detections = detect_pedestrians_3d(frame, default_camera, camera_model)
        assert len(detections) == 1
        assert frame.pedestrian_count == 2

    def test_empty_inputs(self, default_camera, camera_model, person_points):
        assert detect_pedestrians_3d(frame_of(np.zeros((0, 3)), [BBox2D(0, 0, 10, 10)]), default_camera, camera_model) == []
        assert detect_pedestrians_3d(frame_of(person_points(5.0, 0.0), []), default_camera, camera_model) == []

    def test_concave_hulls_do_not_change_detections(self, default_camera, camera_model, person_points):
        frame = frame_of(person_points(6.0, 0.5), [envelope_bbox(6.0, 0.5, default_camera)])
        convex = detect_pedestrians_3d(frame, default_camera, camera_model)
        concave = detect_pedestrians_3d(frame, default_camera, camera_model, FusionParams(hull_mode=HullMode.CONCAVE))
        assert [d.position for d in convex] == [d.position for d in concave]

    def test_benchmark_frame_shape(self, default_camera):
        frame = make_benchmark_frame(seed=0, cam=default_camera)
        assert frame.points.shape == (5000, 3)
        assert len(frame.bboxes) == 20
        detections = detect_pedestrians_3d(frame, default_camera, CameraHeightModel(default_camera))
        assert len(detections) == 20
        assert all(len(d.hull) >= 3 for d in detections)


@pytest.mark.perf
@pytest.mark.skipif(os.environ.get("CSC_RUN_PERF") != "1", reason="set CSC_RUN_PERF=1 to run latency checks")
def test_fusion_latency_budget(default_camera):
    frame = make_benchmark_frame(seed=0, cam=default_camera)
    model = CameraHeightModel(default_camera)
    params = FusionParams()

    timings = []
    for _ in range(100):
        start = time.perf_counter()
        detect_pedestrians_3d(frame, default_camera, model, params)
        timings.append((time.perf_counter() - start) * 1000.0)

    assert statistics.median(timings) < 10.0
