"""Tests for layer composition and per-frame decisions."""

import numpy as np
import pytest

from src.context import ProfileSample, build_speed_profile
from src.controller import (
    ControllerConfig,
    LayerSpeeds,
    RoadSegment,
    SpeedController,
    SpeedDecision,
    compose_speed,
    decisions_to_csv,
    legal_speed,
    process_frame,
    read_decisions,
    save_decisions,
    to_row,
)
from src.core import BBox2D, RoadType, SceneFrame, VehicleState
from src.scenario import GenSpec, PedestrianScript, SpeedKnot, generate_scenario


def empty_frame(road_type=RoadType.SHARED, bboxes=(), segment=None, t=0.0) -> SceneFrame:
    return SceneFrame(
        timestamp=t,
        vehicle=VehicleState(speed=12.0),
        points=np.zeros((0, 3)),
        bboxes=tuple(bboxes),
        road_type=road_type,
        segment=segment,
    )


@pytest.fixture
def config(default_camera) -> ControllerConfig:
    return ControllerConfig(camera=default_camera)


@pytest.fixture
def crowd_scenario():
    spec = GenSpec(
        duration=2.0,
        frame_rate=5.0,
        random_pedestrians=6,
        distractors=2,
        speed_script=[SpeedKnot(t=0.0, kph=8.0), SpeedKnot(t=2.0, kph=14.0)],
        seed=3,
    )
    return generate_scenario(spec)


class TestCompose:
    @pytest.mark.parametrize(
        "layers, expected",
        [
            (LayerSpeeds(legal=40.0, context=14.7), 14.7),
            (LayerSpeeds(legal=40.0, context=13.0, proximity=8.0), 8.0),
            (LayerSpeeds(legal=10.0, context=14.7, proximity=12.0), 10.0),
        ],
    )
    def test_minimum_of_present_layers(self, layers, expected):
        assert compose_speed(layers) == expected

    def test_dropping_proximity_never_lowers_final(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            legal, context, proximity = rng.uniform(0.0, 50.0, size=3)
            with_proximity = compose_speed(LayerSpeeds(legal, context, proximity))
            assert compose_speed(LayerSpeeds(legal, context)) >= with_proximity

    def test_negative_layer_speed_rejected(self):
        with pytest.raises(ValueError):
            LayerSpeeds(legal=40.0, context=-1.0)

    def test_legal_speed(self):
        assert legal_speed(RoadSegment("campus", 40.0)) == 40.0
        assert legal_speed(None) == 40.0
        assert legal_speed(RoadSegment("woonerf", 10.0)) == 10.0

    def test_decision_invariants(self):
        with pytest.raises(ValueError):
            SpeedDecision(0.0, LayerSpeeds(40.0, 14.7), final=20.0, n_2d=0, n_3d=0)
        with pytest.raises(ValueError):
            SpeedDecision(0.0, LayerSpeeds(40.0, 14.7), final=14.7, n_2d=1, n_3d=2)
        decision = SpeedDecision(0.0, LayerSpeeds(14.7, 14.7), final=14.7, n_2d=0, n_3d=0)
        assert decision.governing_layers == ["legal", "context"]


class TestProcessFrame:
    def test_empty_shared_frame_uses_first_density_bin(self, config):
        decision = process_frame(empty_frame(), config)
        assert decision.final == 14.7
        assert decision.layers.proximity is None
        assert (decision.n_2d, decision.n_3d) == (0, 0)

    def test_crowd_without_3d_validation(self, config):
        boxes = [BBox2D(10.0 * i, 0.0, 10.0 * i + 5.0, 20.0) for i in range(7)]
        decision = process_frame(empty_frame(bboxes=boxes), config)
        assert decision.final == 11.1
        assert (decision.n_2d, decision.n_3d) == (7, 0)

    def test_on_path_pedestrian_governs(self, config):
        spec = GenSpec(
            duration=0.1,
            frame_rate=10.0,
            pedestrians=[PedestrianScript(x=6.0, y=0.0)],
            speed_script=[SpeedKnot(t=0.0, kph=10.0)],
        )
        [frame] = generate_scenario(spec).frames
        decision = process_frame(frame, config)

        assert decision.layers.context == 14.7
        assert decision.layers.proximity == pytest.approx(7.2)
        assert decision.final == pytest.approx(7.2)
        assert decision.governing_layers == ["proximity"]
        assert (decision.n_2d, decision.n_3d) == (1, 1)

    def test_segment_limit_governs(self, default_camera):
        config = ControllerConfig(camera=default_camera, segments={"gate": RoadSegment("gate", 5.0)})
        assert process_frame(empty_frame(segment="gate"), config).final == 5.0
        assert process_frame(empty_frame(segment="other"), config).final == 14.7

    def test_missing_profile_bin_falls_back_to_legal(self, default_camera):
        profile = build_speed_profile([ProfileSample(18.0, 0, RoadType.REGULAR)])
        config = ControllerConfig(camera=default_camera, profile=profile, default_legal_kph=30.0)
        decision = process_frame(empty_frame(road_type=RoadType.SHARED), config)
        assert decision.layers.context == 30.0
        assert decision.final == 30.0


class TestReplay:
    def test_invariants_hold_on_every_frame(self, config, crowd_scenario):
        for decision in SpeedController(config).run(crowd_scenario.frames):
            assert decision.final <= min(decision.layers.present().values())
            assert decision.n_3d <= decision.n_2d

    def test_replay_is_bit_identical(self, config, crowd_scenario):
        first = decisions_to_csv(SpeedController(config).run(crowd_scenario.frames))
        second = decisions_to_csv(SpeedController(config).run(crowd_scenario.frames))
        assert first == second

    def test_final_monotone_in_scaling_factor(self, config, crowd_scenario):
        runs = [
            SpeedController(config.with_scaling_factor(k)).run(crowd_scenario.frames)
            for k in (2.0, 3.0, 5.0)
        ]
        for low, mid, high in zip(*runs):
            assert low.final <= mid.final <= high.final

    def test_decision_csv_round_trip(self, tmp_path, config, crowd_scenario):
        decisions = SpeedController(config).run(crowd_scenario.frames)
        path = tmp_path / "decisions.csv"
        assert save_decisions(decisions, path) == len(decisions)
        assert read_decisions(path) == [to_row(d) for d in decisions]

    def test_read_rejects_unexpected_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,speed\n0.0,1.0\n")
        with pytest.raises(ValueError):
            read_decisions(path)
