"""Synthetic scenarios with known ground truth.

Every generated person is a lattice of LIDAR points filling a
0.5 m x 0.5 m x 1.7 m body envelope, and its bbox is the camera projection of
that envelope, so fusion results can be checked against the generator's own
geometry.
"""

import math

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..controller import RoadSegment
from ..core import BBox2D, CameraModel, ObjectClass, Point3, RoadType, SceneFrame, VehicleState
from ..core.camera import project_points
from .io import GroundTruth, ScenarioFile, camera_from_record
from .records import CameraRecord

logger = structlog.get_logger(__name__)

BODY_HALF_WIDTH = 0.25
BODY_HEIGHT = 1.7
POST_HALF_WIDTH = 0.1
POST_HEIGHT = 3.0
LATTICE_OFFSET = 0.125  # x/y lattice inside the body, +-offset around the centre
MIN_LEVELS, MAX_LEVELS = 5, 15  # 4 columns x levels = 20-60 points


class SpeedKnot(BaseModel):
    """Vehicle speed script point; linear between knots."""

    t: float = Field(..., ge=0)
    kph: float = Field(..., ge=0)


class PedestrianScript(BaseModel):
    """World-frame pedestrian (world = body frame at t = 0), constant velocity."""

    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0


class GenSpec(BaseModel):
    """Scenario generation parameters."""

    model_config = ConfigDict(extra="forbid")

    duration: float = Field(default=10.0, gt=0, description="seconds")
    frame_rate: float = Field(default=10.0, gt=0, description="Hz")
    road_type: RoadType = RoadType.SHARED
    segment_name: str = "default"
    legal_limit_kph: float = Field(default=40.0, ge=0)

    speed_script: list[SpeedKnot] = [SpeedKnot(t=0.0, kph=10.0)]
    wheel_angle: float = Field(default=0.0, gt=-1.0, lt=1.0)
    wheelbase: float = Field(default=2.5, gt=0)

    pedestrians: list[PedestrianScript] = []
    random_pedestrians: int = Field(default=0, ge=0)
    min_ahead: float = Field(default=3.0, gt=0)
    max_ahead: float = Field(default=14.0, gt=0)
    lateral_ratio: float = Field(default=0.5, ge=0, description="|y| <= ratio * x")
    min_separation: float = Field(default=1.0, gt=0)
    avoid_image_overlap: bool = True
    far_pedestrians: int = Field(default=0, ge=0, description="bbox only, beyond LIDAR range")
    distractors: int = Field(default=0, ge=0, description="posts with points but no bbox")
    lidar_range: float = Field(default=20.0, gt=0)

    point_jitter: float = Field(default=0.0, ge=0, description="meters, 1 sigma")
    bbox_jitter: float = Field(default=0.0, ge=0, description="pixels, 1 sigma")

    camera: CameraRecord | None = None
    seed: int = 0

    @model_validator(mode="after")
    def check_ranges(self) -> "GenSpec":
        if self.max_ahead < self.min_ahead:
            raise ValueError("max_ahead must be >= min_ahead")
        if not self.speed_script:
            raise ValueError("speed_script needs at least one knot")
        times = [k.t for k in self.speed_script]
        if times != sorted(times):
            raise ValueError("speed_script knots must be in time order")
        return self


def _box_corners(cx: float, cy: float, half_width: float, height: float) -> np.ndarray:
    return np.array(
        [
            [cx + dx, cy + dy, z]
            for dx in (-half_width, half_width)
            for dy in (-half_width, half_width)
            for z in (0.0, height)
        ]
    )


def _lattice(cx: float, cy: float, levels: int, offset: float, height: float) -> np.ndarray:
    z = (np.arange(levels) + 0.5) * height / levels
    columns = [(cx + dx, cy + dy) for dx in (-offset, offset) for dy in (-offset, offset)]
    return np.array([[x, y, zz] for x, y in columns for zz in z])


def envelope_bbox(
    cx: float, cy: float, cam: CameraModel, rng: np.random.Generator | None = None, jitter: float = 0.0
) -> BBox2D | None:
    """Projected body envelope, jittered and clipped to the image; None if not visible."""
    uv, valid = project_points(_box_corners(cx, cy, BODY_HALF_WIDTH, BODY_HEIGHT), cam)
    if not valid.all():
        return None
    edges = np.array([uv[:, 0].min(), uv[:, 1].min(), uv[:, 0].max(), uv[:, 1].max()])
    if jitter > 0 and rng is not None:
        edges = edges + rng.normal(0.0, jitter, size=4)
    u_min, u_max = sorted((edges[0], edges[2]))
    v_min, v_max = sorted((edges[1], edges[3]))
    u_min, u_max = max(u_min, 0.0), min(u_max, float(cam.image_width))
    v_min, v_max = max(v_min, 0.0), min(v_max, float(cam.image_height))
    if u_max - u_min < 1.0 or v_max - v_min < 1.0:
        return None
    return BBox2D(float(u_min), float(v_min), float(u_max), float(v_max), ObjectClass.PERSON, 1.0)


def _place_random(
    spec: GenSpec, cam: CameraModel, rng: np.random.Generator, taken: list[tuple[float, float]]
) -> PedestrianScript | None:
    intervals = []
    if spec.avoid_image_overlap:
        for x, y in taken:
            box = envelope_bbox(x, y, cam)
            if box is not None:
                intervals.append((box.u_min, box.u_max))

    for _ in range(200):
        x = rng.uniform(spec.min_ahead, spec.max_ahead)
        y = rng.uniform(-spec.lateral_ratio * x, spec.lateral_ratio * x)
        if any(math.hypot(x - tx, y - ty) < spec.min_separation for tx, ty in taken):
            continue
        if spec.avoid_image_overlap:
            box = envelope_bbox(x, y, cam)
            if box is None or any(box.u_min <= hi and lo <= box.u_max for lo, hi in intervals):
                continue
        return PedestrianScript(x=x, y=y)
    return None


def _vehicle_poses(spec: GenSpec, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Kinematic bicycle integration of the speed script. Returns (speeds kph, poses x/y/yaw)."""
    knots_t = [k.t for k in spec.speed_script]
    knots_v = [k.kph for k in spec.speed_script]
    speeds = np.interp(times, knots_t, knots_v)

    poses = np.zeros((len(times), 3))
    for i in range(1, len(times)):
        dt = times[i] - times[i - 1]
        v = speeds[i - 1] / 3.6
        x, y, yaw = poses[i - 1]
        poses[i] = (
            x + v * math.cos(yaw) * dt,
            y + v * math.sin(yaw) * dt,
            yaw + v * math.tan(spec.wheel_angle) / spec.wheelbase * dt,
        )
    return speeds, poses


def _to_body(world_xy: np.ndarray, pose: np.ndarray) -> np.ndarray:
    dx = world_xy[:, 0] - pose[0]
    dy = world_xy[:, 1] - pose[1]
    c, s = math.cos(pose[2]), math.sin(pose[2])
    return np.column_stack([c * dx + s * dy, -s * dx + c * dy])


def generate_scenario(spec: GenSpec) -> ScenarioFile:
    """Deterministic function of spec (seed included)."""
    rng = np.random.default_rng(spec.seed)
    cam = camera_from_record(spec.camera) if spec.camera else CameraModel.default()

    # World-frame cast: scripted, random, far (bbox only), posts
    people = list(spec.pedestrians)
    taken = [(p.x, p.y) for p in people]
    for _ in range(spec.random_pedestrians):
        placed = _place_random(spec, cam, rng, taken)
        if placed is None:
            logger.warning("Could not place pedestrian", placed=len(people))
            break
        people.append(placed)
        taken.append((placed.x, placed.y))
    levels = rng.integers(MIN_LEVELS, MAX_LEVELS + 1, size=len(people))

    far = []
    for _ in range(spec.far_pedestrians):
        x = rng.uniform(spec.lidar_range + 1.0, spec.lidar_range + 15.0)
        far.append(PedestrianScript(x=x, y=rng.uniform(-0.3 * x, 0.3 * x)))

    posts = []
    for _ in range(spec.distractors):
        x = rng.uniform(spec.min_ahead, spec.max_ahead)
        side = 1.0 if rng.random() < 0.5 else -1.0
        # Outside the pedestrian wedge so posts never merge with a person
        posts.append((x, side * rng.uniform(1.0 * x, 1.3 * x)))

    n_frames = max(1, int(round(spec.duration * spec.frame_rate)))
    times = np.arange(n_frames) / spec.frame_rate
    speeds, poses = _vehicle_poses(spec, times)

    frames: list[SceneFrame] = []
    truth: list[GroundTruth] = []
    for index, (t, speed, pose) in enumerate(zip(times, speeds, poses)):
        clouds: list[np.ndarray] = []
        bboxes: list[BBox2D] = []

        world = np.array([[p.x + p.vx * t, p.y + p.vy * t] for p in people]).reshape(-1, 2)
        for pid, (bx, by) in enumerate(_to_body(world, pose)):
            in_lidar = 0.0 < math.hypot(bx, by) <= spec.lidar_range
            box = envelope_bbox(bx, by, cam, rng, spec.bbox_jitter) if bx > 0 else None
            if in_lidar:
                cloud = _lattice(bx, by, int(levels[pid]), LATTICE_OFFSET, BODY_HEIGHT)
                if spec.point_jitter > 0:
                    cloud = cloud + rng.normal(0.0, spec.point_jitter, size=cloud.shape)
                clouds.append(cloud)
            if box is not None:
                bboxes.append(box)
            if in_lidar or box is not None:
                truth.append(
                    GroundTruth(
                        frame=index,
                        pedestrian_id=pid,
                        position=Point3(float(bx), float(by), BODY_HEIGHT / 2),
                        bbox_index=len(bboxes) - 1 if box is not None else None,
                        in_lidar=in_lidar,
                    )
                )

        far_world = np.array([[p.x + p.vx * t, p.y + p.vy * t] for p in far]).reshape(-1, 2)
        for offset, (bx, by) in enumerate(_to_body(far_world, pose)):
            box = envelope_bbox(bx, by, cam, rng, spec.bbox_jitter) if bx > 0 else None
            if box is not None:
                bboxes.append(box)
                truth.append(
                    GroundTruth(
                        frame=index,
                        pedestrian_id=len(people) + offset,
                        position=Point3(float(bx), float(by), BODY_HEIGHT / 2),
                        bbox_index=len(bboxes) - 1,
                        in_lidar=False,
                    )
                )

        if posts:
            for bx, by in _to_body(np.array(posts), pose):
                if 0.0 < math.hypot(bx, by) <= spec.lidar_range:
                    clouds.append(_lattice(bx, by, 10, POST_HALF_WIDTH / 2, POST_HEIGHT))

        points = np.concatenate(clouds) if clouds else np.zeros((0, 3))
        frames.append(
            SceneFrame(
                timestamp=float(t),
                vehicle=VehicleState(
                    speed=float(speed), wheel_angle=spec.wheel_angle, wheelbase=spec.wheelbase
                ),
                points=points,
                bboxes=tuple(bboxes),
                road_type=spec.road_type,
                driver_speed=float(speed),
                segment=spec.segment_name,
            )
        )

    logger.info(
        "Scenario generated",
        frames=len(frames),
        pedestrians=len(people),
        far=len(far),
        posts=len(posts),
        seed=spec.seed,
    )
    return ScenarioFile(
        camera=cam,
        frames=frames,
        segments=(RoadSegment(spec.segment_name, spec.legal_limit_kph),),
        default_legal_kph=spec.legal_limit_kph,
        seed=spec.seed,
        description=f"generated: {len(people)} pedestrians, {len(far)} far, {len(posts)} posts",
        ground_truth=tuple(truth),
    )


def make_benchmark_frame(
    seed: int = 0,
    n_points: int = 5000,
    n_clusters: int = 30,
    n_bboxes: int = 20,
    cam: CameraModel | None = None,
) -> SceneFrame:
    """Dense synthetic frame for fusion latency measurements."""
    rng = np.random.default_rng(seed)
    cam = cam or CameraModel.default()
    per_cluster = n_points // n_clusters

    # Rows of 6 ahead of the vehicle; gaps between boxes exceed the cluster distance
    centres = []
    for i in range(n_clusters):
        row, col = divmod(i, 6)
        x = 4.0 + 2.5 * row
        centres.append((x, (col - 2.5) * 0.35 * x))

    clouds = []
    for i, (cx, cy) in enumerate(centres):
        count = per_cluster + (n_points - per_cluster * n_clusters if i == 0 else 0)
        offsets = rng.uniform([-0.4, -0.4, 0.0], [0.4, 0.4, 1.8], size=(count, 3))
        clouds.append(offsets + np.array([cx, cy, 0.0]))

    bboxes = []
    for cx, cy in centres[:n_bboxes]:
        box = envelope_bbox(cx, cy, cam)
        if box is not None:
            bboxes.append(box)

    return SceneFrame(
        timestamp=0.0,
        vehicle=VehicleState(speed=10.0),
        points=np.concatenate(clouds),
        bboxes=tuple(bboxes),
        road_type=RoadType.SHARED,
    )
