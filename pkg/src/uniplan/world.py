"""Workspace, obstacles, and free-space queries, plus scenario file loading.

A scenario is a JSON document describing the rectangular workspace, convex
obstacles, the disk robot radius, start and goal poses, and optional planner
and control sections. Unknown keys are rejected. The schema with defaults is
documented in the README.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .config import ControlParams, PlannerParams
from .control import Pose
from .geom import (
    Ball,
    ConvexPolygon,
    Shape,
    Vec2,
    convex_hull,
    hull_contains,
    point_separation,
    separation,
)


class ScenarioError(Exception):
    """Scenario file failed to parse or validate."""


_REJECTION_CAP = 10**6


@dataclass(frozen=True)
class World:
    """Axis-aligned workspace with convex obstacles and a disk robot.

    The free space is open: a position is free only if the robot disk fits in
    the workspace and clears every obstacle strictly.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    obstacles: tuple[Shape, ...]
    robot_radius: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ScenarioError("workspace must have positive area")
        if self.robot_radius <= 0:
            raise ScenarioError("robot_radius must be > 0")

    def obstacle_aabbs(self) -> list[tuple[float, float, float, float]]:
        return [ob.aabb() for ob in self.obstacles]


def pose_is_free(world: World, p: Vec2) -> bool:
    """True iff the robot disk at p stays in the workspace and off obstacles."""
    r = world.robot_radius
    if not (
        world.x_min + r <= p.x <= world.x_max - r
        and world.y_min + r <= p.y <= world.y_max - r
    ):
        return False
    for ob in world.obstacles:
        if point_separation(p, ob) <= r:
            return False
    return True


def region_is_free(world: World, hull: ConvexPolygon) -> bool:
    """True iff the hull dilated by the robot radius lies in free space."""
    r = world.robot_radius
    hx0, hy0, hx1, hy1 = hull.aabb()
    if not (
        hx0 - r >= world.x_min
        and hy0 - r >= world.y_min
        and hx1 + r <= world.x_max
        and hy1 + r <= world.y_max
    ):
        return False
    for ob in world.obstacles:
        ox0, oy0, ox1, oy1 = ob.aabb()
        # axis gap lower-bounds the true distance; skip the exact test when clear
        gap = max(ox0 - hx1, hx0 - ox1, oy0 - hy1, hy0 - oy1)
        if gap > r:
            continue
        if separation(hull, ob) <= r:
            return False
    return True


def sample_free_pose(world: World, rng, goal: Pose, goal_bias: float) -> Pose:
    """Draw a pose: the goal with probability goal_bias, else uniform over free space.

    Draw order (fixed for reproducibility): one uniform for the bias when
    goal_bias > 0, then per rejection try two uniforms for the position, then
    one uniform for the heading once a free position is found.
    """
    if goal_bias > 0.0 and rng.uniform() < goal_bias:
        return goal
    return sample_uniform_pose(world, rng)


def sample_uniform_pose(world: World, rng) -> Pose:
    """Uniform pose over free positions (rejection sampling) and headings."""
    for _ in range(_REJECTION_CAP):
        x = rng.uniform(world.x_min, world.x_max)
        y = rng.uniform(world.y_min, world.y_max)
        if pose_is_free(world, Vec2(x, y)):
            theta = rng.uniform(-math.pi, math.pi)
            return Pose(x, y, theta)
    raise ScenarioError("free space too small: rejection sampling cap exceeded")


@dataclass(frozen=True)
class Problem:
    """A fully validated planning problem."""

    world: World
    start: Pose
    goal: Pose
    control: ControlParams
    planner: PlannerParams


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioError(f"{where}: missing keys {sorted(missing)}")


def _parse_pose(obj, where: str) -> Pose:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object with x, y, theta")
    _require_keys(obj, {"x", "y", "theta"}, {"x", "y", "theta"}, where)
    return Pose(float(obj["x"]), float(obj["y"]), float(obj["theta"]))


def _parse_obstacle(obj, where: str) -> Shape:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ScenarioError(f"{where}: expected an object with a 'type' key")
    kind = obj["type"]
    if kind == "ball":
        _require_keys(obj, {"type", "center", "radius"}, {"center", "radius"}, where)
        cx, cy = obj["center"]
        radius = float(obj["radius"])
        if radius <= 0:
            raise ScenarioError(f"{where}: ball radius must be > 0")
        return Ball(Vec2(float(cx), float(cy)), radius)
    if kind == "polygon":
        _require_keys(obj, {"type", "vertices"}, {"vertices"}, where)
        pts = [Vec2(float(p[0]), float(p[1])) for p in obj["vertices"]]
        if len(pts) < 3:
            raise ScenarioError(f"{where}: polygon needs at least 3 vertices")
        hull = convex_hull(pts)
        if len(hull.vertices) >= 3:
            for p in pts:
                # an input point strictly inside the hull means non-convex input
                if hull_contains(hull, p, -1e-9):
                    raise ScenarioError(f"{where}: polygon is not convex")
        return hull
    raise ScenarioError(f"{where}: unknown obstacle type {kind!r}")


def scenario_from_dict(doc: dict) -> Problem:
    """Build a validated Problem from a parsed scenario document."""
    _require_keys(
        doc,
        {"workspace", "obstacles", "robot_radius", "start", "goal", "planner", "control"},
        {"workspace", "start", "goal"},
        "scenario",
    )
    ws = doc["workspace"]
    _require_keys(ws, {"min", "max"}, {"min", "max"}, "workspace")
    obstacles = tuple(
        _parse_obstacle(ob, f"obstacles[{i}]")
        for i, ob in enumerate(doc.get("obstacles", []))
    )
    world = World(
        x_min=float(ws["min"][0]),
        y_min=float(ws["min"][1]),
        x_max=float(ws["max"][0]),
        y_max=float(ws["max"][1]),
        obstacles=obstacles,
        robot_radius=float(doc.get("robot_radius", 0.5)),
    )
    start = _parse_pose(doc["start"], "start")
    goal = _parse_pose(doc["goal"], "goal")

    control_doc = doc.get("control", {})
    planner_doc = doc.get("planner", {})
    control_fields = {
        "headway", "tailway", "back_tailway", "back_headway",
        "gain", "step", "goal_tol", "angle_tol", "horizon",
    }
    planner_fields = {
        "samples", "goal_bias", "neighbor_radius", "neighbor_angle",
        "step_radius", "step_angle", "alpha", "beta", "objective",
        "kappa", "informed", "seed",
    }
    _require_keys(control_doc, control_fields, set(), "control")
    _require_keys(planner_doc, planner_fields, set(), "planner")
    try:
        control = ControlParams(**control_doc)
        planner = PlannerParams(**planner_doc)
    except ValueError as e:
        raise ScenarioError(str(e)) from e

    if not pose_is_free(world, start.position):
        raise ScenarioError("start pose not free")
    if not pose_is_free(world, goal.position):
        raise ScenarioError("goal pose not free")
    return Problem(world=world, start=start, goal=goal, control=control, planner=planner)


def load_scenario(path) -> Problem:
    """Load and validate a scenario JSON file."""
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario file is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ScenarioError("scenario file must contain a JSON object")
    return scenario_from_dict(doc)


def scenario_to_dict(problem: Problem) -> dict:
    """Serialize a Problem back into the scenario document form."""
    obstacles = []
    for ob in problem.world.obstacles:
        if isinstance(ob, Ball):
            obstacles.append(
                {"type": "ball", "center": [ob.center.x, ob.center.y], "radius": ob.radius}
            )
        else:
            obstacles.append(
                {"type": "polygon", "vertices": [[v.x, v.y] for v in ob.vertices]}
            )
    w = problem.world
    return {
        "workspace": {"min": [w.x_min, w.y_min], "max": [w.x_max, w.y_max]},
        "obstacles": obstacles,
        "robot_radius": w.robot_radius,
        "start": {"x": problem.start.x, "y": problem.start.y, "theta": problem.start.theta},
        "goal": {"x": problem.goal.x, "y": problem.goal.y, "theta": problem.goal.theta},
        "control": {k: getattr(problem.control, k) for k in (
            "headway", "tailway", "back_tailway", "back_headway",
            "gain", "step", "goal_tol", "angle_tol", "horizon",
        )},
        "planner": {k: getattr(problem.planner, k) for k in (
            "samples", "goal_bias", "neighbor_radius", "neighbor_angle",
            "step_radius", "step_angle", "alpha", "beta", "objective",
            "kappa", "informed", "seed",
        )},
    }
