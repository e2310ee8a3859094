"""Convex bounds on closed-loop motion and the safe-reachability test.

On its domain, each controller keeps the robot position inside the convex
hull of the current position, the goal position, and their two active anchor
points, and inside the goal-centered ball through the current position. Both
bounds shrink along the motion, so a single hull check at selection time
certifies an entire closed-loop segment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import ControlParams
from .control import (
    Pose,
    anchor_points_backward,
    anchor_points_forward,
    in_backward_domain,
    in_forward_domain,
)
from .control import DomainError
from .geom import Ball, ConvexPolygon, convex_hull
from .world import World, region_is_free


@dataclass(frozen=True)
class MotionBound:
    """Hull of at most four anchor positions plus the goal-centered ball."""

    hull: ConvexPolygon
    ball: Ball


def motion_bound(
    pose: Pose, goal: Pose, params: ControlParams, direction: str
) -> MotionBound:
    """Convex bound containing the whole closed-loop trajectory from pose.

    Raises DomainError when the pose is not in the requested controller's
    domain (the bound is only valid there).
    """
    if direction == "forward":
        if not in_forward_domain(pose, goal, params):
            raise DomainError("pose is not in the forward domain of the goal")
        a, b = anchor_points_forward(pose, goal, params.headway, params.tailway)
    elif direction == "backward":
        if not in_backward_domain(pose, goal, params):
            raise DomainError("pose is not in the backward domain of the goal")
        a, b = anchor_points_backward(
            pose, goal, params.back_tailway, params.back_headway
        )
    else:
        raise ValueError(f"unknown direction {direction!r}")
    hull = convex_hull([pose.position, a, b, goal.position])
    ball = Ball(goal.position, pose.distance_to(goal))
    return MotionBound(hull=hull, ball=ball)


def issafe(from_pose: Pose, to_pose: Pose, world: World, params: ControlParams) -> bool:
    """Can the robot provably reach to_pose from from_pose without collision?

    True iff from_pose lies in the forward (or backward) domain of to_pose
    and the corresponding motion-prediction hull, dilated by the robot
    radius, stays in free space. Degenerate pairs (coincident positions)
    are never safe. Anchors use the controller coefficients so the hull
    bounds the actual closed-loop motion.
    """
    if from_pose.distance_to(to_pose) == 0.0:
        return False
    x = from_pose.position
    g = to_pose.position
    if in_forward_domain(from_pose, to_pose, params):
        head, tail_g = anchor_points_forward(
            from_pose, to_pose, params.headway, params.tailway
        )
        if region_is_free(world, convex_hull([x, head, tail_g, g])):
            return True
    if in_backward_domain(from_pose, to_pose, params):
        tail, head_g = anchor_points_backward(
            from_pose, to_pose, params.back_tailway, params.back_headway
        )
        if region_is_free(world, convex_hull([x, tail, head_g, g])):
            return True
    return False
