"""Closed-loop plan execution over a motion graph.

At any pose, the executor picks the safely reachable graph vertex minimizing
local steering cost plus remaining travel cost over the tree, then tracks it
with the forward or backward controller. Local goals are re-selected at a
fixed cadence and whenever one is reached, composing the local policies into
a global one whose remaining cost decreases across switches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ControlParams
from .control import (
    ControlInput,
    Pose,
    _backward_law,
    _forward_law,
    anchor_points_forward,
    in_backward_domain,
    in_forward_domain,
)
from .geom import wrap_angle
from .metrics import WeightedDistance
from .planner import MotionGraph
from .prediction import issafe
from .world import World

REPLAN_PERIOD = 0.1  # s between local-goal re-selections


class DisconnectedError(Exception):
    """No graph vertex is safely reachable from the current pose."""


class ExecutionHorizonError(Exception):
    """Execution exceeded its time budget before reaching the global goal."""


@dataclass
class ExecutedTrajectory:
    """Executed rollout samples plus the active local-goal vertex per sample."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    segment: np.ndarray  # local-goal vertex index active at each sample
    converged: bool
    path_length: float
    total_turning: float
    duration: float
    segments: list[tuple[int, float, float]] = field(default_factory=list)
    # per-segment (vertex index, path length, turning)


def write_executed_csv(trajectory: ExecutedTrajectory, path) -> None:
    """CSV with the trajectory columns plus the active segment index."""
    with open(path, "w") as f:
        f.write("t,x,y,theta,v,omega,segment\n")
        for k in range(len(trajectory.t)):
            f.write(
                f"{trajectory.t[k]:.12g},{trajectory.x[k]:.12g},"
                f"{trajectory.y[k]:.12g},{trajectory.theta[k]:.12g},"
                f"{trajectory.v[k]:.12g},{trajectory.omega[k]:.12g},"
                f"{int(trajectory.segment[k])}\n"
            )


class _Policy:
    """Shared state for local-goal selection against one graph."""

    def __init__(self, graph: MotionGraph, world: World,
                 wd: WeightedDistance, params: ControlParams):
        if graph.goal_index is None or not graph.is_alive(graph.goal_index):
            raise DisconnectedError("graph does not contain the goal pose")
        self.graph = graph
        self.world = world
        self.wd = wd
        self.params = params
        self.cost_to_goal = graph.costs_to(graph.goal_index)
        n = len(graph)
        self.xs = graph._xs[:n]
        self.ys = graph._ys[:n]
        self.alive = graph._alive[:n]

    def total_cost(self, pose: Pose, v: int) -> float:
        return self.wd.value(pose, self.graph.poses[v]) + float(self.cost_to_goal[v])

    def select(self, pose: Pose, best_known: float = math.inf,
               max_ctg: float = math.inf) -> tuple[int | None, float]:
        """Cheapest safely reachable vertex, ties by lowest index.

        Candidates are scanned in order of an admissible lower bound
        (alpha * Euclidean + cost-to-goal), so the expensive safety test
        only runs until the bound passes the incumbent. Vertices closer
        than the goal tolerance are skipped: the controller is undefined
        there and they are never safe targets. max_ctg restricts candidates
        to strictly smaller remaining cost than the current local goal;
        without it, re-selection could cycle back to a just-reached vertex
        (the pose distances do not obey the triangle inequality).
        """
        eucl = np.hypot(self.xs - pose.x, self.ys - pose.y)
        lb = self.wd.alpha * eucl + self.cost_to_goal
        admissible = self.alive & (eucl > self.params.goal_tol) & (self.cost_to_goal < max_ctg)
        lb = np.where(admissible, lb, np.inf)
        best_idx = None
        best_val = best_known
        for j in np.argsort(lb, kind="stable"):
            if lb[j] > best_val or not np.isfinite(lb[j]):
                break
            total = self.total_cost(pose, int(j))
            if total > best_val or (total == best_val and best_idx is not None and j > best_idx):
                continue
            if issafe(pose, self.graph.poses[int(j)], self.world, self.params):
                best_idx, best_val = int(j), total
        return best_idx, best_val


def local_goal(graph: MotionGraph, pose: Pose, world: World,
               wd: WeightedDistance, params: ControlParams) -> Pose:
    """The graph vertex minimizing steering cost plus travel cost to the goal."""
    policy = _Policy(graph, world, wd, params)
    if graph.poses[graph.goal_index].distance_to(pose) <= params.goal_tol:
        return graph.poses[graph.goal_index]
    idx, _ = policy.select(pose)
    if idx is None:
        raise DisconnectedError("no safely reachable graph vertex from this pose")
    return graph.poses[idx]


def policy_control(graph: MotionGraph, pose: Pose, world: World,
                   wd: WeightedDistance, params: ControlParams) -> ControlInput:
    """Control toward the current local goal; zero input at the global goal."""
    goal_pose = graph.poses[graph.goal_index]
    if (
        pose.distance_to(goal_pose) <= params.goal_tol
        and abs(wrap_angle(pose.theta - goal_pose.theta)) <= params.angle_tol
    ):
        return ControlInput(0.0, 0.0)
    target = local_goal(graph, pose, world, wd, params)
    return _segment_control(pose, target, params)


def _segment_control(pose: Pose, target: Pose, params: ControlParams) -> ControlInput:
    cth, sth = math.cos(pose.theta), math.sin(pose.theta)
    cg, sg = math.cos(target.theta), math.sin(target.theta)
    if in_forward_domain(pose, target, params):
        v, w = _forward_law(pose.x, pose.y, cth, sth, target.x, target.y,
                            cg, sg, params.headway, params.tailway, params.gain)
        return ControlInput(v, w)
    if in_backward_domain(pose, target, params):
        v, w = _backward_law(pose.x, pose.y, cth, sth, target.x, target.y,
                             cg, sg, params.back_tailway, params.back_headway,
                             params.gain)
        return ControlInput(v, w)
    # outside both domains: rotate in place to break the symmetry until the
    # forward domain is entered (ties toward +)
    head, tail_g = anchor_points_forward(pose, target, params.headway, params.tailway)
    d = tail_g - head
    side = d.x * (-sth) + d.y * cth
    return ControlInput(0.0, params.gain if side >= 0.0 else -params.gain)


def execute(graph: MotionGraph, start: Pose, world: World,
            wd: WeightedDistance, params: ControlParams,
            record_stride: int = 1) -> ExecutedTrajectory:
    """Integrate the graph policy from start until the global goal pose.

    The local goal is re-selected every REPLAN_PERIOD seconds and upon
    being reached; between re-selections the current one is kept unless a
    strictly cheaper safe vertex exists (hysteresis by total cost). The time
    budget is 10x the planned cost over the reference gain.
    """
    policy = _Policy(graph, world, wd, params)
    goal_idx = graph.goal_index
    goal_pose = graph.poses[goal_idx]
    h = params.step
    goal_tol, angle_tol = params.goal_tol, params.angle_tol

    def at_global_goal(x, y, th):
        return (
            math.hypot(x - goal_pose.x, y - goal_pose.y) <= goal_tol
            and abs(wrap_angle(th - goal_pose.theta)) <= angle_tol
        )

    rows = []
    segments: list[tuple[int, float, float]] = []
    x, y, th = start.x, start.y, start.theta
    if at_global_goal(x, y, th):
        data = np.zeros((0, 7))
        return ExecutedTrajectory(
            t=data[:, 0], x=data[:, 1], y=data[:, 2], theta=data[:, 3],
            v=data[:, 4], omega=data[:, 5], segment=data[:, 6],
            converged=True, path_length=0.0, total_turning=0.0,
            duration=0.0, segments=[],
        )

    current, current_total = policy.select(start)
    if current is None:
        raise DisconnectedError("no safely reachable graph vertex from the start pose")
    planned = float(policy.cost_to_goal[0]) if np.isfinite(policy.cost_to_goal[0]) else 0.0
    budget = 10.0 * max(planned, wd.value(start, goal_pose)) / params.gain
    nmax = int(math.ceil(budget / h))
    replan_every = max(1, int(round(REPLAN_PERIOD / h)))

    path_length = 0.0
    total_turning = 0.0
    seg_len = 0.0
    seg_turn = 0.0
    k = 0
    converged = False
    while True:
        pose = Pose(x, y, th)
        t = k * h
        if at_global_goal(x, y, th):
            converged = True
            rows.append((t, x, y, wrap_angle(th), 0.0, 0.0, current))
            break
        if k >= nmax:
            break

        target = graph.poses[current]
        reached = (
            pose.distance_to(target) <= goal_tol
            and abs(wrap_angle(th - target.theta)) <= angle_tol
        )
        if reached or k % replan_every == 0:
            # switches only ever move to vertices with strictly smaller
            # remaining cost, so the local-goal sequence cannot cycle
            ctg_now = float(policy.cost_to_goal[current])
            if reached:
                segments.append((current, seg_len, seg_turn))
                seg_len, seg_turn = 0.0, 0.0
                nxt, _ = policy.select(pose, max_ctg=ctg_now)
                if nxt is None:
                    raise DisconnectedError("no safely reachable vertex after segment")
                current = nxt
            else:
                # hysteresis: switch only to a strictly cheaper safe vertex
                current_total = policy.total_cost(pose, current)
                nxt, val = policy.select(pose, best_known=current_total,
                                         max_ctg=ctg_now)
                if nxt is not None and val < current_total:
                    segments.append((current, seg_len, seg_turn))
                    seg_len, seg_turn = 0.0, 0.0
                    current = nxt
            target = graph.poses[current]

        u = _segment_control(pose, target, params)
        if k % record_stride == 0:
            rows.append((t, x, y, wrap_angle(th), u.v, u.omega, current))
        cth, sth = math.cos(th), math.sin(th)
        th2 = th + 0.5 * h * u.omega
        th4 = th + h * u.omega
        x += h * u.v * (cth + 4.0 * math.cos(th2) + math.cos(th4)) / 6.0
        y += h * u.v * (sth + 4.0 * math.sin(th2) + math.sin(th4)) / 6.0
        th = th4
        path_length += abs(u.v) * h
        total_turning += abs(u.omega) * h
        seg_len += abs(u.v) * h
        seg_turn += abs(u.omega) * h
        k += 1

    segments.append((current, seg_len, seg_turn))
    data = np.array(rows, dtype=float).reshape(len(rows), 7)
    trajectory = ExecutedTrajectory(
        t=data[:, 0], x=data[:, 1], y=data[:, 2], theta=data[:, 3],
        v=data[:, 4], omega=data[:, 5], segment=data[:, 6].astype(int),
        converged=converged, path_length=path_length,
        total_turning=total_turning, duration=k * h, segments=segments,
    )
    if not converged:
        raise ExecutionHorizonError(
            f"execution exceeded its {budget:.3g} s budget"
        )
    return trajectory
