"""Optimal rapidly-exploring random tree over unicycle poses.

Each iteration draws a (goal-biased) free pose, projects it into the step
neighborhood of its nearest tree vertex, gates the connection with the
safe-reachability test, picks the cheapest safe parent among the decoupled
neighborhood, inserts, and rewires neighbors through the new vertex when
that is strictly cheaper and safe. Cost-to-come is maintained incrementally
on the tree (rewiring shifts whole subtrees), which matches a graph-search
recomputation because the edge set stays a tree.

Everything is deterministic given the seed: one fixed RNG stream, fixed
iteration structure, and index-based tie breaking throughout.
"""

from __future__ import annotations

import math

import numpy as np

from .control import Pose
from .metrics import WeightedDistance, objective_distance, project
from .prediction import issafe
from .world import Problem, sample_free_pose, sample_uniform_pose

_DEAD = 1.0e18  # coordinate sentinel for pruned vertices
_PRUNE_SLACK = 1e-9  # keeps float noise from flagging best-path vertices


class PlanningError(Exception):
    pass


def local_cost(p: Pose, q: Pose, wd: WeightedDistance, uniform: bool = False) -> float:
    """Edge cost of steering from p to q: weighted pose distance, or 1."""
    return 1.0 if uniform else wd.value(p, q)


def heuristic(p: Pose, q: Pose, wd: WeightedDistance, mode: str) -> float:
    """Admissible lower bound on the travel cost between two poses."""
    if mode in ("off", "zero"):
        return 0.0
    if mode == "euclidean":
        return wd.alpha * math.hypot(p.x - q.x, p.y - q.y)
    raise ValueError(f"unknown heuristic mode {mode!r}")


class MotionGraph:
    """Tree of poses with per-vertex parent, edge cost, and cost-to-come.

    Vertex indices are stable; pruned vertices keep their slot with
    alive=False and are excluded from queries and dumps. Vertex 0 is the
    start pose.
    """

    def __init__(self, start: Pose):
        self.poses: list[Pose] = [start]
        self.parent: list[int | None] = [None]
        self.edge_cost: list[float] = [0.0]
        self.children: list[list[int]] = [[]]
        self.goal_index: int | None = None
        self.iteration_costs: list[float] = []
        self.iteration_vertices: list[int] = []
        self.rejected: int = 0
        self._cap = 256
        self._xs = np.full(self._cap, _DEAD)
        self._ys = np.full(self._cap, _DEAD)
        self._cos = np.ones(self._cap)
        self._sin = np.zeros(self._cap)
        self._ctc = np.zeros(self._cap)
        self._alive = np.zeros(self._cap, dtype=bool)
        self._index: dict[tuple[float, float, float], int] = {}
        self._n = 0
        self._alive_count = 0
        self._append(start, 0.0)

    # -- storage ---------------------------------------------------------

    def _append(self, pose: Pose, ctc: float):
        if self._n == self._cap:
            self._cap *= 2
            for name in ("_xs", "_ys", "_cos", "_sin", "_ctc"):
                arr = getattr(self, name)
                grown = np.full(self._cap, _DEAD if name in ("_xs", "_ys") else 0.0)
                grown[: self._n] = arr
                setattr(self, name, grown)
            alive = np.zeros(self._cap, dtype=bool)
            alive[: self._n] = self._alive
            self._alive = alive
        i = self._n
        self._xs[i] = pose.x
        self._ys[i] = pose.y
        self._cos[i] = math.cos(pose.theta)
        self._sin[i] = math.sin(pose.theta)
        self._ctc[i] = ctc
        self._alive[i] = True
        self._index[(pose.x, pose.y, pose.theta)] = i
        self._n += 1
        self._alive_count += 1

    def __len__(self):
        return self._n

    @property
    def alive_count(self) -> int:
        return self._alive_count

    def alive_indices(self) -> np.ndarray:
        return np.flatnonzero(self._alive[: self._n])

    def is_alive(self, i: int) -> bool:
        return bool(self._alive[i])

    def cost_to_come(self, i: int) -> float:
        return float(self._ctc[i])

    def contains_pose(self, pose: Pose) -> bool:
        i = self._index.get((pose.x, pose.y, pose.theta))
        return i is not None and bool(self._alive[i])

    def index_of(self, pose: Pose) -> int | None:
        i = self._index.get((pose.x, pose.y, pose.theta))
        return i if i is not None and self._alive[i] else None

    def edges(self):
        """Tree edges as (parent, child, cost), in child-index order."""
        for i in range(1, self._n):
            if self._alive[i]:
                yield self.parent[i], i, self.edge_cost[i]

    # -- construction ----------------------------------------------------

    def add_vertex(self, pose: Pose, parent: int, cost: float) -> int:
        if cost <= 0.0:
            raise PlanningError("edge cost must be strictly positive")
        i = self._n
        self.poses.append(pose)
        self.parent.append(parent)
        self.edge_cost.append(cost)
        self.children.append([])
        self.children[parent].append(i)
        self._append(pose, self._ctc[parent] + cost)
        return i

    def rewire(self, v: int, new_parent: int, cost: float) -> None:
        """Re-parent v through new_parent and shift its subtree's cost-to-come."""
        old_parent = self.parent[v]
        self.children[old_parent].remove(v)
        self.parent[v] = new_parent
        self.children[new_parent].append(v)
        self.edge_cost[v] = cost
        delta = self._ctc[new_parent] + cost - self._ctc[v]
        stack = [v]
        while stack:
            u = stack.pop()
            self._ctc[u] += delta
            stack.extend(self.children[u])

    def kill_subtree(self, v: int) -> None:
        """Mark v and all its descendants dead and detach v from its parent."""
        self.children[self.parent[v]].remove(v)
        stack = [v]
        while stack:
            u = stack.pop()
            if self._alive[u]:
                self._alive[u] = False
                self._alive_count -= 1
                self._xs[u] = _DEAD
                self._ys[u] = _DEAD
            stack.extend(self.children[u])
            self.children[u] = []

    # -- queries ---------------------------------------------------------

    def nearest_index(self, p: Pose, wd: WeightedDistance) -> int:
        n = self._n
        values = wd.value_arr(p, self._xs[:n], self._ys[:n], self._cos[:n], self._sin[:n])
        values = np.where(self._alive[:n], values, np.inf)
        return int(np.argmin(values))

    def neighbor_indices(self, p: Pose, radius: float, angle: float) -> np.ndarray:
        """Decoupled Euclidean/cosine neighborhood of p, ascending indices."""
        n = self._n
        dx = self._xs[:n] - p.x
        dy = self._ys[:n] - p.y
        trans = np.hypot(dx, dy)
        orient = 1.0 - (math.cos(p.theta) * self._cos[:n] + math.sin(p.theta) * self._sin[:n])
        mask = (trans <= radius) & (orient <= angle) & self._alive[:n]
        return np.flatnonzero(mask)

    def path_indices(self, v: int) -> list[int]:
        """Vertex indices from the start to v along parent pointers."""
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def costs_to(self, v: int) -> np.ndarray:
        """Travel cost from every alive vertex to v over the tree (inf if dead)."""
        costs = np.full(self._n, np.inf)
        costs[v] = 0.0
        stack = [v]
        while stack:
            u = stack.pop()
            base = costs[u]
            p = self.parent[u]
            neighbors = list(self.children[u])
            if p is not None:
                neighbors.append(p)
            for w in neighbors:
                c = self.edge_cost[u] if w == self.parent[u] else self.edge_cost[w]
                if base + c < costs[w]:
                    costs[w] = base + c
                    stack.append(w)
        costs[~self._alive[: self._n]] = np.inf
        return costs

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        """Dump alive vertices and tree edges with compact re-indexing."""
        alive = self.alive_indices()
        remap = {int(old): new for new, old in enumerate(alive)}
        vertices = [
            {
                "x": self.poses[i].x,
                "y": self.poses[i].y,
                "theta": self.poses[i].theta,
                "cost": float(self._ctc[i]),
            }
            for i in alive
        ]
        edges = [
            {"a": remap[a], "b": remap[b], "cost": c}
            for a, b, c in self.edges()
        ]
        best_path = []
        goal = None
        if self.goal_index is not None and self._alive[self.goal_index]:
            goal = remap[self.goal_index]
            best_path = [remap[i] for i in self.path_indices(self.goal_index)]
        return {
            "vertices": vertices,
            "edges": edges,
            "best_path": best_path,
            "goal_index": goal,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MotionGraph":
        """Rebuild a tree from a dump, preserving dump vertex indices.

        Vertex 0 must be the start; parents are recovered by search from it.
        """
        vertices = doc["vertices"]
        if not vertices:
            raise PlanningError("graph dump has no vertices")
        n = len(vertices)
        adjacency: dict[int, list[tuple[int, float]]] = {i: [] for i in range(n)}
        for e in doc["edges"]:
            adjacency[e["a"]].append((e["b"], e["cost"]))
            adjacency[e["b"]].append((e["a"], e["cost"]))
        parent: list[int | None] = [None] * n
        edge_cost = [0.0] * n
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w, c in adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    edge_cost[w] = c
                    stack.append(w)
        if len(seen) != n:
            raise PlanningError("graph dump is not a connected tree")

        graph = cls(Pose(vertices[0]["x"], vertices[0]["y"], vertices[0]["theta"]))
        for i in range(1, n):
            graph.poses.append(Pose(vertices[i]["x"], vertices[i]["y"], vertices[i]["theta"]))
            graph.parent.append(parent[i])
            graph.edge_cost.append(edge_cost[i])
            graph.children.append([])
            graph._append(graph.poses[i], float(vertices[i]["cost"]))
        for i in range(1, n):
            graph.children[parent[i]].append(i)
        for i in range(1, n):  # dumped costs must telescope along the tree
            expect = graph._ctc[parent[i]] + edge_cost[i]
            if abs(graph._ctc[i] - expect) > 1e-6 * max(1.0, abs(expect)):
                raise PlanningError("graph dump has inconsistent costs")
        if doc.get("goal_index") is not None:
            graph.goal_index = int(doc["goal_index"])
        return graph


def build_tree(problem: Problem) -> MotionGraph:
    """Run the sampling loop for the configured number of iterations.

    Returns the final graph; a graph holding only the start vertex is a
    valid outcome. Per-iteration best goal cost and alive vertex counts are
    recorded on the graph for diagnostics.
    """
    world, pp, cp = problem.world, problem.planner, problem.control
    wd = objective_distance(pp.objective, pp.alpha, pp.beta, pp.kappa)
    uniform = pp.objective == "uniform"
    informed = pp.informed != "off"
    rng = np.random.default_rng(pp.seed)
    goal = problem.goal

    graph = MotionGraph(problem.start)
    if problem.start == goal:
        graph.goal_index = 0

    for _ in range(pp.samples):
        if graph.goal_index is None:
            p_rand = sample_free_pose(world, rng, goal, pp.goal_bias)
        else:
            p_rand = sample_uniform_pose(world, rng)
        b = graph.nearest_index(p_rand, wd)
        p_best = graph.poses[b]
        p_new = project(p_best, p_rand, pp.step_radius, pp.step_angle)

        # projection snaps positions exactly; a non-goal vertex sitting at
        # the goal position would win every later nearest(goal) query while
        # never being safely connectable to the goal (degenerate pair), so
        # it would deadlock goal connection: skip it
        degenerate_goal = (
            p_new != goal and p_new.x == goal.x and p_new.y == goal.y
        )
        if degenerate_goal or graph.contains_pose(p_new) or not issafe(
            p_best, p_new, world, cp
        ):
            _record(graph)
            continue

        near = graph.neighbor_indices(p_new, pp.neighbor_radius, pp.neighbor_angle)
        if uniform:
            edge_costs = np.ones(len(near))
            best_edge = 1.0
        else:
            edge_costs = wd.value_arr(
                p_new, graph._xs[near], graph._ys[near],
                graph._cos[near], graph._sin[near],
            )
            sl = slice(b, b + 1)
            best_edge = float(wd.value_arr(
                p_new, graph._xs[sl], graph._ys[sl], graph._cos[sl], graph._sin[sl]
            )[0])
        p_min, mincost = b, graph.cost_to_come(b) + best_edge
        edge_min = best_edge
        # scanning neighbors in (cost, index) order gives the same argmin as
        # the in-order scan, with safety checked only until the first hit
        tempcost = graph._ctc[near] + edge_costs
        for j in np.argsort(tempcost, kind="stable"):
            if tempcost[j] >= mincost:
                break
            cand = int(near[j])
            if issafe(graph.poses[cand], p_new, world, cp):
                p_min, mincost, edge_min = cand, float(tempcost[j]), float(edge_costs[j])
                break

        if informed and graph.goal_index is not None:
            bound = graph.cost_to_come(graph.goal_index)
            if mincost + heuristic(p_new, goal, wd, pp.informed) > bound:
                graph.rejected += 1
                _record(graph)
                continue

        if edge_min <= 0.0:  # degenerate sample coincident with its parent
            _record(graph)
            continue
        v = graph.add_vertex(p_new, p_min, edge_min)
        if p_new == goal:
            graph.goal_index = v

        ctc_new = graph.cost_to_come(v)
        for j, cand in enumerate(near):
            cand = int(cand)
            if not graph.is_alive(cand) or cand == p_min:
                continue
            c = float(edge_costs[j])
            if c <= 0.0:
                continue
            if ctc_new + c < graph.cost_to_come(cand) and issafe(
                p_new, graph.poses[cand], world, cp
            ):
                graph.rewire(cand, v, c)

        if informed and graph.goal_index is not None:
            prune(graph, goal, wd, pp.informed)
        _record(graph)
    return graph


def _record(graph: MotionGraph) -> None:
    cost = (
        graph.cost_to_come(graph.goal_index)
        if graph.goal_index is not None
        else math.inf
    )
    graph.iteration_costs.append(cost)
    graph.iteration_vertices.append(graph.alive_count)


def prune(graph: MotionGraph, goal: Pose, wd: WeightedDistance, mode: str) -> MotionGraph:
    """Remove vertices that no optimal path can pass through.

    A vertex fails when its cost-to-come plus the admissible heuristic to
    the goal exceeds the incumbent goal cost; failing vertices fall with
    their whole subtrees. Never removes the start, the goal, or any vertex
    on the current best path (asserted).
    """
    gi = graph.goal_index
    if gi is None or not graph.is_alive(gi):
        return graph
    bound = graph.cost_to_come(gi) + _PRUNE_SLACK
    n = len(graph)
    if mode == "euclidean":
        h = wd.alpha * np.hypot(graph._xs[:n] - goal.x, graph._ys[:n] - goal.y)
    else:
        h = np.zeros(n)
    failing = (graph._ctc[:n] + h > bound) & graph._alive[:n]
    if not failing.any():
        return graph
    fail_set = set(np.flatnonzero(failing).tolist())
    best = set(graph.path_indices(gi))
    # the admissible heuristic cannot flag the start, the goal, or any
    # best-path vertex; a hit here means the bound arithmetic is broken
    assert not (fail_set & best), "informed pruning flagged a best-path vertex"
    for v in sorted(fail_set):
        if graph.is_alive(v):
            graph.kill_subtree(v)
    return graph


def extract_path(graph: MotionGraph, goal) -> list[Pose]:
    """Start-to-goal pose sequence along parent pointers.

    goal may be a vertex index or an exact pose already in the graph.
    """
    if isinstance(goal, Pose):
        idx = graph.index_of(goal)
        if idx is None:
            raise PlanningError("goal pose is not a graph vertex")
    else:
        idx = int(goal)
        if not (0 <= idx < len(graph)) or not graph.is_alive(idx):
            raise PlanningError("goal index is not an alive graph vertex")
    return [graph.poses[i] for i in graph.path_indices(idx)]
