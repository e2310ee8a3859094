"""Exact 2D primitives: heading vectors, small convex hulls, containment, separation.

Everything here is pure and operates on immutable values, so all functions are
safe to call concurrently. Shapes are tiny (hulls of at most a handful of
points, obstacles with few edges), so distances are computed by direct
enumeration of vertex/edge pairs instead of iterative algorithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class Vec2:
    """Planar point or displacement in meters."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def wrap_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi); exact no-op for angles already inside."""
    if -math.pi <= theta < math.pi:
        return theta
    wrapped = (theta + math.pi) % (2.0 * math.pi) - math.pi
    if wrapped >= math.pi:  # rounding at the modulus boundary
        wrapped -= 2.0 * math.pi
    return wrapped


def heading_vectors(theta: float) -> tuple[Vec2, Vec2]:
    """Unit heading o(theta) and its +90 degree rotation n(theta).

    o = (cos t, sin t), n = (-sin t, cos t), so det[o n] = 1.
    """
    c, s = math.cos(theta), math.sin(theta)
    return Vec2(c, s), Vec2(-s, c)


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with CCW vertices; degenerate 1- and 2-vertex cases allowed."""

    vertices: tuple[Vec2, ...]

    def __post_init__(self):
        if len(self.vertices) == 0:
            raise ValueError("polygon needs at least one vertex")

    def edges(self) -> list[tuple[Vec2, Vec2]]:
        v = self.vertices
        if len(v) == 1:
            return [(v[0], v[0])]
        if len(v) == 2:
            return [(v[0], v[1])]
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def aabb(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class Ball:
    """Closed disk."""

    center: Vec2
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("ball radius must be >= 0")

    def aabb(self) -> tuple[float, float, float, float]:
        c, r = self.center, self.radius
        return c.x - r, c.y - r, c.x + r, c.y + r


Shape = Union[ConvexPolygon, Ball]


def convex_hull(points: Sequence[Vec2]) -> ConvexPolygon:
    """Minimal CCW convex polygon containing the points.

    Duplicate and collinear interior points are dropped. Collinear input
    collapses to a 2-vertex segment, a single repeated point to 1 vertex.
    """
    if len(points) == 0:
        raise ValueError("convex hull of empty point set")
    pts = sorted(set((p.x, p.y) for p in points))
    if len(pts) == 1:
        return ConvexPolygon((Vec2(*pts[0]),))

    def half(seq):
        out: list[tuple[float, float]] = []
        for p in seq:
            while len(out) >= 2:
                ax, ay = out[-2]
                bx, by = out[-1]
                if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) <= 0.0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # all points collinear: keep the two extremes
        hull = [pts[0], pts[-1]]
    return ConvexPolygon(tuple(Vec2(*p) for p in hull))


def hull_contains(poly: ConvexPolygon, p: Vec2, tol: float = 0.0) -> bool:
    """True iff p is inside poly or within tol of its boundary."""
    v = poly.vertices
    if len(v) == 1:
        return (p - v[0]).norm() <= tol
    if len(v) == 2:
        return _point_segment_distance(p, v[0], v[1]) <= tol
    for a, b in poly.edges():
        e = b - a
        # signed distance of p to the edge line, positive inside (CCW)
        d = e.cross(p - a) / e.norm()
        if d < -tol:
            return False
    return True


def hull_contains_points(
    poly: ConvexPolygon, xs: np.ndarray, ys: np.ndarray, tol: float = 0.0
) -> np.ndarray:
    """Vectorized hull_contains for arrays of point coordinates."""
    v = poly.vertices
    if len(v) == 1:
        return np.hypot(xs - v[0].x, ys - v[0].y) <= tol
    if len(v) == 2:
        return _point_segment_distance_arr(xs, ys, v[0], v[1]) <= tol
    inside = np.ones(np.shape(xs), dtype=bool)
    for a, b in poly.edges():
        ex, ey = b.x - a.x, b.y - a.y
        elen = math.hypot(ex, ey)
        d = (ex * (ys - a.y) - ey * (xs - a.x)) / elen
        inside &= d >= -tol
    return inside


def _point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ab = b - a
    denom = ab.dot(ab)
    if denom == 0.0:
        return (p - a).norm()
    t = max(0.0, min(1.0, (p - a).dot(ab) / denom))
    return (p - (a + t * ab)).norm()


def _point_segment_distance_arr(xs, ys, a: Vec2, b: Vec2):
    abx, aby = b.x - a.x, b.y - a.y
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return np.hypot(xs - a.x, ys - a.y)
    t = np.clip(((xs - a.x) * abx + (ys - a.y) * aby) / denom, 0.0, 1.0)
    return np.hypot(xs - (a.x + t * abx), ys - (a.y + t * aby))


def _segment_segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> float:
    if _segments_intersect(a, b, c, d):
        return 0.0
    return min(
        _point_segment_distance(a, c, d),
        _point_segment_distance(b, c, d),
        _point_segment_distance(c, a, b),
        _point_segment_distance(d, a, b),
    )


def _segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool:
    def orient(p, q, r):
        val = (q - p).cross(r - p)
        if val > 0:
            return 1
        if val < 0:
            return -1
        return 0

    def on_seg(p, q, r):  # r collinear with pq: is r within the bounding box
        return (
            min(p.x, q.x) <= r.x <= max(p.x, q.x)
            and min(p.y, q.y) <= r.y <= max(p.y, q.y)
        )

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(a, b, c):
        return True
    if o2 == 0 and on_seg(a, b, d):
        return True
    if o3 == 0 and on_seg(c, d, a):
        return True
    if o4 == 0 and on_seg(c, d, b):
        return True
    return False


def _point_polygon_distance(p: Vec2, poly: ConvexPolygon) -> float:
    """Distance from a point to a convex polygon (0 if inside)."""
    if hull_contains(poly, p, 0.0):
        return 0.0
    return min(_point_segment_distance(p, a, b) for a, b in poly.edges())


def separation(a: Shape, b: Shape) -> float:
    """Euclidean minimum distance between two convex shapes; 0 if they intersect."""
    if isinstance(a, Ball) and isinstance(b, Ball):
        return max(0.0, (a.center - b.center).norm() - a.radius - b.radius)
    if isinstance(a, Ball):
        a, b = b, a
    if isinstance(b, Ball):
        return max(0.0, _point_polygon_distance(b.center, a) - b.radius)
    # polygon vs polygon: boundaries via edge pairs, nesting via containment
    if hull_contains(a, b.vertices[0], 0.0) or hull_contains(b, a.vertices[0], 0.0):
        return 0.0
    best = math.inf
    for ea in a.edges():
        for eb in b.edges():
            best = min(best, _segment_segment_distance(*ea, *eb))
            if best == 0.0:
                return 0.0
    return best


def point_separation(p: Vec2, shape: Shape) -> float:
    """Distance from a point to a convex shape (0 if inside)."""
    if isinstance(shape, Ball):
        return max(0.0, (p - shape.center).norm() - shape.radius)
    return _point_polygon_distance(p, shape)
