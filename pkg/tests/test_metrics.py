import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uniplan.control import Pose
from uniplan.metrics import (
    WeightedDistance,
    angular_geodesic,
    cosine,
    distance,
    distance_arr,
    dualhead_orientation,
    dualhead_translation,
    euccos,
    euclidean,
    headtail,
    k_nearest,
    kappa_anchors,
    nearest,
    nearest_index,
    weighted,
    neighbors,
    neighbors_coupled,
    objective_distance,
    project,
)

PI = math.pi
KAPPA = 1.0 / 3.0

pose_st = st.builds(
    Pose,
    st.floats(-10, 10, allow_nan=False),
    st.floats(-10, 10, allow_nan=False),
    st.floats(-PI, PI - 1e-9),
)


def two_path_minimum(p: Pose, q: Pose, kappa: float) -> float:
    """Oracle: total lengths of the two explicit anchor-point paths."""
    head_p, tail_p, head_q, tail_q = kappa_anchors(p, q, kappa)
    pp, qq = p.position, q.position
    via_head = (pp - head_p).norm() + (head_p - tail_q).norm() + (tail_q - qq).norm()
    via_tail = (pp - tail_p).norm() + (tail_p - head_q).norm() + (head_q - qq).norm()
    return min(via_head, via_tail)


def random_pose_pairs(rng, n):
    xs = rng.uniform(-8, 8, (n, 2))
    ys = rng.uniform(-8, 8, (n, 2))
    ths = rng.uniform(-PI, PI, (n, 2))
    return [
        (Pose(xs[i, 0], ys[i, 0], ths[i, 0]), Pose(xs[i, 1], ys[i, 1], ths[i, 1]))
        for i in range(n)
    ]


class TestKappaAnchors:
    def test_aligned_pair(self):
        head_p, tail_p, head_q, tail_q = kappa_anchors(
            Pose(0, 0, 0), Pose(1, 0, 0), KAPPA
        )
        assert (head_p.x, head_p.y) == pytest.approx((1 / 3, 0))
        assert (tail_p.x, tail_p.y) == pytest.approx((-1 / 3, 0))
        assert (head_q.x, head_q.y) == pytest.approx((4 / 3, 0))
        assert (tail_q.x, tail_q.y) == pytest.approx((2 / 3, 0))

    def test_coincident_positions(self):
        pts = kappa_anchors(Pose(2, 1, 0.4), Pose(2, 1, -2.0), KAPPA)
        for v in pts:
            assert (v.x, v.y) == (2.0, 1.0)

    def test_perpendicular_goal_heading(self):
        _, _, head_q, _ = kappa_anchors(Pose(0, 0, 0), Pose(1, 0, PI / 2), KAPPA)
        assert (head_q.x, head_q.y) == pytest.approx((1.0, 1 / 3))


class TestDistanceValues:
    def test_aligned_dualhead(self):
        p, q = Pose(0, 0, 0), Pose(1, 0, 0)
        assert dualhead_translation(p, q, KAPPA) == pytest.approx(1.0)
        assert dualhead_orientation(p, q, KAPPA) == pytest.approx(0.0)

    def test_perpendicular_dualhead(self):
        p, q = Pose(0, 0, 0), Pose(1, 0, PI / 2)
        assert dualhead_translation(p, q, KAPPA) == pytest.approx((2 + math.sqrt(5)) / 3)
        assert dualhead_orientation(p, q, KAPPA) == pytest.approx((math.sqrt(5) - 1) / 3)

    def test_cosine_basics(self):
        assert cosine(Pose(0, 0, 0), Pose(5, 5, PI / 2)) == pytest.approx(1.0)
        assert cosine(Pose(0, 0, 1.2), Pose(0, 0, 1.2)) == 0.0

    def test_euccos(self):
        assert euccos(Pose(0, 0, 0), Pose(1, 0, PI / 2)) == pytest.approx(2.0)

    def test_weighted_combination(self):
        wd = WeightedDistance(1.0, 10.0, "dualhead_trans", "dualhead_orient", KAPPA)
        value = wd.value(Pose(0, 0, 0), Pose(1, 0, PI / 2))
        expected = (2 + math.sqrt(5)) / 3 + 10 * (math.sqrt(5) - 1) / 3
        assert value == pytest.approx(expected)
        assert value == pytest.approx(5.53225, abs=1e-5)

    def test_weighted_extremes(self):
        p, q = Pose(0, 0, 0.3), Pose(2, 1, -0.7)
        only_t = WeightedDistance(1.0, 0.0, "euclidean", "cosine")
        only_o = WeightedDistance(0.0, 1.0, "euclidean", "cosine")
        assert only_t.value(p, q) == euclidean(p, q)
        assert only_o.value(p, q) == cosine(p, q)
        assert weighted(only_t, p, q) == only_t.value(p, q)

    def test_degenerate_coincident_positions(self):
        p, q = Pose(1, 1, 0), Pose(1, 1, PI / 2)
        assert dualhead_translation(p, q, KAPPA) == 0.0
        assert headtail(p, q, KAPPA) == 0.0
        expected = 2 * KAPPA - KAPPA * math.hypot(1 + 0, 0 + 1)
        assert dualhead_orientation(p, q, KAPPA) == pytest.approx(expected)

    def test_degenerate_opposite_headings_max_orientation(self):
        p, q = Pose(0, 0, 0), Pose(0, 0, PI)
        assert dualhead_orientation(p, q, KAPPA) == pytest.approx(2 * KAPPA)

    def test_angular_geodesic(self):
        assert angular_geodesic(Pose(0, 0, 0.5), Pose(0, 0, -0.5)) == pytest.approx(1.0)
        assert angular_geodesic(Pose(0, 0, PI - 0.1), Pose(0, 0, -PI + 0.1)) == pytest.approx(0.2)


class TestIdentitiesAndBounds:
    def test_path_identity_oracle(self, rng):
        # the factored form equals the explicit two-path minimum
        for p, q in random_pose_pairs(rng, 2000):
            if p.distance_to(q) < 1e-12:
                continue
            assert dualhead_translation(p, q, KAPPA) == pytest.approx(
                two_path_minimum(p, q, KAPPA), abs=1e-12, rel=1e-12
            )

    def test_headtail_orientation_identity(self, rng):
        for p, q in random_pose_pairs(rng, 2000):
            L = p.distance_to(q)
            if L < 1e-12:
                continue
            lhs = headtail(p, q, KAPPA) / L - 1 + 2 * KAPPA
            assert lhs == pytest.approx(dualhead_orientation(p, q, KAPPA), abs=1e-12)

    def test_symmetry_all_kinds(self, rng):
        kinds = ("euclidean", "cosine", "euccos", "dualhead_trans",
                 "dualhead_orient", "headtail")
        for p, q in random_pose_pairs(rng, 1000):
            for kind in kinds:
                assert distance(kind, p, q, KAPPA) == pytest.approx(
                    distance(kind, q, p, KAPPA), abs=1e-12
                )

    def test_range_bounds(self, rng):
        for p, q in random_pose_pairs(rng, 2000):
            L = p.distance_to(q)
            if L < 1e-9:
                continue
            ec = euccos(p, q)
            assert L - 1e-12 <= ec <= 3 * L + 1e-12
            ratio = dualhead_translation(p, q, KAPPA) / L
            assert 1 - 1e-12 <= ratio <= 1 + 4 * KAPPA + 1e-12
            do = dualhead_orientation(p, q, KAPPA)
            assert -1e-12 <= do <= 4 * KAPPA + 1e-12
            m = headtail(p, q, KAPPA) / L
            assert 1 - 2 * KAPPA - 1e-12 <= m <= 1 + 2 * KAPPA + 1e-12

    def test_euclidean_lower_bounds_dualhead(self, rng):
        for p, q in random_pose_pairs(rng, 2000):
            assert euclidean(p, q) <= dualhead_translation(p, q, KAPPA) + 1e-12

    @given(pose_st, pose_st)
    def test_nonnegative(self, p, q):
        for kind in ("euclidean", "cosine", "euccos", "dualhead_trans",
                     "dualhead_orient", "headtail"):
            assert distance(kind, p, q, KAPPA) >= -1e-15

    def test_array_forms_match_scalar(self, rng):
        pairs = random_pose_pairs(rng, 500)
        p = Pose(0.5, -1.0, 0.8)
        qs = [q for _, q in pairs]
        xs = np.array([q.x for q in qs])
        ys = np.array([q.y for q in qs])
        th = np.array([q.theta for q in qs])
        for kind in ("euclidean", "cosine", "euccos", "dualhead_trans",
                     "dualhead_orient", "headtail"):
            arr = distance_arr(kind, p, xs, ys, np.cos(th), np.sin(th), KAPPA)
            for i, q in enumerate(qs):
                assert arr[i] == pytest.approx(distance(kind, p, q, KAPPA), abs=1e-12)


class TestNearestAndNeighbors:
    def test_singleton(self):
        wd = objective_distance("dualhead", 1.0, 10.0, KAPPA)
        only = Pose(3, 3, 1)
        assert nearest([only], Pose(0, 0, 0), wd) == only

    def test_tie_breaks_to_first(self):
        wd = WeightedDistance(1.0, 0.0, "euclidean", "cosine")
        poses = [Pose(1, 0, 0), Pose(-1, 0, 0), Pose(5, 5, 0)]
        assert nearest_index(poses, Pose(0, 0, 0), wd) == 0

    def test_matches_bruteforce(self, rng):
        wd = objective_distance("dualhead", 1.0, 10.0, KAPPA)
        poses = [q for _, q in random_pose_pairs(rng, 100)]
        for p, _ in random_pose_pairs(rng, 50):
            best = min(range(len(poses)), key=lambda i: (wd.value(p, poses[i]), i))
            got = nearest_index(poses, p, wd)
            assert wd.value(p, poses[got]) == pytest.approx(
                wd.value(p, poses[best]), abs=1e-12
            )

    def test_neighbors_infinite_radii_everything(self, rng):
        poses = [q for _, q in random_pose_pairs(rng, 40)]
        got = neighbors(poses, Pose(0, 0, 0), math.inf, math.inf)
        assert got == poses

    def test_neighbors_zero_position_radius(self):
        poses = [Pose(0, 0, 0.1), Pose(1, 0, 0), Pose(0, 0, 3.0)]
        got = neighbors(poses, Pose(0, 0, 0), 0.0, 0.1)
        assert got == [Pose(0, 0, 0.1)]

    def test_neighbors_match_bruteforce_filter(self, rng):
        poses = [q for _, q in random_pose_pairs(rng, 200)]
        p = Pose(0, 0, 0)
        dp, dth = 4.0, 0.5
        expected = [
            q for q in poses
            if euclidean(p, q) <= dp and cosine(p, q) <= dth
        ]
        assert neighbors(poses, p, dp, dth) == expected

    def test_coupled_contains_decoupled_when_radius_large(self, rng):
        # delta_r >= alpha dp + beta dth makes the coupled set a superset
        wd = WeightedDistance(1.0, 2.0, "euclidean", "cosine")
        poses = [q for _, q in random_pose_pairs(rng, 300)]
        p = Pose(0.3, -0.2, 0.5)
        dp, dth = 3.0, 0.4
        decoupled = set(map(id, neighbors(poses, p, dp, dth)))
        coupled = set(map(id, neighbors_coupled(poses, p, wd, 1.0 * dp + 2.0 * dth)))
        assert decoupled <= coupled

    def test_coupled_inside_decoupled_when_radius_small(self, rng):
        wd = WeightedDistance(1.0, 2.0, "euclidean", "cosine")
        poses = [q for _, q in random_pose_pairs(rng, 300)]
        p = Pose(0.3, -0.2, 0.5)
        dp, dth = 3.0, 0.4
        decoupled = set(map(id, neighbors(poses, p, dp, dth)))
        coupled = set(map(id, neighbors_coupled(poses, p, wd, min(1.0 * dp, 2.0 * dth))))
        assert coupled <= decoupled

    def test_k_nearest_sorted_prefix(self, rng):
        wd = objective_distance("euclidean", 1.0, 1.0, KAPPA)
        poses = [q for _, q in random_pose_pairs(rng, 50)]
        p = Pose(0, 0, 0)
        values = sorted((wd.value(p, q), i) for i, q in enumerate(poses))
        for k in (1, 5, 50):
            got = k_nearest(poses, p, wd, k)
            assert got == [poses[i] for _, i in values[:k]]
        assert k_nearest(poses, p, wd, 0) == []


class TestProjection:
    def test_position_clamped(self):
        out = project(Pose(0, 0, 0), Pose(3, 0, 0), 1.0, 0.5)
        assert (out.x, out.y) == pytest.approx((1.0, 0.0))

    def test_inside_both_radii_returned_exactly(self):
        target = Pose(0.25, -0.1, 0.2)
        out = project(Pose(0, 0, 0), target, 1.0, 1 - math.cos(0.5))
        assert out == target

    def test_angle_boundary_sign(self):
        step_ang = 1 - math.cos(PI / 6)
        out = project(Pose(0, 0, 0), Pose(0, 0, PI / 2), 1.0, step_ang)
        assert out.theta == pytest.approx(PI / 6)
        out = project(Pose(0, 0, 0), Pose(0, 0, -PI / 2), 1.0, step_ang)
        assert out.theta == pytest.approx(-PI / 6)

    def test_orientation_optimality_bruteforce(self, rng):
        # projected heading minimizes cosine distance to the target among a
        # dense grid of headings satisfying the step constraint
        grid = np.linspace(-PI, PI, 10_000, endpoint=False)
        for _ in range(50):
            frm = Pose(0, 0, rng.uniform(-PI, PI))
            target = Pose(0, 0, rng.uniform(-PI, PI))
            step_ang = rng.uniform(0.05, 1.9)
            out = project(frm, target, 1.0, step_ang)
            assert 1 - math.cos(out.theta - frm.theta) <= step_ang + 1e-9
            feasible = grid[1 - np.cos(grid - frm.theta) <= step_ang]
            best = np.min(1 - np.cos(feasible - target.theta))
            mine = 1 - math.cos(out.theta - target.theta)
            assert mine <= best + 1e-6

    def test_position_optimality_bruteforce(self, rng):
        for _ in range(50):
            frm = Pose(*rng.uniform(-2, 2, 2), 0.0)
            target = Pose(*rng.uniform(-4, 4, 2), 0.0)
            step = rng.uniform(0.2, 2.0)
            out = project(frm, target, step, 1.0)
            d_frm = math.hypot(out.x - frm.x, out.y - frm.y)
            assert d_frm <= step + 1e-12
            # any feasible point is no closer to the target
            angles = np.linspace(0, 2 * PI, 64, endpoint=False)
            radii = np.linspace(0, step, 16)
            best = min(
                math.hypot(frm.x + r * math.cos(a) - target.x,
                           frm.y + r * math.sin(a) - target.y)
                for a in angles for r in radii
            )
            mine = math.hypot(out.x - target.x, out.y - target.y)
            assert mine <= best + 1e-9
