"""Multiple-shooting iteration: junction angles, the collinear condition,
updates, and the outer solve loop."""
import math

import pytest

from shootpath.bundles import CuttingSegment, bundle_sequence, fan
from shootpath.funnel import cut_crossing, relax_crossings
from shootpath.geometry import (
    DEFAULT_TOL,
    Point2,
    Segment,
    dist,
    point_segment_distance,
    polyline,
)
from shootpath.instances import random_bundle_sequence
from shootpath.shooting import (
    ConvergedBy,
    DegenerateJunctionError,
    ShootingState,
    SolveLimits,
    _solve_subpaths,
    check_collinear,
    collinear_update,
    default_group_count,
    initial_state,
    junction_angle,
    pick_t_points,
    solve,
    update_shooting_point,
)

HALF_PI = math.pi / 2.0


def straight_chain(n=3, span=8.0):
    """Fan vertices on the p-q line, fans leaning up: the straight segment
    is feasible and optimal."""
    p, q = Point2(0, 0), Point2(span, 0)
    step = span / (n + 1)
    interior = [fan(Point2(step * i, 0), [Point2(step * i - 0.3, 1.0)])
                for i in range(1, n + 1)]
    return bundle_sequence(p, interior, q)


def junction_state(before_pts, s, after_pts, u, v):
    """Minimal one-junction state for angle tests."""
    before = polyline(list(before_pts) + [s])
    after = polyline([s] + list(after_pts))
    cuts = (CuttingSegment(before_pts[0], before_pts[0], source=0),
            CuttingSegment(u, v, source=1),
            CuttingSegment(after_pts[-1], after_pts[-1], source=2))
    return ShootingState(cuts=cuts, points=(before_pts[0], s, after_pts[-1]),
                         subpaths=(before, after), iteration=0,
                         total_length=before.length + after.length)


def snap_to_cuts(seq, verts, cuts, slack=1e-6):
    """Crossing points of a polyline with the cuts, endpoint-snapped."""
    scale = max(1.0, seq.diameter())
    pts = [seq.p]
    for cut in cuts[1:-1]:
        p, _ = cut_crossing(verts, cut)
        if dist(p, cut.u) < slack * scale:
            p = cut.u
        elif dist(p, cut.v) < slack * scale:
            p = cut.v
        pts.append(p)
    pts.append(seq.q)
    return tuple(pts)


def state_with_points(template, pts):
    subs, crossings, _ = _solve_subpaths(template.corridors, pts, DEFAULT_TOL)
    return ShootingState(cuts=template.cuts, points=pts, subpaths=subs,
                         iteration=0,
                         total_length=sum(s.length for s in subs),
                         crossings=crossings, corridors=template.corridors)


class TestInitialState:
    def test_straight_corridor_starts_optimal(self):
        seq = straight_chain(3)
        st = initial_state(seq, 1)
        assert st.total_length == pytest.approx(8.0)
        assert st.points[0] == seq.p
        assert st.points[-1] == seq.q

    def test_points_start_at_cut_free_endpoints(self):
        seq = random_bundle_sequence(1)
        K = default_group_count(len(seq.interior))
        st = initial_state(seq, K)
        for i in range(1, st.k + 1):
            assert st.points[i] == st.cuts[i].v

    def test_shooting_points_lie_on_their_cuts(self):
        seq = random_bundle_sequence(4)
        st = initial_state(seq, 2)
        for i in range(1, st.k + 1):
            assert point_segment_distance(st.points[i],
                                          st.cuts[i].as_segment()) < 1e-9

    def test_subpath_count_matches_groups(self):
        seq = straight_chain(5)
        st = initial_state(seq, 2)
        assert len(st.subpaths) == 3
        assert len(st.cuts) == 4


class TestJunctionAngle:
    def test_straight_pass_through_is_pi(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(3, 0)],
                            u=Point2(2, 1), v=Point2(2, -1))
        assert junction_angle(st, 1) == pytest.approx(math.pi)

    def test_right_angle_turn_unfolds_to_three_half_pi(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(2, 1)],
                            u=Point2(2, 1), v=Point2(2, -1))
        assert junction_angle(st, 1) == pytest.approx(3 * HALF_PI)

    def test_degenerate_cut_rejected(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(3, 0)],
                            u=Point2(2, 0), v=Point2(2, 0))
        with pytest.raises(DegenerateJunctionError):
            junction_angle(st, 1)

    def test_index_out_of_range(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(3, 0)],
                            u=Point2(2, 1), v=Point2(2, -1))
        with pytest.raises(Exception):
            junction_angle(st, 2)


class TestCheckCollinear:
    def test_interior_point_needs_angle_pi(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(3, 0)],
                            u=Point2(2, 1), v=Point2(2, -1))
        assert check_collinear(st, 1, tol_angle=1e-7)

    def test_interior_point_off_pi_fails(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(2, 1)],
                            u=Point2(2, 1), v=Point2(2, -1))
        assert not check_collinear(st, 1, tol_angle=1e-7)

    def test_at_u_large_angle_passes(self):
        # 3*pi/2 total at s = u satisfies the one-sided condition
        st = junction_state([Point2(1, 1)], Point2(2, 1), [Point2(2, 2)],
                            u=Point2(2, 1), v=Point2(2, -1))
        assert junction_angle(st, 1) == pytest.approx(3 * HALF_PI)
        assert check_collinear(st, 1, tol_angle=1e-7)

    def test_at_v_large_angle_fails(self):
        st = junction_state([Point2(1, -1)], Point2(2, -1), [Point2(2, 0)],
                            u=Point2(2, 1), v=Point2(2, -1))
        assert junction_angle(st, 1) == pytest.approx(3 * HALF_PI)
        assert not check_collinear(st, 1, tol_angle=1e-7)

    def test_degenerate_cut_always_holds(self):
        st = junction_state([Point2(1, 0)], Point2(2, 0), [Point2(3, 0)],
                            u=Point2(2, 0), v=Point2(2, 0))
        assert check_collinear(st, 1, tol_angle=1e-7)


class TestPickTPoints:
    @staticmethod
    def dummy_state(verts):
        path = polyline(verts)
        cuts = (CuttingSegment(verts[0], verts[0], source=0),
                CuttingSegment(verts[-1], verts[-1], source=1))
        return ShootingState(cuts=cuts, points=(verts[0], verts[-1]),
                             subpaths=(path,), iteration=0,
                             total_length=path.length)

    def test_single_segment_midpoint(self):
        st = self.dummy_state([Point2(0, 0), Point2(4, 0)])
        assert pick_t_points(st) == (Point2(2, 0),)

    def test_single_interior_vertex(self):
        st = self.dummy_state([Point2(0, 0), Point2(2, 1), Point2(4, 0)])
        assert pick_t_points(st) == (Point2(2, 1),)

    def test_tie_breaks_to_earlier_vertex(self):
        st = self.dummy_state([Point2(0, 0), Point2(1, 1),
                               Point2(3, 1), Point2(4, 0)])
        assert pick_t_points(st) == (Point2(1, 1),)


class TestCutCrossing:
    def test_straight_crossing(self):
        cut = CuttingSegment(Point2(2, 1), Point2(2, -1), source=0)
        pt, fb = cut_crossing([Point2(0, 0), Point2(4, 0)], cut)
        assert dist(pt, Point2(2, 0)) < 1e-12
        assert not fb

    def test_overlap_resolves_toward_u(self):
        cut = CuttingSegment(Point2(2, 1), Point2(2, -1), source=0)
        path = [Point2(0, 0), Point2(2, 0), Point2(2, 0.5), Point2(4, 1)]
        pt, fb = cut_crossing(path, cut)
        assert dist(pt, Point2(2, 0.5)) < 1e-12
        assert not fb

    def test_numerically_empty_clamps_to_nearest(self):
        cut = CuttingSegment(Point2(2, 1), Point2(2, -1), source=0)
        pt, fb = cut_crossing([Point2(0, 0), Point2(1, 0)], cut)
        assert dist(pt, Point2(2, 0)) < 1e-12
        assert fb

    def test_degenerate_cut_returns_its_point(self):
        cut = CuttingSegment(Point2(3, 3), Point2(3, 3), source=0)
        pt, fb = cut_crossing([Point2(0, 0), Point2(1, 0)], cut)
        assert pt == Point2(3, 3)
        assert not fb


class TestCollinearUpdate:
    def test_fixed_point_when_all_collinear(self):
        seq = straight_chain(3)
        st = initial_state(seq, 1)
        new, done = collinear_update(st)
        assert done
        assert new is st

    def test_violating_junction_strictly_shortens(self):
        seq = random_bundle_sequence(0)
        st = initial_state(seq, default_group_count(len(seq.interior)))
        new, done = collinear_update(st)
        assert not done
        assert new.total_length < st.total_length
        assert new.iteration == st.iteration + 1

    def test_update_agrees_with_flags(self):
        # fixed-point equivalence spot check on one recorded iteration
        seq = random_bundle_sequence(0)
        st = initial_state(seq, default_group_count(len(seq.interior)))
        ts = pick_t_points(st)
        for i in range(1, st.k + 1):
            flag = check_collinear(st, i, SolveLimits().tol_angle)
            nxt = update_shooting_point(st, i, ts[i - 1], ts[i])
            assert flag == (dist(nxt, st.points[i]) <= 1e-9)


class TestSolve:
    def test_straight_corridor_converges_at_iteration_zero(self):
        seq = straight_chain(4)
        rep = solve(seq, K=1)
        assert rep.converged_by is ConvergedBy.COLLINEAR_CONDITION
        assert rep.iterations == 0
        assert rep.length == pytest.approx(8.0)

    def test_single_bundle_touching_spine(self):
        p, q = Point2(0, 0), Point2(4, 0)
        seq = bundle_sequence(p, [fan(Point2(2, 0), [Point2(2, 1)])], q)
        rep = solve(seq, K=1)
        assert rep.length == pytest.approx(4.0)

    def test_lengths_non_increasing(self):
        for seed in range(8):
            rep = solve(random_bundle_sequence(seed))
            tr = rep.per_iteration_lengths
            for a, b in zip(tr, tr[1:]):
                assert b <= a * (1 + 1e-10)

    def test_shooting_points_move_toward_u_only(self):
        for seed in range(8):
            seq = random_bundle_sequence(seed)
            rep = solve(seq, record_states=True)
            for st_a, st_b in zip(rep.states, rep.states[1:]):
                for i in range(1, st_a.k + 1):
                    seg = Segment(st_a.points[i], st_a.cuts[i].u)
                    assert point_segment_distance(st_b.points[i], seg) <= 1e-9

    def test_fixed_point_equivalence_every_iteration(self):
        for seed in range(6):
            seq = random_bundle_sequence(seed)
            rep = solve(seq, record_states=True)
            for st in rep.states:
                ts = pick_t_points(st)
                for i in range(1, st.k + 1):
                    flag = check_collinear(st, i, SolveLimits().tol_angle)
                    nxt = update_shooting_point(st, i, ts[i - 1], ts[i])
                    assert flag == (dist(nxt, st.points[i]) <= 1e-9), \
                        f"seed {seed} junction {i}"

    def test_trace_is_cauchy_under_default_limits(self):
        for seed in (3, 5, 14):
            rep = solve(random_bundle_sequence(seed))
            tr = rep.per_iteration_lengths
            if len(tr) >= 2:
                assert abs(tr[-1] - tr[-2]) <= 1e-8 * tr[-2]

    def test_endpoints_pinned(self):
        seq = random_bundle_sequence(2)
        rep = solve(seq)
        assert dist(rep.path.vertices[0], seq.p) < 1e-9
        assert dist(rep.path.vertices[-1], seq.q) < 1e-9

    def test_max_iterations_reported(self):
        seq = random_bundle_sequence(3)
        rep = solve(seq, limits=SolveLimits(max_iter=1, tol_len=1e-300))
        assert rep.converged_by in (ConvergedBy.MAX_ITERATIONS,
                                    ConvergedBy.COLLINEAR_CONDITION)
        assert rep.iterations <= 1


class TestDefaultGroupCount:
    def test_values(self):
        assert default_group_count(1) == 1
        assert default_group_count(4) == 1
        assert default_group_count(5) == 1
        assert default_group_count(10) == 2
        assert default_group_count(12) == 2
        assert default_group_count(60) == 12

    def test_rejects_empty_interior(self):
        with pytest.raises(Exception):
            default_group_count(0)


class TestOptimalPolylineSatisfiesCondition:
    """A shortest path's crossing points pass the collinear check: verified
    on instances whose optimum is known in closed form, one per clause."""

    def test_interior_crossings_on_straight_optimum(self):
        seq = straight_chain(4)
        st = initial_state(seq, 2)
        pts = snap_to_cuts(seq, [seq.p, seq.q], st.cuts)
        st2 = state_with_points(st, pts)
        for i in range(1, st2.k + 1):
            assert check_collinear(st2, i, 10 * DEFAULT_TOL.tol_angle)

    def test_optimum_pinned_at_far_endpoint(self):
        # the cut hangs above the straight line; the optimum touches v
        p, q = Point2(0, 0), Point2(4, 0)
        seq = bundle_sequence(p, [fan(Point2(2, 1), [Point2(2, 0.5)])], q,)
        st = initial_state(seq, 1)
        assert dist(st.cuts[1].v, Point2(2, 0.5)) < 1e-12
        best = [p, Point2(2, 0.5), q]
        st2 = state_with_points(st, snap_to_cuts(seq, best, st.cuts))
        assert check_collinear(st2, 1, 10 * DEFAULT_TOL.tol_angle)

    def test_optimum_pinned_at_bundle_vertex(self):
        # the cut hangs below; the optimum touches u at the bundle vertex
        p, q = Point2(0, 0), Point2(4, 0)
        seq = bundle_sequence(p, [fan(Point2(2, -1), [Point2(2, -3)])], q)
        st = initial_state(seq, 1)
        assert dist(st.cuts[1].u, Point2(2, -1)) < 1e-12
        best = [p, Point2(2, -1), q]
        st2 = state_with_points(st, snap_to_cuts(seq, best, st.cuts))
        assert check_collinear(st2, 1, 10 * DEFAULT_TOL.tol_angle)

    def test_near_optimal_relaxation_agrees_at_loose_band(self):
        # numeric near-optima position-converge only as the square root of
        # their length error, so the band here is orders looser than the
        # solver's own angle tolerance
        for seed in (0, 1, 13):
            seq = random_bundle_sequence(seed)
            segs = [s for b in seq.interior for s in b.segments]
            verts = relax_crossings(segs, seq.p, seq.q)
            st = initial_state(seq, default_group_count(len(seq.interior)))
            st2 = state_with_points(st, snap_to_cuts(seq, verts, st.cuts))
            for i in range(1, st2.k + 1):
                assert check_collinear(st2, i, 1e-2)
