"""Corridor construction and taut shortest paths through ordered portals."""
import math
import random

import pytest

from shootpath.funnel import (
    NonSimpleCorridorError,
    PointOutsideCorridorError,
    _strip_folds,
    bundle_portals,
    corridor_is_simple,
    shortest_path_corridor,
    taut_path,
    triangulate_subsequence,
)
from shootpath.bundles import fan
from shootpath.geometry import (
    Point2,
    Segment,
    dist,
    lerp,
    point_segment_distance,
    polyline,
)
from shootpath.oracle import oracle_length

SQRT5 = math.sqrt(5.0)


def path_len(pts):
    return sum(dist(a, b) for a, b in zip(pts, pts[1:]))


def random_portal_stack(rng, n):
    """Disjoint near-vertical portals marching along +x."""
    portals = []
    for i in range(n):
        x = 2.0 * (i + 1) + rng.uniform(-0.4, 0.4)
        lo = rng.uniform(-4.0, 1.0)
        hi = lo + rng.uniform(0.5, 4.0)
        tilt = rng.uniform(-0.3, 0.3)
        portals.append(Segment(Point2(x, lo), Point2(x + tilt, hi)))
    src = Point2(0.0, rng.uniform(-2.0, 2.0))
    dst = Point2(2.0 * n + 2.0, rng.uniform(-2.0, 2.0))
    return portals, src, dst


class TestTriangulate:
    def test_single_bundle_corridor(self):
        b = fan(Point2(2, 0), [Point2(2, 1), Point2(2.5, 1)])
        c = triangulate_subsequence([b], Point2(0, 0),
                                    Segment(Point2(2, 0), Point2(2.5, 1)))
        assert len(c.triangles) == 2
        # entry triangle leans on the first fan segment, the strip triangle
        # spans the fan
        assert set(c.triangles[0]) == {Point2(0, 0), Point2(2, 0), Point2(2, 1)}
        assert set(c.triangles[1]) == {Point2(2, 0), Point2(2, 1), Point2(2.5, 1)}
        assert c.shared_edges == (Segment(Point2(2, 0), Point2(2, 1)),)

    def test_empty_interior_single_triangle(self):
        c = triangulate_subsequence([], Point2(0, 0),
                                    Segment(Point2(1, -1), Point2(1, 1)))
        assert len(c.triangles) == 1
        assert set(c.triangles[0]) == {Point2(0, 0), Point2(1, -1), Point2(1, 1)}

    def test_every_fan_segment_appears_as_an_edge(self):
        bundles = [fan(Point2(2, 0), [Point2(1.6, 1), Point2(2.2, 1.2)]),
                   fan(Point2(4, 0), [Point2(3.7, 0.9)])]
        exit_seg = bundles[-1].segments[-1]
        c = triangulate_subsequence(bundles, Point2(0, 0), exit_seg)
        fans = {frozenset((s.a, s.b)) for b in bundles for s in b.segments}
        edges = set()
        for t in c.triangles:
            edges |= {frozenset((t[0], t[1])), frozenset((t[1], t[2])),
                      frozenset((t[0], t[2]))}
        assert fans <= edges

    def test_crossing_bundles_rejected(self):
        b1 = fan(Point2(0, 0), [Point2(2, 2)])
        b2 = fan(Point2(2, 0), [Point2(0, 2)])
        with pytest.raises(NonSimpleCorridorError):
            triangulate_subsequence([b1, b2], Point2(-1, 0),
                                    b2.segments[-1])

    def test_simplicity_audit_accepts_clean_corridor(self):
        bundles = [fan(Point2(2, 0), [Point2(1.8, 1)]),
                   fan(Point2(4, 0), [Point2(3.8, 1)])]
        c = triangulate_subsequence(bundles, Point2(0, 0),
                                    bundles[-1].segments[-1])
        assert corridor_is_simple(c)


class TestShortestPathCorridor:
    def test_straight_line_through_wide_portal(self):
        b = fan(Point2(2, -1), [Point2(2, 1)])
        c = triangulate_subsequence([b], Point2(0, 0),
                                    Segment(Point2(4, 0), Point2(4, 0)))
        path = shortest_path_corridor(c, Point2(0, 0), Point2(4, 0))
        assert path.length == pytest.approx(4.0)
        assert list(path.vertices) == [Point2(0, 0), Point2(4, 0)]

    def test_forced_to_touch_nearest_endpoint(self):
        b = fan(Point2(2, 1), [Point2(2, 2)])
        c = triangulate_subsequence([b], Point2(0, 0),
                                    Segment(Point2(4, 0), Point2(4, 0)))
        path = shortest_path_corridor(c, Point2(0, 0), Point2(4, 0))
        assert path.length == pytest.approx(2.0 * SQRT5)
        assert Point2(2, 1) in path.vertices

    def test_source_outside_rejected(self):
        b = fan(Point2(2, -1), [Point2(2, 1)])
        c = triangulate_subsequence([b], Point2(0, 0),
                                    Segment(Point2(4, 0), Point2(4, 0)))
        with pytest.raises(PointOutsideCorridorError):
            shortest_path_corridor(c, Point2(0, -9), Point2(4, 0))


class TestTautPath:
    def test_no_portals_straight(self):
        assert taut_path([], Point2(0, 0), Point2(3, 1)) == \
            [Point2(0, 0), Point2(3, 1)]

    def test_matches_oracle_on_random_stacks(self):
        rng = random.Random(7)
        for _ in range(12):
            portals, src, dst = random_portal_stack(rng, rng.randint(1, 6))
            pts = taut_path(portals, src, dst)
            got = path_len(pts)
            ref = oracle_length(portals, src, dst, m=512, refine_passes=2)
            assert got <= ref * 1.005
            assert got >= ref * 0.999

    def test_never_beaten_by_sampled_polylines(self):
        rng = random.Random(11)
        portals, src, dst = random_portal_stack(rng, 5)
        taut = path_len(taut_path(portals, src, dst))
        for _ in range(100):
            pts = [src] + [lerp(s.a, s.b, rng.random()) for s in portals] + [dst]
            assert taut <= path_len(pts) + 1e-9

    def test_reversal_symmetry(self):
        rng = random.Random(13)
        for _ in range(8):
            portals, src, dst = random_portal_stack(rng, rng.randint(2, 6))
            fwd = taut_path(portals, src, dst)
            bwd = taut_path(list(reversed(portals)), dst, src)
            assert len(fwd) == len(bwd)
            for a, b in zip(fwd, reversed(bwd)):
                assert dist(a, b) < 1e-7

    def test_interior_vertices_lie_on_portals(self):
        rng = random.Random(17)
        for _ in range(10):
            portals, src, dst = random_portal_stack(rng, rng.randint(2, 6))
            pts = taut_path(portals, src, dst)
            for v in pts[1:-1]:
                assert min(point_segment_distance(v, s) for s in portals) < 1e-7

    def test_funnel_turns_only_at_portal_endpoints(self):
        rng = random.Random(17)
        done = 0
        while done < 10:
            portals, src, dst = random_portal_stack(rng, rng.randint(2, 6))
            if _strip_folds(portals, src, dst):
                continue
            pts = taut_path(portals, src, dst)
            ends = {p for s in portals for p in (s.a, s.b)}
            for v in pts[1:-1]:
                assert min(dist(v, e) for e in ends) < 1e-7
            done += 1

    def test_folded_fan_pair_matches_oracle(self):
        # fences fanning from spine vertices fold the triangle strip; the
        # solver must still find the taut route through the gaps
        b1 = fan(Point2(2, 0), [Point2(1.0, 2.0), Point2(2.2, 2.4)])
        b2 = fan(Point2(5, 0), [Point2(4.0, 2.2), Point2(5.5, 1.9)])
        portals = [p.seg for p in bundle_portals([b1, b2])]
        synth = [p.synthetic for p in bundle_portals([b1, b2])]
        src, dst = Point2(0, 0), Point2(7, 0)
        pts = taut_path(portals, src, dst, synthetic=synth)
        segs = [s for b in (b1, b2) for s in b.segments]
        ref = oracle_length(segs, src, dst, m=512, refine_passes=2)
        assert path_len(pts) <= ref * 1.005
        assert path_len(pts) >= ref * 0.999

    def test_endpoints_preserved(self):
        rng = random.Random(19)
        portals, src, dst = random_portal_stack(rng, 4)
        pts = taut_path(portals, src, dst)
        assert pts[0] == src
        assert dist(pts[-1], dst) < 1e-9


class TestBundlePortals:
    def test_fan_segments_in_order_with_synthetic_diagonals(self):
        b1 = fan(Point2(2, 0), [Point2(1.8, 1), Point2(2.2, 1)])
        b2 = fan(Point2(4, 0), [Point2(3.8, 1)])
        ports = bundle_portals([b1, b2])
        kinds = [p.synthetic for p in ports]
        assert kinds == [False, False, True, False]
        real = [p.seg for p in ports if not p.synthetic]
        assert real == [b1.segments[0], b1.segments[1], b2.segments[0]]

    def test_polyline_round_trip_length(self):
        b = fan(Point2(2, 0), [Point2(2, 1)])
        ports = bundle_portals([b])
        pts = taut_path([p.seg for p in ports], Point2(0, 0), Point2(4, 0))
        assert polyline(pts).length == pytest.approx(4.0)
