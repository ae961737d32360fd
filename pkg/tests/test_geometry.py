"""Primitive predicates: orientation, angles, intersections, polyline side."""
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shootpath.geometry import (
    DEFAULT_TOL,
    DegeneratePolylineError,
    Orientation,
    Point2,
    Segment,
    Side,
    Tolerances,
    ZeroVectorError,
    angle_between,
    best_transit_point,
    dist,
    orient,
    polyline,
    reflect_across_line,
    segment_intersection,
    side_of_polyline,
)

coords = st.floats(min_value=-100.0, max_value=100.0,
                   allow_nan=False, allow_infinity=False)
points = st.builds(Point2, coords, coords)


class TestOrient:
    def test_left(self):
        assert orient(Point2(0, 0), Point2(1, 0), Point2(0, 1)) is Orientation.LEFT

    def test_collinear(self):
        assert orient(Point2(0, 0), Point2(1, 0), Point2(2, 0)) is Orientation.COLLINEAR

    def test_right(self):
        assert orient(Point2(0, 0), Point2(1, 0), Point2(0, -1)) is Orientation.RIGHT

    @given(points, points, points)
    def test_antisymmetric_when_clearly_off_line(self, p, q, r):
        a = orient(p, q, r)
        b = orient(p, r, q)
        if a is Orientation.COLLINEAR or b is Orientation.COLLINEAR:
            return
        assert {a, b} == {Orientation.LEFT, Orientation.RIGHT}

    def test_collinear_band_scales_with_magnitude(self):
        # a fixed 1e-9 absolute band would misclassify this large triangle
        assert orient(Point2(0, 0), Point2(1e8, 0), Point2(5e7, 1e-4)) \
            is Orientation.COLLINEAR


class TestAngleBetween:
    def test_perpendicular(self):
        assert angle_between(Point2(1, 0), Point2(0, 1)) == pytest.approx(math.pi / 2)

    def test_identical(self):
        assert angle_between(Point2(1, 0), Point2(1, 0)) == pytest.approx(0.0)

    def test_opposite(self):
        assert angle_between(Point2(1, 0), Point2(-1, 0)) == pytest.approx(math.pi)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVectorError):
            angle_between(Point2(0, 0), Point2(1, 0))

    @given(points, points)
    def test_symmetric(self, u, v):
        if math.hypot(*u) < 1e-6 or math.hypot(*v) < 1e-6:
            return
        assert angle_between(u, v) == pytest.approx(angle_between(v, u), abs=1e-12)

    @given(points, points, st.floats(min_value=0.01, max_value=1e4))
    def test_invariant_under_positive_scaling(self, u, v, k):
        if math.hypot(*u) < 1e-6 or math.hypot(*v) < 1e-6:
            return
        scaled = Point2(u.x * k, u.y * k)
        # arccos loses ~sqrt(eps) of precision near 0 and pi
        assert angle_between(scaled, v) == pytest.approx(angle_between(u, v),
                                                         abs=1e-6)

    @given(points, points)
    def test_range(self, u, v):
        if math.hypot(*u) < 1e-6 or math.hypot(*v) < 1e-6:
            return
        a = angle_between(u, v)
        assert 0.0 <= a <= math.pi


class TestSegmentIntersection:
    def test_orthogonal_cross(self):
        hit = segment_intersection(Segment(Point2(0, 0), Point2(2, 0)),
                                   Segment(Point2(1, -1), Point2(1, 1)))
        assert isinstance(hit, Point2)
        assert dist(hit, Point2(1, 0)) < 1e-12

    def test_disjoint_collinear(self):
        hit = segment_intersection(Segment(Point2(0, 0), Point2(1, 0)),
                                   Segment(Point2(2, 0), Point2(3, 0)))
        assert hit is None

    def test_collinear_overlap(self):
        hit = segment_intersection(Segment(Point2(0, 0), Point2(2, 0)),
                                   Segment(Point2(1, 0), Point2(3, 0)))
        assert isinstance(hit, Segment)
        got = {tuple(hit.a), tuple(hit.b)}
        assert got == {(1.0, 0.0), (2.0, 0.0)}

    @staticmethod
    def _as_set(hit):
        if hit is None:
            return frozenset()
        if isinstance(hit, Segment):
            return frozenset({tuple(hit.a), tuple(hit.b)})
        return frozenset({tuple(hit)})

    @given(points, points, points, points)
    def test_symmetric_as_point_set(self, a, b, c, d):
        s1, s2 = Segment(a, b), Segment(c, d)
        h1 = segment_intersection(s1, s2)
        h2 = segment_intersection(s2, s1)
        assert (h1 is None) == (h2 is None)
        if h1 is None:
            return
        for p in self._as_set(h1):
            assert min(dist(Point2(*p), Point2(*q)) for q in self._as_set(h2)) < 1e-6


class TestSideOfPolyline:
    def setup_method(self):
        self.tau = polyline([Point2(0, 0), Point2(4, 0)])

    def test_below_is_right(self):
        assert side_of_polyline(self.tau, Point2(2, -1)) is Side.RIGHT

    def test_above_is_left(self):
        assert side_of_polyline(self.tau, Point2(2, 1)) is Side.LEFT

    def test_on_line(self):
        assert side_of_polyline(self.tau, Point2(2, 0)) is Side.ON

    def test_degenerate_polyline_rejected(self):
        with pytest.raises(DegeneratePolylineError):
            side_of_polyline(polyline([Point2(1, 1), Point2(1, 1)]), Point2(0, 0))

    def test_reflection_flips_side(self):
        # 1000 random (tau, x): x and its mirror across the nearest edge line
        # land on opposite sides whenever x is clearly off the polyline
        rng = random.Random(20240816)
        eps = DEFAULT_TOL.eps_geom

        def edge_dist(e, p):
            return dist(best_transit_point(e, p, p), p)

        checked = 0
        while checked < 1000:
            verts = [Point2(rng.uniform(-50, 50), rng.uniform(-50, 50))
                     for _ in range(rng.randint(2, 5))]
            if any(dist(a, b) < 1.0 for a, b in zip(verts, verts[1:])):
                continue
            tau = polyline(verts)
            edge = rng.choice(tau.edges())
            # sample x off the interior of one edge, near enough that the
            # same edge stays nearest for both x and its mirror image
            t = rng.uniform(0.15, 0.85)
            off = rng.uniform(10 * eps, 0.2 * dist(edge.a, edge.b)) \
                * rng.choice((-1.0, 1.0))
            ex, ey = edge.b.x - edge.a.x, edge.b.y - edge.a.y
            n = math.hypot(ex, ey)
            x = Point2(edge.a.x + t * ex - off * ey / n,
                       edge.a.y + t * ey + off * ex / n)
            mirror = reflect_across_line(x, edge.a, edge.b)
            others = [e for e in tau.edges() if e != edge]
            d = edge_dist(edge, x)
            if d <= 10 * eps:
                continue
            if others and any(edge_dist(e, p) < 2 * d + 10 * eps
                              for e in others for p in (x, mirror)):
                continue
            s1 = side_of_polyline(tau, x)
            s2 = side_of_polyline(tau, mirror)
            assert {s1, s2} == {Side.LEFT, Side.RIGHT}
            checked += 1


class TestTolerances:
    def test_requires_positive_fields(self):
        with pytest.raises(ValueError):
            Tolerances(eps_geom=0.0, tol_angle=1e-7, tol_len=1e-10)
        with pytest.raises(ValueError):
            Tolerances(eps_geom=1e-9, tol_angle=-1.0, tol_len=1e-10)

    def test_defaults(self):
        assert DEFAULT_TOL.eps_geom == pytest.approx(1e-9)
        assert DEFAULT_TOL.tol_angle == pytest.approx(1e-7)
        assert DEFAULT_TOL.tol_len == pytest.approx(1e-10)


class TestPolyline:
    def test_length_is_edge_sum(self):
        p = polyline([Point2(0, 0), Point2(3, 0), Point2(3, 4)])
        assert p.length == pytest.approx(7.0)

    def test_consecutive_duplicates_collapse(self):
        p = polyline([Point2(0, 0), Point2(0, 0), Point2(1, 0)])
        assert len(p.vertices) == 2

    def test_reversed_preserves_length(self):
        p = polyline([Point2(0, 0), Point2(2, 1), Point2(5, -1)])
        assert p.reversed().length == pytest.approx(p.length)
        assert p.reversed().vertices == tuple(reversed(p.vertices))
