"""Tests for the discretized DP reference solver."""
import math

import numpy as np
import pytest

from shootpath import Point2, Segment
from shootpath.funnel import taut_path
from shootpath.oracle import (
    DiscretizedInstance,
    EmptyLayerError,
    OracleError,
    discretize,
    dp_shortest,
    oracle_length,
    sample_segment,
)

from conftest import pt


def peq(a, b, tol=1e-9):
    return math.dist(a, b) <= tol


def random_layer_segments(rng, n):
    """n segments marching along +x, far enough apart to keep picks distinct."""
    segs = []
    for k in range(n):
        x = 3.0 * (k + 1)
        ax = x + rng.uniform(-0.8, 0.8)
        ay = rng.uniform(-2.0, 2.0)
        bx = x + rng.uniform(-0.8, 0.8)
        by = ay + rng.uniform(0.5, 2.5)
        segs.append(Segment(pt(ax, ay), pt(bx, by)))
    return segs


class TestSampleSegment:
    def test_counts_and_endpoints(self):
        seg = Segment(pt(0, 0), pt(4, 2))
        pts = sample_segment(seg, 5)
        assert len(pts) == 5
        assert peq(pts[0], seg.a)
        assert peq(pts[-1], seg.b)
        assert peq(pts[2], pt(2, 1))

    def test_single_sample_is_first_endpoint(self):
        seg = Segment(pt(1, 1), pt(2, 3))
        assert sample_segment(seg, 1) == (seg.a,)

    def test_zero_samples_rejected(self):
        with pytest.raises(EmptyLayerError):
            sample_segment(Segment(pt(0, 0), pt(1, 0)), 0)


class TestDpShortest:
    def test_no_layers_is_straight_segment(self):
        path = dp_shortest(discretize([], pt(0, 0), pt(3, 4)))
        assert peq(path.vertices[0], pt(0, 0))
        assert peq(path.vertices[-1], pt(3, 4))
        assert abs(path.length - 5.0) < 1e-12

    def test_single_segment_endpoint_optimum(self):
        # segment hangs above the src-dst line, so the optimum pins to its
        # lower endpoint (2, 1) and the length is exactly 2*sqrt(5)
        seg = Segment(pt(2, 1), pt(2, 2))
        length = oracle_length([seg], pt(0, 0), pt(4, 0))
        assert abs(length - 2.0 * math.sqrt(5.0)) < 1e-9

    def test_lattice_refinement_is_monotone(self):
        # linspace grids nest when m doubles as 2m-1, so the pure lattice
        # optimum cannot get worse on the finer grid
        rng = np.random.default_rng(7)
        for _ in range(4):
            segs = random_layer_segments(rng, 4)
            src, dst = pt(0.0, 0.0), pt(16.0, 0.0)
            lengths = [
                dp_shortest(discretize(segs, src, dst, m), refine_passes=0).length
                for m in (3, 5, 9, 17, 33)
            ]
            for coarse, fine in zip(lengths, lengths[1:]):
                assert fine <= coarse + 1e-12

    def test_window_passes_only_shrink_length(self):
        rng = np.random.default_rng(11)
        segs = random_layer_segments(rng, 5)
        inst = discretize(segs, pt(0, 0), pt(20, 0), m=64)
        lengths = [dp_shortest(inst, refine_passes=r).length for r in range(4)]
        for coarse, fine in zip(lengths, lengths[1:]):
            assert fine <= coarse + 1e-12

    def test_path_visits_layers_in_order(self):
        rng = np.random.default_rng(3)
        segs = random_layer_segments(rng, 6)
        src, dst = pt(0, 0), pt(24, 0)
        path = dp_shortest(discretize(segs, src, dst))
        verts = path.vertices
        assert len(verts) == len(segs) + 2
        assert peq(verts[0], src)
        assert peq(verts[-1], dst)
        for v, seg in zip(verts[1:-1], segs):
            ax, ay = seg.a
            bx, by = seg.b
            # distance from v to the segment, via projection
            ux, uy = bx - ax, by - ay
            t = ((v.x - ax) * ux + (v.y - ay) * uy) / (ux * ux + uy * uy)
            t = min(1.0, max(0.0, t))
            d = math.hypot(v.x - (ax + t * ux), v.y - (ay + t * uy))
            assert d < 1e-9

    def test_empty_layer_rejected(self):
        inst = DiscretizedInstance(((), ), pt(0, 0), pt(1, 0))
        with pytest.raises(EmptyLayerError):
            dp_shortest(inst)

    def test_refinement_requires_segments(self):
        layer = sample_segment(Segment(pt(1, -1), pt(1, 1)), 9)
        inst = DiscretizedInstance((layer,), pt(0, 0), pt(2, 0), segments=None)
        with pytest.raises(OracleError):
            dp_shortest(inst, refine_passes=1)
        assert dp_shortest(inst, refine_passes=0).length > 0


class TestAgainstFunnel:
    def test_matches_taut_path_on_portal_stacks(self):
        # same visit-in-order problem, two unrelated solvers
        rng = np.random.default_rng(42)
        for _ in range(8):
            n = int(rng.integers(1, 7))
            portals = []
            for k in range(n):
                x = 2.0 * (k + 1)
                ymid = rng.uniform(-1.0, 1.0)
                half = rng.uniform(0.3, 1.6)
                lean = rng.uniform(-0.3, 0.3)
                portals.append(Segment(pt(x - lean, ymid - half),
                                       pt(x + lean, ymid + half)))
            src, dst = pt(0.0, 0.0), pt(2.0 * n + 2.0, 0.0)
            chain = taut_path(portals, src, dst)
            exact = sum(math.dist(a, b) for a, b in zip(chain, chain[1:]))
            dp = oracle_length(portals, src, dst)
            assert dp >= exact - 1e-9
            assert dp <= exact * 1.0005
