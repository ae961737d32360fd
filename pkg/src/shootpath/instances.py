"""Seeded random inputs: bundle sequences for solver parity checks and
rectangle worlds for the exploration planner.

The sequence generator keeps every instance inside the regime where the
corridor construction is exact: all fan endpoints on one side of the
spine, segments short enough that neighboring fans stay disjoint, and a
convex quad between each pair of consecutive crossed segments. Instances
violating any check are resampled with a derived seed, so generation is
deterministic in the seed.
"""
from __future__ import annotations

import math
import random

from .bundles import (
    Bundle,
    BundleSequence,
    bundle_sequence,
    fan,
    order_bundle_segments,
    sequence_intersections,
    side_convention_ok,
)
from .geometry import DEFAULT_TOL, Point2, Segment, Tolerances, dist, signed_area2


class GenerationError(Exception):
    pass


def _angle(v: Point2) -> float:
    return math.atan2(v.y, v.x) % (2.0 * math.pi)


def _left_sector(prev_v: Point2, vertex: Point2, next_v: Point2) -> tuple[float, float]:
    """(start_angle, width) of the sector at vertex bounded by the rays to its
    neighbors and lying on the left of the prev->vertex->next traversal."""
    a_in = _angle(Point2(prev_v.x - vertex.x, prev_v.y - vertex.y))
    a_out = _angle(Point2(next_v.x - vertex.x, next_v.y - vertex.y))
    travel = Point2(next_v.x - prev_v.x, next_v.y - prev_v.y)
    left_normal = _angle(Point2(-travel.y, travel.x))
    width_ccw = (a_in - a_out) % (2.0 * math.pi)
    if (left_normal - a_out) % (2.0 * math.pi) <= width_ccw:
        return a_out, width_ccw
    return a_in, (a_out - a_in) % (2.0 * math.pi)


def _convex_quad(a: Point2, b: Point2, c: Point2, d: Point2, band: float) -> bool:
    pts = (a, b, c, d)
    signs = []
    for i in range(4):
        s = signed_area2(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4])
        if abs(s) <= band:
            return False
        signs.append(s > 0)
    return all(signs) or not any(signs)


def _consecutive_fan_segments(seq: BundleSequence) -> list[Segment]:
    out: list[Segment] = []
    for b in seq.interior:
        out.extend(b.segments)
    return out


def _quads_convex(seq: BundleSequence, tol: Tolerances) -> bool:
    """Every hop between consecutive crossed segments of different fans must
    span a convex quad, otherwise the sleeve can miss shortcuts."""
    segs: list[tuple[Segment, Point2]] = []
    for b in seq.interior:
        for s in b.segments:
            segs.append((s, b.vertex))
    for (s1, v1), (s2, v2) in zip(segs, segs[1:]):
        if v1 == v2:
            continue
        scale = max(1.0, dist(s1.a, s2.a))
        if not _convex_quad(s1.a, s1.b, s2.b, s2.a, tol.eps_geom * scale * 10.0):
            return False
    return True


def _try_sequence(rng: random.Random, n_min: int, n_max: int,
                  max_segments: int, tol: Tolerances) -> BundleSequence | None:
    n = rng.randint(n_min, n_max)
    heading = rng.uniform(-math.pi, math.pi)
    verts = [Point2(0.0, 0.0)]
    for _ in range(n + 1):
        heading += rng.uniform(-0.45, 0.45)
        step = rng.uniform(6.0, 10.0)
        last = verts[-1]
        verts.append(Point2(last.x + step * math.cos(heading),
                            last.y + step * math.sin(heading)))
    min_gap = min(dist(a, b) for i, a in enumerate(verts)
                  for b in verts[i + 1:])
    if min_gap <= 1e-6:
        return None
    cap = 0.45 * min_gap

    bundles = []
    for i in range(1, n + 1):
        start, width = _left_sector(verts[i - 1], verts[i], verts[i + 1])
        if width <= 0.2:
            return None
        m = rng.randint(1, max_segments)
        margin = 0.12 * width
        fracs = sorted(rng.uniform(0.0, 1.0) for _ in range(m))
        endpoints = []
        for f in fracs:
            ang = start + margin + f * (width - 2.0 * margin)
            length = cap * rng.uniform(0.35, 1.0)
            endpoints.append(Point2(verts[i].x + length * math.cos(ang),
                                    verts[i].y + length * math.sin(ang)))
        b = fan(verts[i], endpoints)
        try:
            b = order_bundle_segments(b, verts[i - 1], verts[i + 1], tol)
        except Exception:
            return None
        bundles.append(b)

    # keep the whole figure inside a disc of diameter 100
    xs = [p.x for p in verts] + [s.b.x for b in bundles for s in b.segments]
    ys = [p.y for p in verts] + [s.b.y for b in bundles for s in b.segments]
    span = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    if span > 100.0:
        scale = 99.0 / span
        verts = [Point2(p.x * scale, p.y * scale) for p in verts]
        scaled = []
        for b in bundles:
            v = Point2(b.vertex.x * scale, b.vertex.y * scale)
            eps_ = [Point2(s.b.x * scale, s.b.y * scale) for s in b.segments]
            scaled.append(Bundle(v, tuple(Segment(v, e) for e in eps_),
                                 b.sector_angle))
        bundles = scaled

    try:
        seq = bundle_sequence(verts[0], bundles, verts[-1], tol)
    except Exception:
        return None
    if not side_convention_ok(seq, tol):
        return None
    if sequence_intersections(seq, tol):
        return None
    if not _quads_convex(seq, tol):
        return None
    return seq


def random_bundle_sequence(seed: int, n_min: int = 1, n_max: int = 12,
                           max_segments: int = 4,
                           tol: Tolerances = DEFAULT_TOL) -> BundleSequence:
    """Deterministic random instance; resamples until all validity checks
    pass (same-side fans, disjoint bundles, convex hop quads)."""
    for attempt in range(200):
        rng = random.Random(seed * 1000003 + attempt)
        seq = _try_sequence(rng, n_min, n_max, max_segments, tol)
        if seq is not None:
            return seq
    raise GenerationError(f"no valid instance after 200 attempts (seed {seed})")


def random_world(seed: int, n_obstacles: int = 4,
                 size: float = 100.0) -> tuple[list[list[Point2]], Point2, Point2]:
    """Obstacle polygons plus free start/goal positions in a square arena.

    Obstacles are axis-aligned rectangles kept apart from each other and
    from the start and goal corners, so every generated world is solvable.
    """
    rng = random.Random(seed)
    start = Point2(size * 0.06, size * 0.06)
    goal = Point2(size * 0.94, size * 0.94)
    placed: list[tuple[float, float, float, float]] = []
    obstacles: list[list[Point2]] = []
    attempts = 0
    while len(obstacles) < n_obstacles and attempts < 300:
        attempts += 1
        w = rng.uniform(0.08, 0.22) * size
        h = rng.uniform(0.08, 0.22) * size
        x = rng.uniform(0.12 * size, 0.85 * size - w)
        y = rng.uniform(0.12 * size, 0.85 * size - h)
        box = (x - 0.03 * size, y - 0.03 * size,
               x + w + 0.03 * size, y + h + 0.03 * size)
        if any(not (box[2] < b[0] or b[2] < box[0] or box[3] < b[1] or b[3] < box[1])
               for b in placed):
            continue
        if box[0] <= start.x <= box[2] and box[1] <= start.y <= box[3]:
            continue
        if box[0] <= goal.x <= box[2] and box[1] <= goal.y <= box[3]:
            continue
        placed.append(box)
        obstacles.append([Point2(x, y), Point2(x + w, y),
                          Point2(x + w, y + h), Point2(x, y + h)])
    return obstacles, start, goal
