"""Planar primitives with banded tolerance handling.

Points are plain (x, y) float pairs. Predicates snap to their degenerate
outcome (collinear, on-boundary) inside a band scaled by the magnitude of
the inputs, so they stay meaningful on large maps without a global epsilon
retune.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class GeometryError(Exception):
    pass


class ZeroVectorError(GeometryError):
    pass


class DegeneratePolylineError(GeometryError):
    pass


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point2
    b: Point2


@dataclass(frozen=True)
class Tolerances:
    """Shared tolerance knobs.

    eps_geom is a length band for incidence decisions, tol_angle an angular
    band in radians, tol_len a relative band for length comparisons.
    """

    eps_geom: float = 1e-9
    tol_angle: float = 1e-7
    tol_len: float = 1e-10

    def __post_init__(self) -> None:
        if self.eps_geom <= 0 or self.tol_angle <= 0 or self.tol_len <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerances()


class Orientation(Enum):
    LEFT = "Left"
    RIGHT = "Right"
    COLLINEAR = "Collinear"


class Side(Enum):
    LEFT = "Left"
    RIGHT = "Right"
    ON = "On"


def sub(a: Point2, b: Point2) -> Point2:
    return Point2(a.x - b.x, a.y - b.y)


def add(a: Point2, b: Point2) -> Point2:
    return Point2(a.x + b.x, a.y + b.y)


def scale(a: Point2, k: float) -> Point2:
    return Point2(a.x * k, a.y * k)


def lerp(a: Point2, b: Point2, t: float) -> Point2:
    return Point2(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def dot(a: Point2, b: Point2) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Point2, b: Point2) -> float:
    return a.x * b.y - a.y * b.x


def norm(a: Point2) -> float:
    return math.hypot(a.x, a.y)


def dist(a: Point2, b: Point2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def unit(a: Point2, tol: Tolerances = DEFAULT_TOL) -> Point2:
    n = norm(a)
    if n <= tol.eps_geom:
        raise ZeroVectorError(f"cannot normalize near-zero vector {a}")
    return Point2(a.x / n, a.y / n)


def signed_area2(p: Point2, q: Point2, r: Point2) -> float:
    """Twice the signed area of triangle pqr; positive when r is left of pq."""
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def orient(p: Point2, q: Point2, r: Point2, tol: Tolerances = DEFAULT_TOL) -> Orientation:
    """Classify r against the directed line p->q, snapping small areas to Collinear."""
    area = signed_area2(p, q, r)
    mag = max(1.0, dist(p, q) * max(dist(p, r), dist(q, r)))
    if abs(area) <= tol.eps_geom * mag:
        return Orientation.COLLINEAR
    return Orientation.LEFT if area > 0 else Orientation.RIGHT


def angle_between(u: Point2, v: Point2, tol: Tolerances = DEFAULT_TOL) -> float:
    """Unsigned angle between two vectors, in [0, pi]."""
    nu, nv = norm(u), norm(v)
    if nu <= tol.eps_geom or nv <= tol.eps_geom:
        raise ZeroVectorError("angle of a near-zero vector is undefined")
    c = dot(u, v) / (nu * nv)
    c = max(-1.0, min(1.0, c))
    return math.acos(c)


def project_param(seg: Segment, p: Point2) -> float:
    """Parameter in [0, 1] of the point of seg closest to p."""
    d = sub(seg.b, seg.a)
    denom = dot(d, d)
    if denom == 0.0:
        return 0.0
    t = dot(sub(p, seg.a), d) / denom
    return max(0.0, min(1.0, t))


def closest_point_on_segment(seg: Segment, p: Point2) -> Point2:
    return lerp(seg.a, seg.b, project_param(seg, p))


def point_segment_distance(p: Point2, seg: Segment) -> float:
    return dist(p, closest_point_on_segment(seg, p))


def segment_intersection(
    s1: Segment, s2: Segment, tol: Tolerances = DEFAULT_TOL
) -> None | Point2 | Segment:
    """Intersect two closed segments.

    Returns None when disjoint, a Point2 for a single common point (within the
    eps_geom band), or a Segment for a collinear overlap of positive length.
    The overlap runs in the direction of s1.
    """
    p, p2 = s1
    q, q2 = s2
    r = sub(p2, p)
    s = sub(q2, q)
    lr, ls = norm(r), norm(s)
    eps = tol.eps_geom

    if lr <= eps and ls <= eps:
        return p if dist(p, q) <= eps else None
    if lr <= eps:
        return p if point_segment_distance(p, s2) <= eps else None
    if ls <= eps:
        return q if point_segment_distance(q, s1) <= eps else None

    rxs = cross(r, s)
    qp = sub(q, p)
    if abs(rxs) > eps * max(1.0, lr * ls):
        t = cross(qp, s) / rxs
        u = cross(qp, r) / rxs
        te, ue = eps / lr, eps / ls
        if -te <= t <= 1.0 + te and -ue <= u <= 1.0 + ue:
            t = max(0.0, min(1.0, t))
            return lerp(p, p2, t)
        return None

    # Parallel lines: either disjoint or collinear.
    if abs(cross(qp, r)) > eps * max(1.0, lr * norm(qp)):
        return None
    t0 = dot(qp, r) / (lr * lr)
    t1 = dot(sub(q2, p), r) / (lr * lr)
    lo, hi = min(t0, t1), max(t0, t1)
    lo = max(lo, 0.0)
    hi = min(hi, 1.0)
    if hi < lo - eps / lr:
        return None
    if hi - lo <= eps / lr:
        mid = 0.5 * (lo + hi)
        return lerp(p, p2, max(0.0, min(1.0, mid)))
    return Segment(lerp(p, p2, lo), lerp(p, p2, hi))


def segment_segment_nearest(s1: Segment, s2: Segment,
                            tol: Tolerances = DEFAULT_TOL
                            ) -> tuple[Point2, Point2, float]:
    """Closest pair of points (one on each segment) and their distance."""
    hit = segment_intersection(s1, s2, tol)
    if hit is not None:
        p = hit.a if isinstance(hit, Segment) else hit
        return p, p, 0.0
    best: tuple[Point2, Point2, float] | None = None
    for p in (s1.a, s1.b):
        q = closest_point_on_segment(s2, p)
        d = dist(p, q)
        if best is None or d < best[2]:
            best = (p, q, d)
    for q in (s2.a, s2.b):
        p = closest_point_on_segment(s1, q)
        d = dist(p, q)
        if best is None or d < best[2]:
            best = (p, q, d)
    return best


@dataclass(frozen=True)
class PolylinePath:
    """Vertex chain with a cached length. Consecutive duplicates are collapsed."""

    vertices: tuple[Point2, ...]
    length: float

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[Segment]:
        v = self.vertices
        return [Segment(v[i], v[i + 1]) for i in range(len(v) - 1)]

    def cumulative(self) -> list[float]:
        acc = [0.0]
        v = self.vertices
        for i in range(len(v) - 1):
            acc.append(acc[-1] + dist(v[i], v[i + 1]))
        return acc

    def reversed(self) -> "PolylinePath":
        return PolylinePath(tuple(reversed(self.vertices)), self.length)


def polyline(points, tol: Tolerances = DEFAULT_TOL) -> PolylinePath:
    """Build a PolylinePath, dropping consecutive vertices closer than eps_geom."""
    pts: list[Point2] = []
    for raw in points:
        p = Point2(float(raw[0]), float(raw[1]))
        if not pts or dist(pts[-1], p) > tol.eps_geom:
            pts.append(p)
    if not pts:
        raise DegeneratePolylineError("polyline needs at least one vertex")
    total = sum(dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))
    return PolylinePath(tuple(pts), total)


def side_of_polyline(tau: PolylinePath, x: Point2, tol: Tolerances = DEFAULT_TOL) -> Side:
    """Side of x relative to tau, judged against the nearest edge of tau.

    This is a nearest-edge orientation, not a winding test; tau may be open.
    """
    v = tau.vertices
    if len(v) < 2:
        raise DegeneratePolylineError("side test needs a polyline with an edge")
    best_d = math.inf
    best_i = 0
    for i in range(len(v) - 1):
        d = point_segment_distance(x, Segment(v[i], v[i + 1]))
        if d < best_d:  # ties keep the earlier edge
            best_d = d
            best_i = i
    if best_d <= tol.eps_geom:
        return Side.ON
    o = orient(v[best_i], v[best_i + 1], x, tol)
    if o is Orientation.COLLINEAR:
        return Side.ON
    return Side.LEFT if o is Orientation.LEFT else Side.RIGHT


def reflect_across_line(p: Point2, a: Point2, b: Point2, tol: Tolerances = DEFAULT_TOL) -> Point2:
    """Mirror p across the infinite line through a and b."""
    d = sub(b, a)
    n2 = dot(d, d)
    if n2 <= tol.eps_geom * tol.eps_geom:
        raise ZeroVectorError("reflection line is degenerate")
    t = dot(sub(p, a), d) / n2
    foot = lerp(a, b, t)
    return Point2(2.0 * foot.x - p.x, 2.0 * foot.y - p.y)


def point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2,
                      tol: Tolerances = DEFAULT_TOL) -> bool:
    """Closed containment test, tolerant to eps_geom at the boundary."""
    d1 = signed_area2(a, b, p)
    d2 = signed_area2(b, c, p)
    d3 = signed_area2(c, a, p)
    m = max(1.0, dist(a, b), dist(b, c), dist(c, a))
    band = tol.eps_geom * m
    neg = (d1 < -band) or (d2 < -band) or (d3 < -band)
    pos = (d1 > band) or (d2 > band) or (d3 > band)
    return not (neg and pos)


def best_transit_point(seg: Segment, a: Point2, b: Point2,
                       tol: Tolerances = DEFAULT_TOL) -> Point2:
    """Point of seg minimizing |a - x| + |x - b|.

    The transit length is convex along the segment, so the minimum is either
    the interior reflection point or one of the endpoints.
    """
    d = sub(seg.b, seg.a)
    len2 = d.x * d.x + d.y * d.y
    if len2 <= tol.eps_geom * tol.eps_geom:
        return seg.a
    ax = a.x - seg.a.x
    ay = a.y - seg.a.y
    bx = b.x - seg.a.x
    by = b.y - seg.a.y
    cross_a = d.x * ay - d.y * ax
    cross_b = d.x * by - d.y * bx
    dot_a = d.x * ax + d.y * ay
    dot_b = d.x * bx + d.y * by
    ta = dot_a / len2
    tb = dot_b / len2
    scale = math.sqrt(len2)
    band = tol.eps_geom * scale * max(1.0, dist(a, seg.a), dist(b, seg.a))
    candidates = [0.0, 1.0]
    if abs(cross_a) <= band and abs(cross_b) <= band:
        # both anchors on the carrier line: any point between their
        # projections is optimal, take the clamped midpoint
        candidates.append(min(1.0, max(0.0, (ta + tb) / 2.0)))
    elif cross_a * cross_b < 0.0 and abs(cross_a) > band and abs(cross_b) > band:
        # opposite sides: the straight segment a-b crosses the line
        t = ta + (tb - ta) * cross_a / (cross_a - cross_b)
        candidates.append(min(1.0, max(0.0, t)))
    else:
        # same side (or one anchor on the line): reflect b across the line
        hb = cross_b / len2
        rbx = bx - 2.0 * hb * (-d.y)
        rby = by - 2.0 * hb * d.x
        cross_rb = d.x * rby - d.y * rbx
        denom = cross_a - cross_rb
        if abs(denom) > band:
            trb = (d.x * rbx + d.y * rby) / len2
            t = ta + (trb - ta) * cross_a / denom
            candidates.append(min(1.0, max(0.0, t)))
        candidates.append(min(1.0, max(0.0, (ta + tb) / 2.0)))
    best = None
    best_f = math.inf
    for t in candidates:
        x = Point2(seg.a.x + t * d.x, seg.a.y + t * d.y)
        f = dist(a, x) + dist(x, b)
        if f < best_f:
            best_f = f
            best = x
    assert best is not None
    return best
