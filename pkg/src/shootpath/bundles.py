"""Bundles of line segments hung on the vertices of a guide polyline.

A bundle is a fan of segments sharing one vertex. A bundle sequence is a
chain of bundles whose vertices trace a polyline tau from a source point p
to a destination q; p and q ride along as degenerate (empty) bundles. The
solver needs each fan sorted by the rotation that sweeps the incoming tau
edge onto the outgoing one through the region holding the fan, plus a
partition of the chain into contiguous sub-sequences separated by cutting
segments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .geometry import (
    DEFAULT_TOL,
    Point2,
    PolylinePath,
    Segment,
    Side,
    Tolerances,
    ZeroVectorError,
    dist,
    norm,
    polyline,
    side_of_polyline,
    sub,
)

TWO_PI = 2.0 * math.pi


class BundleError(Exception):
    pass


class AmbiguousRotationError(BundleError):
    pass


class BadKError(BundleError):
    pass


@dataclass(frozen=True)
class Bundle:
    """Fan of segments emanating from a common vertex.

    An empty fan is a degenerate bundle standing for a bare point. The
    sector_angle records the angular width of the region the fan was
    collected from (pi when unknown).
    """

    vertex: Point2
    segments: tuple[Segment, ...] = ()
    sector_angle: float = math.pi

    def __post_init__(self) -> None:
        for s in self.segments:
            if dist(s.a, self.vertex) > 1e-6 * max(1.0, norm(self.vertex)):
                raise BundleError(f"segment {s} does not start at vertex {self.vertex}")

    @property
    def is_degenerate(self) -> bool:
        return not self.segments

    def far_endpoints(self) -> tuple[Point2, ...]:
        return tuple(s.b for s in self.segments)


def fan(vertex, endpoints: Iterable, sector_angle: float = math.pi) -> Bundle:
    """Convenience constructor from a vertex and far endpoints."""
    v = Point2(*vertex)
    segs = tuple(Segment(v, Point2(*e)) for e in endpoints)
    return Bundle(v, segs, sector_angle)


@dataclass(frozen=True)
class CuttingSegment:
    """Oriented cut [u, v] with the index of the bundle that supplied it."""

    u: Point2
    v: Point2
    source: int

    @property
    def is_degenerate(self) -> bool:
        return self.u == self.v

    def as_segment(self) -> Segment:
        return Segment(self.u, self.v)


@dataclass(frozen=True)
class BundleSequence:
    """Chain of bundles from p to q; first and last are degenerate."""

    bundles: tuple[Bundle, ...]
    tau: PolylinePath

    def __post_init__(self) -> None:
        if len(self.bundles) < 2:
            raise BundleError("a sequence needs at least p and q")
        if not self.bundles[0].is_degenerate or not self.bundles[-1].is_degenerate:
            raise BundleError("endpoint bundles must be degenerate points")
        if len(self.tau.vertices) != len(self.bundles):
            raise BundleError("tau must visit exactly the bundle vertices")

    @property
    def p(self) -> Point2:
        return self.bundles[0].vertex

    @property
    def q(self) -> Point2:
        return self.bundles[-1].vertex

    @property
    def interior(self) -> tuple[Bundle, ...]:
        return self.bundles[1:-1]

    def diameter(self) -> float:
        xs: list[float] = []
        ys: list[float] = []
        for b in self.bundles:
            xs.append(b.vertex.x)
            ys.append(b.vertex.y)
            for s in b.segments:
                xs.append(s.b.x)
                ys.append(s.b.y)
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys))


def bundle_sequence(p, interior: Sequence[Bundle], q,
                    tol: Tolerances = DEFAULT_TOL) -> BundleSequence:
    """Assemble a sequence, building tau from the bundle vertices."""
    pp, qq = Point2(*p), Point2(*q)
    verts = [pp] + [b.vertex for b in interior] + [qq]
    for i in range(len(verts) - 1):
        if dist(verts[i], verts[i + 1]) <= tol.eps_geom:
            raise BundleError(f"consecutive vertices {i} and {i + 1} coincide")
    tau = polyline(verts, tol)
    bundles = (Bundle(pp), *interior, Bundle(qq))
    return BundleSequence(bundles, tau)


def _ccw_gap(a_from: float, a_to: float) -> float:
    """Counterclockwise angle from direction a_from to a_to, in [0, 2*pi)."""
    return (a_to - a_from) % TWO_PI


def order_bundle_segments(b: Bundle, prev_vertex: Point2, next_vertex: Point2,
                          tol: Tolerances = DEFAULT_TOL) -> Bundle:
    """Sort the fan by angle from the direction toward prev_vertex.

    The rotation sense is the one that carries (vertex -> prev) onto
    (vertex -> next) through the sector containing the fan. Raises
    AmbiguousRotationError when the fan straddles both candidate sectors,
    which happens only for inputs violating the one-side convention.
    """
    if b.is_degenerate:
        raise BundleError(
            f"cannot order a degenerate bundle at {b.vertex}; insert a fake segment first"
        )
    if len(b.segments) == 1:
        return b
    d_prev = sub(prev_vertex, b.vertex)
    d_next = sub(next_vertex, b.vertex)
    if norm(d_prev) <= tol.eps_geom or norm(d_next) <= tol.eps_geom:
        raise ZeroVectorError("bundle vertex coincides with a neighbor vertex")
    alpha = math.atan2(d_prev.y, d_prev.x)
    beta = math.atan2(d_next.y, d_next.x)
    th_ccw = _ccw_gap(alpha, beta)
    th_cw = TWO_PI - th_ccw

    angs = []
    for s in b.segments:
        d = sub(s.b, b.vertex)
        if norm(d) <= tol.eps_geom:
            raise BundleError(f"zero-length segment in bundle at {b.vertex}")
        angs.append(math.atan2(d.y, d.x))
    phi_ccw = [_ccw_gap(alpha, g) for g in angs]
    phi_cw = [(TWO_PI - g) % TWO_PI for g in phi_ccw]

    atol = tol.tol_angle
    ccw_ok = all(g <= th_ccw + atol for g in phi_ccw)
    cw_ok = all(g <= th_cw + atol for g in phi_cw)
    if ccw_ok:
        keys = phi_ccw
    elif cw_ok:
        keys = phi_cw
    else:
        raise AmbiguousRotationError(
            f"fan at {b.vertex} spans both rotational sectors between neighbors"
        )
    order = sorted(range(len(keys)),
                   key=lambda i: (keys[i], dist(b.segments[i].b, b.vertex), i))
    return replace(b, segments=tuple(b.segments[i] for i in order))


def orient_cutting_segment(seg: Segment, bundle_vertex: Point2, tau: PolylinePath,
                           tol: Tolerances = DEFAULT_TOL, source: int = -1) -> CuttingSegment:
    """Assign the (u, v) roles of a cut: v is the endpoint strictly right of
    tau if there is one, otherwise the bundle vertex."""
    side_a = side_of_polyline(tau, seg.a, tol)
    side_b = side_of_polyline(tau, seg.b, tol)
    if side_b is Side.RIGHT and side_a is not Side.RIGHT:
        v, u = seg.b, seg.a
    elif side_a is Side.RIGHT and side_b is not Side.RIGHT:
        v, u = seg.a, seg.b
    elif dist(seg.a, bundle_vertex) <= tol.eps_geom:
        v, u = seg.a, seg.b
    elif dist(seg.b, bundle_vertex) <= tol.eps_geom:
        v, u = seg.b, seg.a
    else:
        v, u = seg.a, seg.b
    return CuttingSegment(u=u, v=v, source=source)


def partition(seq: BundleSequence, K: int, tol: Tolerances = DEFAULT_TOL
              ) -> tuple[list[list[Bundle]], list[CuttingSegment]]:
    """Split the chain into K+1 contiguous sub-sequences and K+2 cuts.

    Interior bundles are distributed front-loaded with run sizes differing by
    at most one; p joins the first group and q the last. Cut i (1 <= i <= K)
    is the last segment of group i-1, oriented against tau; cut 0 and cut K+1
    are the degenerate endpoints.
    """
    interior = seq.interior
    n = len(interior)
    if not isinstance(K, int) or K < 1 or K > n:
        raise BadKError(f"K={K} outside [1, {n}]")
    for b in interior:
        if b.is_degenerate:
            raise BundleError(
                f"interior bundle at {b.vertex} has no segments; insert fake segments first"
            )
    base, rem = divmod(n, K + 1)
    runs: list[list[Bundle]] = []
    idx = 0
    for i in range(K + 1):
        size = base + (1 if i < rem else 0)
        runs.append(list(interior[idx:idx + size]))
        idx += size

    groups = [list(r) for r in runs]
    groups[0] = [seq.bundles[0]] + groups[0]
    groups[K] = groups[K] + [seq.bundles[-1]]

    cuts = [CuttingSegment(seq.p, seq.p, source=0)]
    offset = 1  # bundle index of the first interior bundle
    for i in range(K):
        run = runs[i]
        last = run[-1]
        src_index = offset + sum(len(r) for r in runs[:i]) + len(run) - 1
        cuts.append(orient_cutting_segment(last.segments[-1], last.vertex, seq.tau,
                                           tol, source=src_index))
    cuts.append(CuttingSegment(seq.q, seq.q, source=len(seq.bundles) - 1))
    return groups, cuts


def minor_sector(prev_vertex: Point2, vertex: Point2, next_vertex: Point2,
                 tol: Tolerances = DEFAULT_TOL) -> tuple[float, float, bool]:
    """Bisector direction angle and width of the narrower sector at a corner.

    Returns (mid_angle, width, straight_tie). On a straight pass-through both
    sectors measure pi; the tie breaks to the left of the travel direction.
    """
    d_prev = sub(prev_vertex, vertex)
    d_next = sub(next_vertex, vertex)
    if norm(d_prev) <= tol.eps_geom or norm(d_next) <= tol.eps_geom:
        raise ZeroVectorError("degenerate corner")
    alpha = math.atan2(d_prev.y, d_prev.x)
    beta = math.atan2(d_next.y, d_next.x)
    th_ccw = _ccw_gap(alpha, beta)
    th_cw = TWO_PI - th_ccw
    if abs(th_ccw - th_cw) <= tol.tol_angle:
        travel = sub(next_vertex, prev_vertex)
        mid = math.atan2(travel.x, -travel.y)  # left normal of travel
        return mid, math.pi, True
    if th_ccw < th_cw:
        return alpha + 0.5 * th_ccw, th_ccw, False
    return alpha - 0.5 * th_cw, th_cw, False


def fake_segment_endpoint(prev_vertex: Point2, vertex: Point2, next_vertex: Point2,
                          r: float, tol: Tolerances = DEFAULT_TOL
                          ) -> tuple[Point2, float, bool]:
    """Endpoint of the stand-in segment for a bare corner: the midpoint of the
    arc of the narrower sector of the radius-r disc. Returns (endpoint,
    sector_width, straight_tie)."""
    mid, width, tie = minor_sector(prev_vertex, vertex, next_vertex, tol)
    end = Point2(vertex.x + r * math.cos(mid), vertex.y + r * math.sin(mid))
    return end, width, tie


def insert_fake_segments(seq: BundleSequence, r: float,
                         tol: Tolerances = DEFAULT_TOL) -> BundleSequence:
    """Give every degenerate interior bundle a single stand-in segment of
    length r aimed at the midpoint of its narrower corner sector. Idempotent;
    p and q are never touched."""
    if r <= 0:
        raise ValueError("fake segment length must be positive")
    out = list(seq.bundles)
    verts = seq.tau.vertices
    for i in range(1, len(out) - 1):
        b = out[i]
        if not b.is_degenerate:
            continue
        end, width, _tie = fake_segment_endpoint(verts[i - 1], b.vertex, verts[i + 1], r, tol)
        out[i] = Bundle(b.vertex, (Segment(b.vertex, end),), sector_angle=width)
    return BundleSequence(tuple(out), seq.tau)


def bundles_intersect(b1: Bundle, b2: Bundle, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when some segment of each shares a point that is not an endpoint
    of both segments."""
    eps = tol.eps_geom
    from .geometry import segment_intersection

    for s1 in b1.segments:
        for s2 in b2.segments:
            hit = segment_intersection(s1, s2, tol)
            if hit is None:
                continue
            if isinstance(hit, Segment):
                if dist(hit.a, hit.b) > eps:
                    return True
                hit = hit.a
            on_end1 = dist(hit, s1.a) <= eps or dist(hit, s1.b) <= eps
            on_end2 = dist(hit, s2.a) <= eps or dist(hit, s2.b) <= eps
            if not (on_end1 and on_end2):
                return True
    return False


def sequence_intersections(seq: BundleSequence, tol: Tolerances = DEFAULT_TOL
                           ) -> list[tuple[int, int]]:
    """Indices of bundle pairs that intersect."""
    bad = []
    bs = seq.bundles
    for i in range(len(bs)):
        for j in range(i + 1, len(bs)):
            if bundles_intersect(bs[i], bs[j], tol):
                bad.append((i, j))
    return bad


def side_convention_ok(seq: BundleSequence, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check that each bundle's far endpoints sit on tau or on one common side."""
    for b in seq.bundles:
        seen: set[Side] = set()
        for s in b.segments:
            side = side_of_polyline(seq.tau, s.b, tol)
            if side is not Side.ON:
                seen.add(side)
        if len(seen) > 1:
            return False
    return True
