"""Scan-and-go exploration of an unknown polygonal world.

The robot sees a disc of radius r around itself. Obstacle edges clipped to
the disc throw angular shadows; the uncovered directions are split into
sectors of at most sixty degrees, each contributing an open point on the
disc rim as a candidate destination. Visited centers, sector leaves, and
open points form a growing graph; when the best candidate is out of reach
the robot walks the graph path and then straightens it with the
multiple-shooting solver over the bundle of sight segments recorded at
each intermediate vertex.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import NamedTuple

from .bundles import (
    Bundle,
    BundleSequence,
    BundleError,
    bundle_sequence,
    fan,
    fake_segment_endpoint,
    minor_sector,
    order_bundle_segments,
)
from .geometry import (
    DEFAULT_TOL,
    Point2,
    PolylinePath,
    Segment,
    Tolerances,
    angle_between,
    closest_point_on_segment,
    dist,
    point_in_triangle,
    point_segment_distance,
    polyline,
    project_param,
    segment_intersection,
    sub,
)
from .rubber_band import rubber_band_solve, trim_bundles
from .shooting import MmsReport, SolveLimits, solve


class RobotError(Exception):
    pass


class CenterInsideObstacleError(RobotError):
    pass


class UnreachableError(RobotError):
    pass


class NoPathError(RobotError):
    """Raised when no open points remain but the goal was never reached."""

    def __init__(self, msg: str, trace: "PlanTrace | None" = None) -> None:
        super().__init__(msg)
        self.trace = trace


class StepLimitError(RobotError):
    def __init__(self, msg: str, trace: "PlanTrace | None" = None) -> None:
        super().__init__(msg)
        self.trace = trace


TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WorldMap:
    """Obstacle polygons in free space; boundaries are walkable."""

    obstacles: tuple[tuple[Point2, ...], ...]
    bounds: tuple[float, float, float, float] | None = None

    def __post_init__(self) -> None:
        rings = []
        for ring in self.obstacles:
            pts = tuple(Point2(float(p[0]), float(p[1])) for p in ring)
            if len(pts) < 3:
                raise RobotError("obstacle needs at least three vertices")
            if _ring_area(pts) < 0:
                pts = tuple(reversed(pts))
            rings.append(pts)
        object.__setattr__(self, "obstacles", tuple(rings))

    def edges(self):
        for ring in self.obstacles:
            n = len(ring)
            for i in range(n):
                yield Segment(ring[i], ring[(i + 1) % n])

    def contains_interior(self, p: Point2, tol: Tolerances = DEFAULT_TOL) -> bool:
        """Strict interior test; boundary points are free."""
        for ring in self.obstacles:
            if _point_in_ring(ring, p, tol):
                return True
        return False

    def segment_blocked(self, a: Point2, b: Point2,
                        tol: Tolerances = DEFAULT_TOL) -> bool:
        """True when the open segment passes through obstacle interior."""
        params = [0.0, 1.0]
        seg = Segment(a, b)
        length = dist(a, b)
        if length <= tol.eps_geom:
            return self.contains_interior(a, tol)
        for edge in self.edges():
            hit = segment_intersection(seg, edge, tol)
            if hit is None:
                continue
            pts = (hit.a, hit.b) if isinstance(hit, Segment) else (hit,)
            for p in pts:
                t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (length * length)
                params.append(min(1.0, max(0.0, t)))
        params.sort()
        for t0, t1 in zip(params, params[1:]):
            if (t1 - t0) * length <= tol.eps_geom:
                continue
            tm = (t0 + t1) / 2.0
            mid = Point2(a.x + tm * (b.x - a.x), a.y + tm * (b.y - a.y))
            if self.contains_interior(mid, tol):
                return True
        return False


def _ring_area(ring: tuple[Point2, ...]) -> float:
    s = 0.0
    n = len(ring)
    for i in range(n):
        p, q = ring[i], ring[(i + 1) % n]
        s += p.x * q.y - q.x * p.y
    return s / 2.0


def _point_in_ring(ring: tuple[Point2, ...], p: Point2,
                   tol: Tolerances) -> bool:
    n = len(ring)
    scale = max(1.0, max(abs(v.x) + abs(v.y) for v in ring))
    for i in range(n):
        if point_segment_distance(p, Segment(ring[i], ring[(i + 1) % n])) \
                <= tol.eps_geom * scale:
            return False
    inside = False
    j = n - 1
    for i in range(n):
        pi, pj = ring[i], ring[j]
        if (pi.y > p.y) != (pj.y > p.y):
            x_cross = pj.x + (p.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x)
            if p.x < x_cross:
                inside = not inside
        j = i
    return inside


def _norm_angle(a: float) -> float:
    return a % TWO_PI


class ClosedSight(NamedTuple):
    """Visible stretch [p1, p2] of one obstacle edge: the triangle
    (center, p1, p2) is known ground, the angular interval [a0, a1] is
    blocked beyond it."""

    center: Point2
    p1: Point2
    p2: Point2
    a0: float
    a1: float


class OpenSight(NamedTuple):
    """Unobstructed sector of at most pi/3 with an open point on its rim arc."""

    center: Point2
    radius: float
    a0: float
    a1: float
    leaf1: Point2
    leaf2: Point2
    point: Point2


class OpenPoint(NamedTuple):
    point: Point2
    rank: float | None


@dataclass(frozen=True)
class SightScan:
    center: Point2
    radius: float
    closed_sights: tuple[ClosedSight, ...]
    open_sights: tuple[OpenSight, ...]
    open_points: tuple[OpenPoint, ...]


def clip_segment_to_disc(seg: Segment, center: Point2, r: float,
                         tol: Tolerances = DEFAULT_TOL) -> Segment | None:
    """Portion of seg inside the closed disc, or None."""
    d = sub(seg.b, seg.a)
    f = sub(seg.a, center)
    a = d.x * d.x + d.y * d.y
    if a <= tol.eps_geom * tol.eps_geom:
        return seg if dist(seg.a, center) <= r else None
    b = 2.0 * (f.x * d.x + f.y * d.y)
    c = f.x * f.x + f.y * f.y - r * r
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return None
    root = math.sqrt(disc)
    t0 = max(0.0, (-b - root) / (2.0 * a))
    t1 = min(1.0, (-b + root) / (2.0 * a))
    if t1 <= t0:
        return None
    return Segment(Point2(seg.a.x + t0 * d.x, seg.a.y + t0 * d.y),
                   Point2(seg.a.x + t1 * d.x, seg.a.y + t1 * d.y))


def rank_open_point(t: Point2, center: Point2, goal: Point2,
                    alpha: float = 1.0, beta: float = 1.0,
                    tol: Tolerances = DEFAULT_TOL) -> float:
    """Greedy priority: alpha over goal distance plus beta over the angular
    deviation from the goal direction. Either measure at zero means the
    candidate is as good as it gets, so the rank is infinite."""
    d = dist(t, goal)
    if d <= tol.eps_geom or dist(center, goal) <= tol.eps_geom:
        return math.inf
    ang = angle_between(sub(t, center), sub(goal, center), tol)
    if ang <= tol.tol_angle:
        return math.inf
    return alpha / d + beta / ang


def _ray_segment_t(center: Point2, ca: float, sa: float, seg: Segment,
                   r: float) -> float | None:
    """Distance along the unit ray (ca, sa) from center to seg, or None.
    Endpoint hits count; edge-on segments do not."""
    ex = seg.b.x - seg.a.x
    ey = seg.b.y - seg.a.y
    denom = ca * ey - sa * ex
    if abs(denom) <= 1e-15 * max(1.0, abs(ex) + abs(ey)):
        return None
    fx = seg.a.x - center.x
    fy = seg.a.y - center.y
    s = (fx * sa - fy * ca) / denom
    if s < -1e-9 or s > 1.0 + 1e-9:
        return None
    t = (fx * ey - fy * ex) / denom
    if t <= 1e-12 or t > r * (1.0 + 1e-9):
        return None
    return t


def _point_on_edge_at(center: Point2, ang: float, seg: Segment,
                      r: float) -> Point2:
    """Point of seg seen from center in direction ang, clamped to seg."""
    ca, sa = math.cos(ang), math.sin(ang)
    t = _ray_segment_t(center, ca, sa, seg, r * (1.0 + 1e-6))
    if t is None:
        # boundary ray grazes an endpoint; take the endpoint closer in angle
        da = abs((math.atan2(seg.a.y - center.y, seg.a.x - center.x) - ang
                  + math.pi) % TWO_PI - math.pi)
        db = abs((math.atan2(seg.b.y - center.y, seg.b.x - center.x) - ang
                  + math.pi) % TWO_PI - math.pi)
        return seg.a if da <= db else seg.b
    p = Point2(center.x + t * ca, center.y + t * sa)
    return closest_point_on_segment(seg, p)


def compute_sights(world: WorldMap, center: Point2, r: float,
                   goal: Point2 | None = None, alpha: float = 1.0,
                   beta: float = 1.0,
                   tol: Tolerances = DEFAULT_TOL) -> SightScan:
    """One scan: an angular sweep over the disc assigns every blocked
    direction to the nearest obstacle edge, so closed sights are the
    visible boundary stretches. Unblocked directions become open sectors
    of at most pi/3 with open points mid-arc."""
    if world.contains_interior(center, tol):
        raise CenterInsideObstacleError(f"scan center {center} inside an obstacle")
    edges: list[Segment] = []
    breaks: list[float] = []
    for edge in world.edges():
        clipped = clip_segment_to_disc(edge, center, r, tol)
        if clipped is None:
            continue
        if dist(clipped.a, clipped.b) <= tol.eps_geom:
            continue
        ang_a = _norm_angle(math.atan2(clipped.a.y - center.y,
                                       clipped.a.x - center.x))
        ang_b = _norm_angle(math.atan2(clipped.b.y - center.y,
                                       clipped.b.x - center.x))
        span = (ang_b - ang_a) % TWO_PI
        if min(span, TWO_PI - span) <= tol.tol_angle:
            continue  # edge seen edge-on covers no direction
        edges.append(clipped)
        breaks.extend((ang_a, ang_b))

    closed: list[ClosedSight] = []
    free_ivals: list[tuple[float, float]] = []
    if not edges:
        free_ivals.append((0.0, TWO_PI))
    else:
        angs = sorted(set(breaks))
        ivals = [(angs[k], angs[k + 1]) for k in range(len(angs) - 1)]
        ivals.append((angs[-1], angs[0] + TWO_PI))
        owners: list[int] = []
        for s, e in ivals:
            mid = (s + e) / 2.0
            ca, sa = math.cos(mid), math.sin(mid)
            best, best_t = -1, math.inf
            for j, seg in enumerate(edges):
                t = _ray_segment_t(center, ca, sa, seg, r)
                if t is not None and t < best_t:
                    best, best_t = j, t
            owners.append(best)
        m = len(ivals)
        k0 = next((k for k in range(m) if owners[k] != owners[k - 1]), 0)
        # circular runs of intervals with one owner apiece
        runs: list[list[float | int]] = []
        for k in range(m):
            idx = (k0 + k) % m
            s, e = ivals[idx]
            if runs and runs[-1][0] == owners[idx]:
                runs[-1][2] += e - s
            else:
                runs.append([owners[idx], _norm_angle(s), e - s])
        for owner, a0, width in runs:
            if width <= tol.tol_angle:
                continue
            if owner == -1:
                free_ivals.append((a0, a0 + width))
                continue
            seg = edges[owner]
            p1 = _point_on_edge_at(center, a0, seg, r)
            p2 = _point_on_edge_at(center, a0 + width, seg, r)
            closed.append(ClosedSight(center, p1, p2, a0, a0 + width))

    opens: list[OpenSight] = []
    open_points: list[OpenPoint] = []
    for s, e in free_ivals:
        width = e - s
        n = max(1, math.ceil(width / (math.pi / 3.0) - 1e-12))
        piece = width / n
        for k in range(n):
            a0 = s + k * piece
            a1 = a0 + piece
            leaf1 = Point2(center.x + r * math.cos(a0),
                           center.y + r * math.sin(a0))
            leaf2 = Point2(center.x + r * math.cos(a1),
                           center.y + r * math.sin(a1))
            mid = (a0 + a1) / 2.0
            op = Point2(center.x + r * math.cos(mid),
                        center.y + r * math.sin(mid))
            opens.append(OpenSight(center, r, a0, a1, leaf1, leaf2, op))
            rank = None
            if goal is not None:
                rank = rank_open_point(op, center, goal, alpha, beta, tol)
            open_points.append(OpenPoint(op, rank))
    return SightScan(center, r, tuple(closed), tuple(opens),
                     tuple(open_points))


@dataclass
class OpenNode:
    point: Point2
    rank: float
    order: int


@dataclass
class ExplorationGraph:
    """Incrementally absorbed scans: nodes, weighted edges, pending open
    points, all sight regions, and the sight segments rooted at each
    visited center."""

    tol: Tolerances = DEFAULT_TOL
    nodes: list[Point2] = field(default_factory=list)
    adj: dict[int, dict[int, float]] = field(default_factory=dict)
    marked_open: list[OpenNode] = field(default_factory=list)
    sights: list[ClosedSight | OpenSight] = field(default_factory=list)
    scan_segments: dict[int, list[Point2]] = field(default_factory=dict)
    centers: list[int] = field(default_factory=list)
    _grid: dict[tuple[int, int], list[int]] = field(default_factory=dict)
    _order: int = 0
    _cell: float = 1e-5

    def _key(self, p: Point2) -> tuple[int, int]:
        return (int(math.floor(p.x / self._cell)),
                int(math.floor(p.y / self._cell)))

    def intern(self, p: Point2) -> int:
        kx, ky = self._key(p)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self._grid.get((kx + dx, ky + dy), ()):
                    if dist(self.nodes[idx], p) <= self.tol.eps_geom:
                        return idx
        idx = len(self.nodes)
        self.nodes.append(p)
        self._grid.setdefault((kx, ky), []).append(idx)
        self.adj[idx] = {}
        return idx

    def find(self, p: Point2) -> int | None:
        kx, ky = self._key(p)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self._grid.get((kx + dx, ky + dy), ()):
                    if dist(self.nodes[idx], p) <= self.tol.eps_geom:
                        return idx
        return None

    def add_edge(self, i: int, j: int) -> None:
        if i == j:
            return
        w = dist(self.nodes[i], self.nodes[j])
        self.adj[i][j] = w
        self.adj[j][i] = w


def _sight_contains(s: ClosedSight | OpenSight, p: Point2,
                    tol: Tolerances) -> bool:
    if isinstance(s, ClosedSight):
        return point_in_triangle(p, s.center, s.p1, s.p2, tol)
    if dist(p, s.center) > s.radius + tol.eps_geom:
        return False
    if dist(p, s.center) <= tol.eps_geom:
        return True
    ang = _norm_angle(math.atan2(p.y - s.center.y, p.x - s.center.x))
    rel = (ang - _norm_angle(s.a0)) % TWO_PI
    return rel <= (s.a1 - s.a0) + 2.0 * tol.tol_angle


def absorb_scan(graph: ExplorationGraph, scan: SightScan) -> ExplorationGraph:
    """Fold one scan into the graph.

    Closed sights contribute their leaves and regions unconditionally; an
    open sector is kept only when its open point is new ground (not inside
    any recorded sight and not a duplicate of a pending open point)."""
    tol = graph.tol
    c = graph.intern(scan.center)
    if c not in graph.centers:
        graph.centers.append(c)
    graph.marked_open = [o for o in graph.marked_open
                         if dist(o.point, scan.center) > tol.eps_geom]
    segs = graph.scan_segments.setdefault(c, [])

    for cs in scan.closed_sights:
        for leaf in (cs.p1, cs.p2):
            if dist(leaf, scan.center) <= tol.eps_geom:
                continue
            li = graph.intern(leaf)
            graph.add_edge(c, li)
            if all(dist(leaf, e) > tol.eps_geom for e in segs):
                segs.append(graph.nodes[li])
        graph.sights.append(cs)

    for osight, opoint in zip(scan.open_sights, scan.open_points):
        op = opoint.point
        if any(dist(op, o.point) <= tol.eps_geom for o in graph.marked_open):
            continue
        if any(_sight_contains(s, op, tol) for s in graph.sights):
            continue
        for leaf in (osight.leaf1, osight.leaf2):
            li = graph.intern(leaf)
            graph.add_edge(c, li)
            if all(dist(leaf, e) > tol.eps_geom for e in segs):
                segs.append(graph.nodes[li])
        oi = graph.intern(op)
        graph.add_edge(c, oi)
        if all(dist(op, e) > tol.eps_geom for e in segs):
            segs.append(graph.nodes[oi])
        rank = opoint.rank if opoint.rank is not None else 0.0
        graph.marked_open.append(OpenNode(graph.nodes[oi], rank, graph._order))
        graph._order += 1
        graph.sights.append(osight)
    return graph


def graph_shortest_path(graph: ExplorationGraph, a: Point2, b: Point2,
                        tol: Tolerances | None = None,
                        through: set[int] | None = None) -> PolylinePath:
    """Dijkstra over the absorbed scans.

    With `through`, interior vertices are confined to that node set; sight
    leaves are then mere fence anchors, not way stations."""
    tol = tol or graph.tol
    ia = graph.find(a)
    ib = graph.find(b)
    if ia is None or ib is None:
        raise UnreachableError("endpoint is not a graph node")
    if ia == ib:
        return polyline([graph.nodes[ia]], tol)
    dist_to = {ia: 0.0}
    prev: dict[int, int] = {}
    heap: list[tuple[float, int, int]] = [(0.0, 0, ia)]
    counter = 1
    seen: set[int] = set()
    while heap:
        d, _, u = heappop(heap)
        if u in seen:
            continue
        if u == ib:
            break
        seen.add(u)
        for v, w in graph.adj[u].items():
            if through is not None and v != ib and v not in through:
                continue
            nd = d + w
            if nd < dist_to.get(v, math.inf):
                dist_to[v] = nd
                prev[v] = u
                heappush(heap, (nd, counter, v))
                counter += 1
    if ib not in dist_to:
        raise UnreachableError("no graph path between the endpoints")
    chain = [ib]
    while chain[-1] != ia:
        chain.append(prev[chain[-1]])
    chain.reverse()
    return polyline([graph.nodes[i] for i in chain], tol)


@dataclass(frozen=True)
class BundleBuildStats:
    min_sector_angle: float
    straight_ties: int
    fake_segments: int


def _clip_fence(v: Point2, e: Point2, pieces: list[Segment],
                tol: Tolerances) -> Point2:
    """Cut fence [v, e] back to its first crossing with a known boundary
    stretch. Touching at the far end or running along a stretch is fine."""
    fence = Segment(v, e)
    best = 1.0
    for piece in pieces:
        hit = segment_intersection(fence, piece, tol)
        if hit is None or isinstance(hit, Segment):
            continue
        t = project_param(fence, hit)
        if 1e-9 < t < best - 1e-12:
            best = t
    if best >= 1.0 - 1e-12:
        return e
    return Point2(v.x + best * (e.x - v.x), v.y + best * (e.y - v.y))


def build_bundle_sequence(graph: ExplorationGraph, tau_hat: PolylinePath,
                          r: float, tol: Tolerances = DEFAULT_TOL
                          ) -> tuple[BundleSequence, BundleBuildStats]:
    """Bundle the sight segments hanging off each interior vertex of the
    graph path, restricted to the smaller sector at the bend (left side on
    straight ties). Vertices with nothing usable get a short fake segment
    into that sector. Every fence is clipped against the recorded boundary
    stretches so no segment reaches past known obstacle ground."""
    verts = tau_hat.vertices
    if len(verts) < 2:
        raise BundleError("path needs at least two vertices")
    pieces = [Segment(s.p1, s.p2) for s in graph.sights
              if isinstance(s, ClosedSight)]
    bundles = []
    min_sector = math.pi
    ties = 0
    fakes = 0
    for i in range(1, len(verts) - 1):
        v = verts[i]
        prev_v, next_v = verts[i - 1], verts[i + 1]
        mid_ang, width, tie = minor_sector(prev_v, v, next_v, tol)
        min_sector = min(min_sector, width)
        if tie:
            ties += 1
        lo = mid_ang - width / 2.0
        idx = graph.find(v)
        raw = graph.scan_segments.get(idx, []) if idx is not None else []
        endpoints: list[Point2] = []
        for e in raw:
            if dist(e, prev_v) <= tol.eps_geom or dist(e, next_v) <= tol.eps_geom:
                continue
            if dist(e, v) <= tol.eps_geom:
                continue
            ang = _norm_angle(math.atan2(e.y - v.y, e.x - v.x))
            if (ang - lo) % TWO_PI <= width + 2.0 * tol.tol_angle:
                if all(dist(e, kept) > tol.eps_geom for kept in endpoints):
                    endpoints.append(e)
        if not endpoints:
            e, width2, tie2 = fake_segment_endpoint(prev_v, v, next_v, r, tol)
            endpoints = [e]
            fakes += 1
        clipped: list[Point2] = []
        for e in endpoints:
            e = _clip_fence(v, e, pieces, tol)
            if dist(e, v) <= tol.eps_geom:
                continue
            if all(dist(e, kept) > tol.eps_geom for kept in clipped):
                clipped.append(e)
        if not clipped:
            clipped = endpoints
        b = fan(v, clipped, sector_angle=width)
        b = order_bundle_segments(b, prev_v, next_v, tol)
        bundles.append(b)
    seq = bundle_sequence(verts[0], bundles, verts[-1], tol)
    return seq, BundleBuildStats(min_sector, ties, fakes)


def preprocess(seq: BundleSequence, tol: Tolerances = DEFAULT_TOL
               ) -> tuple[BundleSequence, float]:
    """Clip every fan segment to half the minimum distance between bundle
    vertices, which keeps neighboring bundles disjoint."""
    verts = [b.vertex for b in seq.bundles]
    r0 = math.inf
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            r0 = min(r0, dist(a, b))
    if not math.isfinite(r0) or r0 <= tol.eps_geom:
        raise BundleError("bundle vertices too close to clip against")
    r0 /= 2.0
    new_bundles = []
    for b in seq.interior:
        segs = []
        for s in b.segments:
            length = dist(s.a, s.b)
            if length > r0:
                f = r0 / length
                segs.append(Segment(s.a, Point2(s.a.x + f * (s.b.x - s.a.x),
                                                s.a.y + f * (s.b.y - s.a.y))))
            else:
                segs.append(s)
        new_bundles.append(Bundle(b.vertex, tuple(segs), b.sector_angle))
    return (bundle_sequence(seq.p, new_bundles, seq.q, tol), r0)


@dataclass(frozen=True)
class ReturnEvent:
    """One solver invocation on a graph return path."""

    index: int
    tau_hat: PolylinePath
    sequence: BundleSequence
    k: int
    report: MmsReport | None
    walked: PolylinePath
    min_sector_angle: float
    straight_ties: int
    fake_segments: int
    solver: str
    wall_time: float

    @property
    def tau_length(self) -> float:
        return self.tau_hat.length

    @property
    def walked_length(self) -> float:
        return self.walked.length


@dataclass(frozen=True)
class PlanTrace:
    path: PolylinePath
    events: tuple[ReturnEvent, ...]
    reached: bool
    scans: int
    centers: tuple[Point2, ...]
    graph: ExplorationGraph


def group_count_rule(n_interior: int) -> int:
    return max(1, min(n_interior, n_interior // 5 if n_interior >= 5 else 1))


def plan(world: WorldMap, start: Point2, goal: Point2, r: float,
         alpha: float = 1.0, beta: float = 1.0, solver: str = "mms",
         limits: SolveLimits | None = None, step_limit: int = 500,
         trim_epsilon: float | None = None, fixed_k: int | None = None,
         tol: Tolerances = DEFAULT_TOL) -> PlanTrace:
    """Explore until the goal is inside the scan disc and directly walkable.

    solver picks how return trips are walked: "mms" straightens the graph
    path with the multiple-shooting solver, "rubber_band" with the trimmed
    relaxation, "graph" walks the graph path as is. fixed_k overrides the
    group count rule (clamped to the bundle count of each return).
    """
    if solver not in ("mms", "rubber_band", "graph"):
        raise ValueError(f"unknown solver {solver!r}")
    if r <= 0:
        raise ValueError("scan radius must be positive")
    if world.contains_interior(start, tol):
        raise CenterInsideObstacleError("start inside an obstacle")
    if world.contains_interior(goal, tol):
        raise CenterInsideObstacleError("goal inside an obstacle")
    limits = limits or SolveLimits()
    graph = ExplorationGraph(tol=tol)
    walk: list[Point2] = [start]
    events: list[ReturnEvent] = []
    pos = start
    scans = 0
    reached = False

    while True:
        if dist(pos, goal) <= tol.eps_geom:
            reached = True
            break
        if scans >= step_limit:
            trace = _trace(walk, events, False, scans, graph, tol)
            raise StepLimitError(f"no goal after {scans} scans", trace)
        scan = compute_sights(world, pos, r, goal, alpha, beta, tol)
        scans += 1
        absorb_scan(graph, scan)
        if dist(pos, goal) <= r + tol.eps_geom \
                and not world.segment_blocked(pos, goal, tol):
            walk.append(goal)
            pos = goal
            reached = True
            break
        best = _select_open(graph)
        if best is None:
            trace = _trace(walk, events, False, scans, graph, tol)
            raise NoPathError("no open points left and goal not reached", trace)
        graph.marked_open = [o for o in graph.marked_open if o is not best]
        target = best.point
        if dist(pos, target) <= r + tol.eps_geom \
                and not world.segment_blocked(pos, target, tol):
            walk.append(target)
            pos = target
            continue
        tau_hat = graph_shortest_path(graph, pos, target, tol,
                                      through=set(graph.centers))
        if len(tau_hat.vertices) < 3:
            # single-hop graph path, nothing to straighten
            walk.extend(tau_hat.vertices[1:])
            pos = target
            continue
        t0 = time.perf_counter()
        walked, seq, k, report, stats, used = _walk_return(
            graph, tau_hat, r, solver, limits, trim_epsilon, fixed_k, tol)
        dt = time.perf_counter() - t0
        events.append(ReturnEvent(index=len(events), tau_hat=tau_hat,
                                  sequence=seq, k=k, report=report,
                                  walked=walked,
                                  min_sector_angle=stats.min_sector_angle,
                                  straight_ties=stats.straight_ties,
                                  fake_segments=stats.fake_segments,
                                  solver=used, wall_time=dt))
        walk.extend(walked.vertices[1:])
        pos = target

    trace = _trace(walk, events, reached, scans, graph, tol)
    return trace


def _trace(walk: list[Point2], events: list[ReturnEvent], reached: bool,
           scans: int, graph: ExplorationGraph,
           tol: Tolerances) -> PlanTrace:
    centers = tuple(graph.nodes[i] for i in graph.centers)
    return PlanTrace(path=polyline(walk, tol), events=tuple(events),
                     reached=reached, scans=scans, centers=centers,
                     graph=graph)


def _select_open(graph: ExplorationGraph) -> OpenNode | None:
    best: OpenNode | None = None
    for o in graph.marked_open:
        if best is None or o.rank > best.rank \
                or (o.rank == best.rank and o.order < best.order):
            best = o
    return best


def _walk_return(graph: ExplorationGraph, tau_hat: PolylinePath, r: float,
                 solver: str, limits: SolveLimits,
                 trim_epsilon: float | None, fixed_k: int | None,
                 tol: Tolerances):
    seq, stats = build_bundle_sequence(graph, tau_hat, r, tol)
    if solver == "graph":
        return tau_hat, seq, 0, None, stats, "graph"
    seq2, _ = preprocess(seq, tol)
    n = len(seq2.interior)
    k = group_count_rule(n) if fixed_k is None else max(1, min(n, fixed_k))
    if solver == "mms":
        report = solve(seq2, k, limits, tol)
        return report.path, seq2, k, report, stats, "mms"
    segments = trim_bundles(seq2, trim_epsilon, tol)
    report = rubber_band_solve(segments, seq2.p, seq2.q,
                               limits, tol)
    return report.path, seq2, 0, report, stats, "rubber_band"
