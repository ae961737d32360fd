"""Multiple-shooting solver for shortest paths through bundle sequences.

The sequence is partitioned into contiguous groups joined by cutting
segments. Each group is solved exactly by a funnel sweep between its
boundary shooting points; the boundary points are then re-shot by funneling
across each junction and intersecting the result with the cutting segment.
Iteration stops when every junction satisfies the collinearity condition,
when the total length stalls, or at the iteration cap.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .bundles import BundleSequence, CuttingSegment, partition
from .funnel import (
    Crossing,
    Portal,
    bundle_portals,
    cut_crossing,
    taut_path,
    portal_crossings,
    quad_diagonal,
)
from .geometry import (
    DEFAULT_TOL,
    Point2,
    PolylinePath,
    Segment,
    Tolerances,
    add,
    angle_between,
    closest_point_on_segment,
    dist,
    polyline,
    segment_intersection,
    segment_segment_nearest,
    sub,
    unit,
)


class ShootingError(Exception):
    pass


class DegenerateJunctionError(ShootingError):
    """A junction angle was requested where a neighboring subpath has no bend
    vertex to measure against (fewer than two vertices)."""


class ConvergedBy(enum.Enum):
    COLLINEAR_CONDITION = "collinear_condition"
    LENGTH_TOLERANCE = "length_tolerance"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class SolveLimits:
    max_iter: int = 500
    tol_len: float = 1e-10
    tol_angle: float = 1e-7

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.tol_len <= 0 or self.tol_angle <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class _Corridors:
    """Per-group portal lists plus the synthetic diagonals between groups.

    group_portals[i] are the portals subpath i funnels through, in crossing
    order. junction_diagonals[i] spans the quad between the last fan of
    group i-1 and the first fan of group i (None when group i has no fans).
    """

    group_portals: tuple[tuple[Portal, ...], ...]
    junction_diagonals: tuple[Segment | None, ...]


@dataclass
class ShootingState:
    cuts: tuple[CuttingSegment, ...]
    points: tuple[Point2, ...]
    subpaths: tuple[PolylinePath, ...]
    iteration: int
    total_length: float
    crossings: tuple[tuple[Crossing, ...], ...] = ()
    corridors: _Corridors | None = None
    used_nearest_fallback: bool = False

    @property
    def k(self) -> int:
        return len(self.cuts) - 2


@dataclass(frozen=True)
class MmsReport:
    path: PolylinePath
    iterations: int
    converged_by: ConvergedBy
    per_iteration_lengths: tuple[float, ...]
    used_nearest_fallback: bool = False
    degenerate: bool = False
    states: tuple[ShootingState, ...] = ()

    @property
    def length(self) -> float:
        return self.path.length


def _build_corridors(seq: BundleSequence, groups, tol: Tolerances) -> _Corridors:
    per_group = []
    first_fan = []
    last_fan = []
    for group in groups:
        fans = [b for b in group if not b.is_degenerate]
        per_group.append(tuple(bundle_portals(fans, tol)))
        first_fan.append(fans[0] if fans else None)
        last_fan.append(fans[-1] if fans else None)
    diags: list[Segment | None] = [None] * len(groups)
    for i in range(1, len(groups)):
        if last_fan[i - 1] is not None and first_fan[i] is not None:
            diags[i] = quad_diagonal(last_fan[i - 1], first_fan[i], tol)
    return _Corridors(tuple(per_group), tuple(diags))


def _solve_subpaths(corr: _Corridors, points: tuple[Point2, ...],
                    tol: Tolerances) -> tuple[tuple[PolylinePath, ...],
                                              tuple[tuple[Crossing, ...], ...],
                                              bool]:
    subs = []
    crossings = []
    fallback = False
    for i, portals in enumerate(corr.group_portals):
        segs = [p.seg for p in portals]
        synth = [p.synthetic for p in portals]
        verts = taut_path(segs, points[i], points[i + 1], tol, synth)
        subs.append(polyline(verts, tol))
        cr = tuple(portal_crossings(verts, segs, tol))
        crossings.append(cr)
        fallback = fallback or any(c.fallback for c in cr)
    return tuple(subs), tuple(crossings), fallback


def initial_state(seq: BundleSequence, K: int,
                  tol: Tolerances = DEFAULT_TOL) -> ShootingState:
    """Shooting points start at the free endpoints of the cutting segments."""
    groups, cuts = partition(seq, K, tol)
    corr = _build_corridors(seq, groups, tol)
    points = tuple([cuts[0].u] + [c.v for c in cuts[1:-1]] + [cuts[-1].u])
    subs, crossings, fb = _solve_subpaths(corr, points, tol)
    total = sum(s.length for s in subs)
    return ShootingState(cuts=cuts, points=points, subpaths=subs,
                         iteration=0, total_length=total,
                         crossings=crossings, corridors=corr,
                         used_nearest_fallback=fb)


def junction_angle(state: ShootingState, i: int,
                   tol: Tolerances = DEFAULT_TOL) -> float:
    """Total turn at shooting point i, unfolded across the cutting segment.

    Measured against the ray from the cut's far endpoint through its bundle
    endpoint, so a straight crossing scores exactly pi.
    """
    if not 1 <= i <= state.k:
        raise ShootingError(f"junction index {i} out of range 1..{state.k}")
    cut = state.cuts[i]
    if cut.is_degenerate:
        raise DegenerateJunctionError(f"cut {i} has zero length")
    before = state.subpaths[i - 1]
    after = state.subpaths[i]
    if len(before.vertices) < 2 or len(after.vertices) < 2:
        raise DegenerateJunctionError(f"subpath at junction {i} has no edge")
    s = state.points[i]
    # skip vertices coincident with s at tolerance (pinched crossings)
    band = tol.eps_geom * max(1.0, before.length, after.length,
                              abs(s.x), abs(s.y))
    w = next((p for p in reversed(before.vertices) if dist(p, s) > band), None)
    w2 = next((p for p in after.vertices if dist(p, s) > band), None)
    if w is None or w2 is None:
        raise DegenerateJunctionError(f"subpath at junction {i} has no edge")
    r = add(cut.u, unit(sub(cut.u, cut.v), tol))
    return (angle_between(sub(s, w), sub(r, s), tol)
            + angle_between(sub(s, r), sub(w2, s), tol))


def check_collinear(state: ShootingState, i: int, tol_angle: float,
                    tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when shooting point i cannot improve by sliding along its cut.

    Interior points must cross straight; a point pinned at the bundle
    endpoint u only needs the turn to open toward the cut, and likewise at
    the far endpoint v.
    """
    cut = state.cuts[i]
    if cut.is_degenerate:
        return True
    try:
        ang = junction_angle(state, i, tol)
    except DegenerateJunctionError:
        return True
    s = state.points[i]
    if dist(s, cut.u) <= tol.eps_geom:
        return ang >= math.pi - tol_angle
    if dist(s, cut.v) <= tol.eps_geom:
        return ang <= math.pi + tol_angle
    return abs(ang - math.pi) <= tol_angle


def pick_t_points(state: ShootingState,
                  tol: Tolerances = DEFAULT_TOL) -> tuple[Point2, ...]:
    """One anchor per subpath: the midpoint when the subpath is a single
    segment, otherwise the interior vertex nearest the arc midpoint
    (earlier vertex on ties)."""
    out = []
    for sub_path in state.subpaths:
        verts = sub_path.vertices
        if len(verts) == 1:
            out.append(verts[0])
            continue
        if len(verts) == 2:
            out.append(Point2((verts[0].x + verts[1].x) / 2.0,
                              (verts[0].y + verts[1].y) / 2.0))
            continue
        cum = sub_path.cumulative()
        mid = sub_path.length / 2.0
        best_j = 1
        best_err = abs(cum[1] - mid)
        for j in range(2, len(verts) - 1):
            err = abs(cum[j] - mid)
            if err < best_err - tol.eps_geom * max(1.0, sub_path.length):
                best_err = err
                best_j = j
        out.append(verts[best_j])
    return tuple(out)


def _arc_of_point(path: PolylinePath, p: Point2, tol: Tolerances) -> float:
    """Arc-length position of p on the path (first edge containing it)."""
    verts = path.vertices
    if len(verts) == 1:
        return 0.0
    band = tol.eps_geom * max(1.0, path.length)
    cum = path.cumulative()
    best = 0.0
    best_d = math.inf
    for j in range(len(verts) - 1):
        seg = Segment(verts[j], verts[j + 1])
        near = closest_point_on_segment(seg, p)
        d = dist(p, near)
        if d <= band:
            return cum[j] + dist(verts[j], near)
        if d < best_d:
            best_d = d
            best = cum[j] + dist(verts[j], near)
    return best


def _diag_arc(path: PolylinePath, diag: Segment, tol: Tolerances) -> float:
    """Arc position where the path crosses the diagonal (nearest approach
    when they do not touch)."""
    verts = path.vertices
    cum = path.cumulative()
    for j in range(len(verts) - 1):
        edge = Segment(verts[j], verts[j + 1])
        hit = segment_intersection(edge, diag, tol)
        if hit is None:
            continue
        pt = hit.a if isinstance(hit, Segment) else hit
        return cum[j] + dist(verts[j], pt)
    best = math.inf
    best_arc = 0.0
    for j in range(len(verts) - 1):
        edge = Segment(verts[j], verts[j + 1])
        pe, _, d = segment_segment_nearest(edge, diag, tol)
        if d < best:
            best = d
            best_arc = cum[j] + dist(verts[j], pe)
    return best_arc


def _junction_portals(state: ShootingState, i: int, t_prev: Point2,
                      t_cur: Point2, tol: Tolerances
                      ) -> tuple[list[Segment], list[bool]]:
    """Portals crossed strictly between the two anchors, in order.

    Tail of group i-1 (everything past t_prev, which always includes the
    cutting segment), the synthetic diagonal when the next subpath has
    already crossed it by t_cur, then the head of group i (everything
    before t_cur). The second list flags the synthetic entries.
    """
    corr = state.corridors
    assert corr is not None
    sub_prev = state.subpaths[i - 1]
    sub_cur = state.subpaths[i]
    arc_prev = _arc_of_point(sub_prev, t_prev, tol)
    arc_cur = _arc_of_point(sub_cur, t_cur, tol)
    band_prev = tol.eps_geom * max(1.0, sub_prev.length)
    band_cur = tol.eps_geom * max(1.0, sub_cur.length)

    segs: list[Segment] = []
    synth: list[bool] = []
    prev_portals = corr.group_portals[i - 1]
    diag_prev = corr.junction_diagonals[i - 1] if i - 1 >= 1 else None
    if diag_prev is not None:
        arc = _diag_arc(sub_prev, diag_prev, tol)
        if arc > arc_prev + band_prev:
            segs.append(diag_prev)
            synth.append(True)
    # the cutting segment is the last portal of group i-1, so the tail
    # always carries it (t_prev sits strictly before the subpath's end)
    for c in state.crossings[i - 1]:
        if c.arc > arc_prev + band_prev:
            segs.append(prev_portals[c.portal].seg)
            synth.append(prev_portals[c.portal].synthetic)

    diag = corr.junction_diagonals[i]
    if diag is not None:
        arc = _diag_arc(sub_cur, diag, tol)
        if arc < arc_cur - band_cur:
            segs.append(diag)
            synth.append(True)
    cur_portals = corr.group_portals[i]
    for c in state.crossings[i]:
        if c.arc < arc_cur - band_cur:
            segs.append(cur_portals[c.portal].seg)
            synth.append(cur_portals[c.portal].synthetic)
    return segs, synth


def update_shooting_point(state: ShootingState, i: int, t_prev: Point2,
                          t_cur: Point2, limits: SolveLimits | None = None,
                          tol: Tolerances = DEFAULT_TOL) -> Point2:
    """Re-shoot point i by funneling t_prev -> t_cur across the junction and
    crossing the result with the cutting segment. Points that already meet
    the collinearity condition stay put."""
    limits = limits or SolveLimits()
    if check_collinear(state, i, limits.tol_angle, tol):
        return state.points[i]
    p, _ = _shoot(state, i, t_prev, t_cur, tol)
    return p


def _shoot(state: ShootingState, i: int, t_prev: Point2, t_cur: Point2,
           tol: Tolerances) -> tuple[Point2, bool]:
    segs, synth = _junction_portals(state, i, t_prev, t_cur, tol)
    verts = taut_path(segs, t_prev, t_cur, tol, synth)
    return cut_crossing(verts, state.cuts[i], tol)


def collinear_update(state: ShootingState, limits: SolveLimits | None = None,
                     tol: Tolerances = DEFAULT_TOL
                     ) -> tuple[ShootingState, bool]:
    """One synchronous sweep: every non-collinear junction is re-shot from
    the current state. Returns the new state and whether every junction was
    already collinear (in which case the state is unchanged)."""
    limits = limits or SolveLimits()
    k = state.k
    flags = [check_collinear(state, i, limits.tol_angle, tol)
             for i in range(1, k + 1)]
    if all(flags):
        return state, True
    ts = pick_t_points(state, tol)
    fallback = state.used_nearest_fallback
    new_points = list(state.points)
    for i in range(1, k + 1):
        if flags[i - 1]:
            continue
        p, fb = _shoot(state, i, ts[i - 1], ts[i], tol)
        new_points[i] = p
        fallback = fallback or fb
    pts = tuple(new_points)
    corr = state.corridors
    assert corr is not None
    subs, crossings, fb2 = _solve_subpaths(corr, pts, tol)
    new_state = ShootingState(cuts=state.cuts, points=pts, subpaths=subs,
                              iteration=state.iteration + 1,
                              total_length=sum(s.length for s in subs),
                              crossings=crossings, corridors=corr,
                              used_nearest_fallback=fallback or fb2)
    return new_state, False


def _concat_path(state: ShootingState, tol: Tolerances) -> PolylinePath:
    pts: list[Point2] = []
    for sub_path in state.subpaths:
        pts.extend(sub_path.vertices)
    return polyline(pts, tol)


def default_group_count(n_interior: int) -> int:
    """Group-count rule used when none is given: one group per five interior
    bundles, at least one, never more than the bundle count."""
    if n_interior < 1:
        raise ShootingError("need at least one interior bundle")
    return max(1, min(n_interior, n_interior // 5))


def solve(seq: BundleSequence, K: int | None = None,
          limits: SolveLimits | None = None,
          tol: Tolerances = DEFAULT_TOL,
          record_states: bool = False) -> MmsReport:
    """Run the multiple-shooting iteration to convergence."""
    limits = limits or SolveLimits()
    n = len(seq.interior)
    if K is None:
        K = default_group_count(n)
    state = initial_state(seq, K, tol)
    lengths = [state.total_length]
    states = [state] if record_states else []
    converged = ConvergedBy.MAX_ITERATIONS
    for _ in range(limits.max_iter):
        new_state, all_collinear = collinear_update(state, limits, tol)
        if all_collinear:
            converged = ConvergedBy.COLLINEAR_CONDITION
            break
        lengths.append(new_state.total_length)
        if record_states:
            states.append(new_state)
        prev_len = state.total_length
        state = new_state
        rel = (prev_len - new_state.total_length) / max(prev_len, 1e-300)
        if rel < limits.tol_len:
            converged = ConvergedBy.LENGTH_TOLERANCE
            break
    path = _concat_path(state, tol)
    degenerate = any(dist(a, b) <= tol.eps_geom
                     for a, b in zip(path.vertices, path.vertices[1:]))
    return MmsReport(path=path, iterations=state.iteration,
                     converged_by=converged,
                     per_iteration_lengths=tuple(lengths),
                     used_nearest_fallback=state.used_nearest_fallback,
                     degenerate=degenerate,
                     states=tuple(states))
