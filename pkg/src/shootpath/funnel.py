"""Taut paths through corridors of adjacent triangles.

A sub-sequence of bundles unrolls into a strip of triangles whose shared
edges are the fan segments (plus one synthetic diagonal between consecutive
bundles). The shortest path from an entry point to a destination on the last
cut is found with a funnel sweep over those shared edges: consecutive edges
share exactly one endpoint, so the funnel tightens one chain at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .bundles import Bundle, CuttingSegment
from .geometry import (
    DEFAULT_TOL,
    Point2,
    PolylinePath,
    Segment,
    Tolerances,
    best_transit_point,
    dist,
    lerp,
    point_segment_distance,
    polyline,
    segment_intersection,
    segment_segment_nearest,
    signed_area2,
)


class CorridorError(Exception):
    pass


class NonSimpleCorridorError(CorridorError):
    pass


class PointOutsideCorridorError(CorridorError):
    pass


class Portal(NamedTuple):
    seg: Segment
    synthetic: bool  # True for inter-bundle diagonals, False for fan segments


Triangle = tuple[Point2, Point2, Point2]


@dataclass(frozen=True)
class Corridor:
    triangles: tuple[Triangle, ...]
    shared_edges: tuple[Segment, ...]
    portals: tuple[Portal, ...]
    entry: Point2
    exit: Segment


def _same(p: Point2, q: Point2, eps: float) -> bool:
    return p == q or dist(p, q) <= eps


def quad_diagonal(prev_bundle: Bundle, next_bundle: Bundle,
                  tol: Tolerances = DEFAULT_TOL) -> Segment:
    """Splitting diagonal of the quadrilateral between two adjacent fans.

    Prefer joining the last far endpoint of the first fan to the next vertex;
    fall back to the other diagonal when that one leaves the quadrilateral.
    """
    a, b = prev_bundle.vertex, prev_bundle.segments[-1].b
    a2, b2 = next_bundle.vertex, next_bundle.segments[0].b

    def opposite(p: Point2, q: Point2, r: Point2, s: Point2) -> bool:
        d1 = signed_area2(p, q, r)
        d2 = signed_area2(p, q, s)
        band = tol.eps_geom * max(1.0, dist(p, q) ** 2)
        return (d1 > band and d2 < -band) or (d1 < -band and d2 > band)

    if opposite(b, a2, a, b2):
        return Segment(b, a2)
    if opposite(a, b2, b, a2):
        return Segment(a, b2)
    return Segment(b, a2)


def bundle_portals(bundles: list[Bundle], tol: Tolerances = DEFAULT_TOL) -> list[Portal]:
    """Crossing order of all fan segments, with diagonals between fans."""
    nd = [b for b in bundles if not b.is_degenerate]
    out: list[Portal] = []
    for k, b in enumerate(nd):
        if k > 0:
            out.append(Portal(quad_diagonal(nd[k - 1], b, tol), True))
        out.extend(Portal(s, False) for s in b.segments)
    return out


def _strip_triangle(s1: Segment, s2: Segment, eps: float) -> Triangle:
    """Triangle spanned by two consecutive portals sharing one endpoint."""
    for p in (s1.a, s1.b):
        for q in (s2.a, s2.b):
            if _same(p, q, eps):
                other1 = s1.b if p == s1.a else s1.a
                other2 = s2.b if q == s2.a else s2.a
                return (other1, p, other2)
    # No shared endpoint; fall back to a spanning triangle (degenerate strips).
    return (s1.a, s1.b, s2.b)


def _tri_area(t: Triangle) -> float:
    return 0.5 * abs(signed_area2(*t))


def _in_triangle_band(p: Point2, t: Triangle, tol: Tolerances) -> bool:
    scale = max(1.0, dist(t[0], t[1]), dist(t[1], t[2]), dist(t[2], t[0]))
    if _tri_area(t) <= tol.eps_geom * scale * scale:
        return (point_segment_distance(p, Segment(t[0], t[1])) <= tol.eps_geom * scale
                or point_segment_distance(p, Segment(t[1], t[2])) <= tol.eps_geom * scale)
    d1 = signed_area2(t[0], t[1], p)
    d2 = signed_area2(t[1], t[2], p)
    d3 = signed_area2(t[2], t[0], p)
    band = tol.eps_geom * scale
    neg = d1 < -band or d2 < -band or d3 < -band
    pos = d1 > band or d2 > band or d3 > band
    return not (neg and pos)


def _clip_convex(subject: list[Point2], clip: Triangle) -> list[Point2]:
    """Sutherland-Hodgman clip of a polygon by a CCW triangle."""
    pts = list(clip)
    if signed_area2(*pts) < 0:
        pts.reverse()
    out = subject
    for i in range(3):
        a, b = pts[i], pts[(i + 1) % 3]
        if not out:
            return []
        nxt: list[Point2] = []
        for j, cur in enumerate(out):
            prv = out[j - 1]
            dc = signed_area2(a, b, cur)
            dp = signed_area2(a, b, prv)
            if dc >= 0:
                if dp < 0:
                    t = dp / (dp - dc)
                    nxt.append(lerp(prv, cur, t))
                nxt.append(cur)
            elif dp >= 0:
                t = dp / (dp - dc)
                nxt.append(lerp(prv, cur, t))
        out = nxt
    return out


def _poly_area(pts: list[Point2]) -> float:
    if len(pts) < 3:
        return 0.0
    s = 0.0
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        s += a.x * b.y - a.y * b.x
    return 0.5 * abs(s)


def corridor_is_simple(c: Corridor, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check that no two triangles overlap beyond shared boundary."""
    scale = 1.0
    for t in c.triangles:
        for p in t:
            scale = max(scale, abs(p.x), abs(p.y))
    thresh = tol.eps_geom * scale * scale
    tris = [t for t in c.triangles if _tri_area(t) > thresh]
    for i in range(len(tris)):
        for j in range(i + 1, len(tris)):
            inter = _clip_convex(list(tris[i]), tris[j])
            if _poly_area(inter) > thresh:
                return False
    return True


def triangulate_subsequence(sub: list[Bundle], entry: Point2, exit_seg: Segment,
                            tol: Tolerances = DEFAULT_TOL,
                            strict: bool = True) -> Corridor:
    """Unroll a sub-sequence into a corridor entered at a point.

    exit_seg must be the last fan segment of the sub-sequence, or a degenerate
    segment standing for a terminal point beyond all fans. With strict=True a
    corridor whose triangles overlap in their interiors raises
    NonSimpleCorridorError (the usual cause is intersecting bundles).
    """
    eps = tol.eps_geom
    ports = bundle_portals(list(sub), tol)
    exit_is_point = dist(exit_seg.a, exit_seg.b) <= eps

    tris: list[Triangle] = []
    if not ports:
        tris.append((entry, exit_seg.a, exit_seg.b))
        c = Corridor(tuple(tris), (), (), entry, exit_seg)
        if strict and not corridor_is_simple(c, tol):
            raise NonSimpleCorridorError("corridor triangles overlap")
        return c

    last = ports[-1].seg
    if not exit_is_point:
        matches = (_same(exit_seg.a, last.a, eps) and _same(exit_seg.b, last.b, eps)) or \
                  (_same(exit_seg.a, last.b, eps) and _same(exit_seg.b, last.a, eps))
        if not matches:
            raise CorridorError("exit segment is not the last fan segment")

    first = ports[0].seg
    tris.append((entry, first.a, first.b))
    for k in range(1, len(ports)):
        tris.append(_strip_triangle(ports[k - 1].seg, ports[k].seg, eps))
    if exit_is_point:
        tris.append((last.a, last.b, exit_seg.a))
        shared = tuple(p.seg for p in ports)
    else:
        shared = tuple(p.seg for p in ports[:-1])

    c = Corridor(tuple(tris), shared, tuple(ports), entry, exit_seg)
    if strict and not corridor_is_simple(c, tol):
        raise NonSimpleCorridorError(
            "corridor triangles overlap; bundles likely intersect, preprocess first"
        )
    return c


def _area_snapped(o: Point2, a: Point2, b: Point2, eps: float) -> float:
    s = signed_area2(o, a, b)
    if abs(s) <= eps * max(1.0, dist(o, a) * dist(o, b)):
        return 0.0
    return s


def orient_portals(portals: list[Segment], src: Point2, dst: Point2,
                   tol: Tolerances = DEFAULT_TOL) -> list[tuple[Point2, Point2]]:
    """Assign (left, right) endpoints per portal, consistent along the strip.

    The first portal is oriented as seen from src; each later portal keeps the
    endpoint it shares with its predecessor on the same chain.
    """
    eps = tol.eps_geom
    out: list[tuple[Point2, Point2]] = []
    for k, seg in enumerate(portals):
        a, b = seg
        if k == 0:
            s = _area_snapped(src, a, b, eps)
            if s == 0.0:
                s = _area_snapped(src, dst, b, eps) - _area_snapped(src, dst, a, eps)
            l, r = (b, a) if s > 0 else (a, b)
        else:
            pl, pr = out[-1]
            if _same(a, pl, eps) and _same(b, pr, eps):
                l, r = a, b
            elif _same(b, pl, eps) and _same(a, pr, eps):
                l, r = b, a
            elif _same(a, pl, eps):
                l, r = a, b
            elif _same(b, pl, eps):
                l, r = b, a
            elif _same(a, pr, eps):
                l, r = b, a
            elif _same(b, pr, eps):
                l, r = a, b
            else:
                eye = lerp(pl, pr, 0.5)
                s = _area_snapped(eye, a, b, eps)
                l, r = (b, a) if s > 0 else (a, b)
        out.append((l, r))
    return out


def funnel_path(portals: list[Segment], src: Point2, dst: Point2,
                tol: Tolerances = DEFAULT_TOL) -> list[Point2]:
    """Taut path from src to dst crossing the portals in order.

    A portal whose endpoint lies at the current apex is already satisfied
    by touching it there, so each restart first skips such portals and then
    reorients the rest as seen from the new apex. Fan bundles pinch the
    corridor at their shared vertex and flip its chirality, which a single
    global orientation cannot follow.
    """
    eps = tol.eps_geom
    if not portals:
        return [src, dst]
    n = len(portals)
    pts = [src]
    apex = src
    i0 = 0
    while True:
        while i0 < n and (_same(portals[i0].a, apex, eps)
                          or _same(portals[i0].b, apex, eps)):
            i0 += 1
        if i0 >= n:
            break
        oriented = orient_portals(portals[i0:], apex, dst, tol)
        oriented.append((dst, dst))
        pl = pr = apex
        li = ri = -1
        i = 0
        restarted = False
        while i < len(oriented):
            l, r = oriented[i]
            # Right chain: candidate tightens when not right of apex->pr.
            if _area_snapped(apex, pr, r, eps) >= 0.0:
                if _same(apex, pr, eps) or _area_snapped(apex, pl, r, eps) <= 0.0:
                    pr, ri = r, i
                else:
                    # Right swept past left: left endpoint becomes the apex.
                    apex = pl
                    pts.append(apex)
                    i0 = i0 + li + 1
                    restarted = True
                    break
            if _area_snapped(apex, pl, l, eps) <= 0.0:
                if _same(apex, pl, eps) or _area_snapped(apex, pr, l, eps) >= 0.0:
                    pl, li = l, i
                else:
                    apex = pr
                    pts.append(apex)
                    i0 = i0 + ri + 1
                    restarted = True
                    break
            i += 1
        if not restarted:
            break
    pts.append(dst)

    dedup = [pts[0]]
    for p in pts[1:]:
        if dist(dedup[-1], p) > eps:
            dedup.append(p)
    return dedup


def _strip_folds(portals: list[Segment], src: Point2, dst: Point2,
                 tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the portal strip cannot be unrolled flat.

    The strip triangles of a walkable sleeve tile the plane without
    overlap; fences hanging off both sides of the trajectory fold the
    strip back over itself, and the funnel invariants break there."""
    tris: list[Triangle] = [(src, portals[0].a, portals[0].b)]
    for k in range(1, len(portals)):
        tris.append(_strip_triangle(portals[k - 1], portals[k], tol.eps_geom))
    tris.append((portals[-1].a, portals[-1].b, dst))
    scale = 1.0
    for t in tris:
        for p in t:
            scale = max(scale, abs(p.x), abs(p.y))
    thresh = tol.eps_geom * scale * scale
    fat = [t for t in tris if _tri_area(t) > thresh]
    for i in range(len(fat)):
        for j in range(i + 1, len(fat)):
            if _poly_area(_clip_convex(list(fat[i]), fat[j])) > thresh:
                return True
    return False


def _sweep(pts: list[Point2], portals: list[Segment], src: Point2, dst: Point2,
           stop: float, max_sweeps: int, tol: Tolerances) -> None:
    for _ in range(max_sweeps):
        moved = 0.0
        for i, seg in enumerate(portals):
            prev_pt = pts[i - 1] if i > 0 else src
            next_pt = pts[i + 1] if i + 1 < len(pts) else dst
            new = best_transit_point(seg, prev_pt, next_pt, tol)
            moved = max(moved, dist(new, pts[i]))
            pts[i] = new
        if moved <= stop:
            return


def _unpin_runs(pts: list[Point2], portals: list[Segment], src: Point2,
                dst: Point2, stop: float, eps: float, tol: Tolerances) -> bool:
    """Try to break up coincident runs that trap the coordinate sweep.

    Once three or more consecutive crossing points collapse onto one spot,
    no single-point move can reduce the length even when spreading the run
    would. Each run is re-seeded at its segment midpoints and re-relaxed
    against fixed outer anchors; the result is kept only when strictly
    shorter."""
    improved = False
    i = 0
    while i < len(pts):
        j = i
        while j + 1 < len(pts) and dist(pts[j + 1], pts[i]) <= eps:
            j += 1
        if j > i:
            a = pts[i - 1] if i > 0 else src
            b = pts[j + 1] if j + 1 < len(pts) else dst
            old = dist(a, pts[i]) + dist(pts[j], b)
            trial = [lerp(s.a, s.b, 0.5) for s in portals[i:j + 1]]
            _sweep(trial, portals[i:j + 1], a, b, stop, 200, tol)
            new = (dist(a, trial[0]) + dist(trial[-1], b)
                   + sum(dist(u, v) for u, v in zip(trial, trial[1:])))
            if new < old - stop:
                pts[i:j + 1] = trial
                improved = True
        i = j + 1
    return improved


def smoothed_chain_descent(portals: list[Segment], src: Point2, dst: Point2,
                           scale: float) -> list[Point2]:
    """Joint minimization over all crossing parameters at once.

    Near-duplicate portals (two fences a fraction of a degree apart) make
    the length landscape a long flat valley where one-point-at-a-time
    sweeps creep for millions of rounds. A quasi-Newton pass over the
    smoothed length sqrt(d^2 + mu^2), annealed in mu, walks the valley in
    a handful of steps and lands close enough for the exact sweep to
    finish."""
    n = len(portals)
    ax = np.array([[s.a.x, s.a.y] for s in portals])
    dx = np.array([[s.b.x - s.a.x, s.b.y - s.a.y] for s in portals])
    ends = np.array([[src.x, src.y], [dst.x, dst.y]])

    def fg(t: np.ndarray, mu: float) -> tuple[float, np.ndarray]:
        pts = ax + t[:, None] * dx
        chain = np.vstack([ends[0], pts, ends[1]])
        d = np.diff(chain, axis=0)
        r = np.sqrt(np.einsum("ij,ij->i", d, d) + mu * mu)
        f = float(r.sum())
        u = d / r[:, None]
        grad = np.einsum("ij,ij->i", u[:-1] - u[1:], dx)
        return f, grad

    t = np.full(n, 0.5)
    for mu in (1e-2 * scale, 1e-4 * scale, 1e-6 * scale):
        res = minimize(fg, t, args=(mu,), jac=True, method="L-BFGS-B",
                       bounds=[(0.0, 1.0)] * n,
                       options={"maxiter": 500, "ftol": 1e-16, "gtol": 1e-12})
        t = np.clip(res.x, 0.0, 1.0)
    pts = ax + t[:, None] * dx
    return [Point2(float(x), float(y)) for x, y in pts]


def relax_crossings(portals: list[Segment], src: Point2, dst: Point2,
                    tol: Tolerances = DEFAULT_TOL,
                    max_sweeps: int = 1000) -> list[Point2]:
    """Exact crossing points of the shortest path over ordered portals.

    Path length is convex in the per-portal crossing parameters, so any
    descent reaches the global optimum regardless of the strip's shape. A
    smoothed quasi-Newton pass crosses the ill-conditioned valleys that
    near-parallel portals create, then Gauss-Seidel sweeps with the exact
    two-anchor transit minimizer snap crossings onto portal endpoints. The
    one trap left is a run of points pinched onto a shared fan vertex,
    where single-point moves cannot help; converged runs are re-seeded
    until no spread pays. Used where the funnel cannot go: strips folded
    by fences hanging off both sides of the trajectory."""
    scale = max(1.0, dist(src, dst),
                max(dist(src, s.a) + dist(s.a, s.b) for s in portals))
    stop = max(tol.tol_len * scale, 1e-14 * scale)
    eps = tol.eps_geom * scale
    pts = smoothed_chain_descent(portals, src, dst, scale)
    for _ in range(20):
        _sweep(pts, portals, src, dst, stop, max_sweeps, tol)
        if not _unpin_runs(pts, portals, src, dst, stop, eps, tol):
            break
    return [src] + pts + [dst]


def taut_path(portals: list[Segment], src: Point2, dst: Point2,
              tol: Tolerances = DEFAULT_TOL,
              synthetic: list[bool] | None = None) -> list[Point2]:
    """Shortest src->dst path crossing the portals in order.

    Funnel sweep on strips that unroll flat, convex relaxation on folded
    ones. Folding means the strip triangles overlap, so the synthetic
    inter-fan diagonals no longer separate anything the path must respect;
    the relaxation drops them (per `synthetic`) and works on the real fan
    segments alone, which is the problem the funnel was standing in for.
    Output is the deduplicated vertex chain."""
    if not portals:
        return [src, dst]
    if _strip_folds(portals, src, dst, tol):
        real = portals
        if synthetic is not None:
            real = [s for s, syn in zip(portals, synthetic) if not syn]
        if not real:
            return [src, dst]
        pts = relax_crossings(real, src, dst, tol)
        scale = max(1.0, max(max(abs(p.x), abs(p.y)) for p in pts))
        eps = tol.eps_geom * scale
        dedup = [pts[0]]
        for p in pts[1:]:
            if dist(dedup[-1], p) > eps:
                dedup.append(p)
        # crossings pinched onto dst collapse into it; the path still ends there
        if len(dedup) == 1:
            dedup.append(pts[-1])
        else:
            dedup[-1] = pts[-1]
        return dedup
    return funnel_path(portals, src, dst, tol)


def shortest_path_corridor(c: Corridor, src: Point2, dst: Point2,
                           tol: Tolerances = DEFAULT_TOL) -> PolylinePath:
    """Shortest src->dst path through the corridor."""
    eps = tol.eps_geom
    if c.triangles:
        first, last = c.triangles[0], c.triangles[-1]
        if not _in_triangle_band(src, first, tol):
            raise PointOutsideCorridorError(f"source {src} not in the entry triangle")
        exit_scale = max(1.0, dist(c.exit.a, c.exit.b))
        on_exit = point_segment_distance(dst, c.exit) <= eps * exit_scale
        if not on_exit and not _in_triangle_band(dst, last, tol):
            raise PointOutsideCorridorError(f"destination {dst} not in the last triangle")
    verts = funnel_path([p.seg for p in c.portals], src, dst, tol)
    if len(verts) == 1:
        verts = verts * 2
    return polyline(verts, tol)


@dataclass(frozen=True)
class Crossing:
    portal: int
    point: Point2
    arc: float
    edge: int
    fallback: bool


def portal_crossings(path: list[Point2], portals: list[Segment],
                     tol: Tolerances = DEFAULT_TOL) -> list[Crossing]:
    """Where the path meets each portal, walked in tandem.

    The taut path meets portals in order, so the scan resumes from the edge
    of the previous hit. A numerically missed portal falls back to the point
    of nearest approach and is flagged.
    """
    edges = [Segment(path[j], path[j + 1]) for j in range(len(path) - 1)]
    cum = [0.0]
    for e in edges:
        cum.append(cum[-1] + dist(e.a, e.b))
    out: list[Crossing] = []
    start = 0
    for k, seg in enumerate(portals):
        found: Crossing | None = None
        for j in range(start, len(edges)):
            hit = segment_intersection(edges[j], seg, tol)
            if hit is None:
                continue
            if isinstance(hit, Segment):
                # First touch along the path direction.
                da = dist(edges[j].a, hit.a)
                db = dist(edges[j].a, hit.b)
                pt = hit.a if da <= db else hit.b
            else:
                pt = hit
            found = Crossing(k, pt, cum[j] + dist(edges[j].a, pt), j, False)
            break
        if found is None:
            best = None
            for j in range(len(edges)):
                p_e, p_s, d = segment_segment_nearest(edges[j], seg, tol)
                if best is None or d < best[0]:
                    best = (d, j, p_s, p_e)
            _, j, p_s, p_e = best
            found = Crossing(k, p_s, cum[j] + dist(edges[j].a, p_e), j, True)
        else:
            start = found.edge
        out.append(found)
    return out


def cut_crossing(path: list[Point2], cut: CuttingSegment,
                 tol: Tolerances = DEFAULT_TOL) -> tuple[Point2, bool]:
    """Intersection of a path with the cut [u, v].

    An overlap resolves to its point closest to u; a numerically empty
    intersection resolves to the point of the cut nearest the path, flagged.
    """
    if cut.is_degenerate:
        return cut.u, False
    cseg = cut.as_segment()
    first_point: Point2 | None = None
    best_overlap: Point2 | None = None
    for j in range(len(path) - 1):
        hit = segment_intersection(Segment(path[j], path[j + 1]), cseg, tol)
        if hit is None:
            continue
        if isinstance(hit, Segment):
            # a run along the cut: keep the end nearest u, across all runs
            pt = hit.a if dist(hit.a, cut.u) <= dist(hit.b, cut.u) else hit.b
            if best_overlap is None or dist(pt, cut.u) < dist(best_overlap, cut.u):
                best_overlap = pt
        elif first_point is None:
            first_point = hit
    if best_overlap is not None:
        if first_point is not None and \
                dist(first_point, cut.u) < dist(best_overlap, cut.u):
            return first_point, False
        return best_overlap, False
    if first_point is not None:
        return first_point, False
    best = None
    for j in range(len(path) - 1):
        _, p_s, d = segment_segment_nearest(Segment(path[j], path[j + 1]), cseg, tol)
        if best is None or d < best[0]:
            best = (d, p_s)
    return best[1], True
