"""Iterative rubber-band baseline over disjoint segments.

Works on the trimmed sequence: each bundle segment loses a small piece at
the shared vertex so the segments become pairwise disjoint, then one point
per segment is relaxed until the path is taut. A smoothed joint descent
crosses the flat valleys that near-parallel segments create; Gauss-Seidel
sweeps then finish the job, each inner step solving the two-anchor
reflection problem on its segment exactly, so every sweep can only shorten
the path."""
from __future__ import annotations

import math

from .bundles import BundleSequence
from .funnel import smoothed_chain_descent
from .geometry import (
    DEFAULT_TOL,
    Point2,
    PolylinePath,
    Segment,
    Tolerances,
    best_transit_point,
    dist,
    lerp,
    polyline,
    segment_intersection,
)
from .shooting import ConvergedBy, MmsReport, SolveLimits


class RubberBandError(Exception):
    pass


class EpsilonTooLargeError(RubberBandError):
    """Trimming by epsilon would consume an entire segment."""


class StillIntersectingError(RubberBandError):
    """Segments remain in contact after trimming."""


def trim_bundles(seq: BundleSequence, epsilon: float | None = None,
                 tol: Tolerances = DEFAULT_TOL) -> list[Segment]:
    """Shorten every fan segment away from its shared vertex.

    Returns the trimmed segments in traversal order. epsilon defaults to
    1e-6 of the sequence diameter.
    """
    if epsilon is None:
        epsilon = 1e-6 * seq.diameter()
    if epsilon <= 0:
        raise RubberBandError("epsilon must be positive")
    out: list[Segment] = []
    for b in seq.interior:
        for s in b.segments:
            length = dist(s.a, s.b)
            if epsilon >= length - tol.eps_geom:
                raise EpsilonTooLargeError(
                    f"epsilon {epsilon:g} consumes a segment of length {length:g}")
            out.append(Segment(lerp(s.a, s.b, epsilon / length), s.b))
    for i, s1 in enumerate(out):
        for s2 in out[i + 1:]:
            if segment_intersection(s1, s2, tol) is not None:
                raise StillIntersectingError(
                    "segments still touch after trimming; increase epsilon")
    return out


def rubber_band_solve(segments: list[Segment], p: Point2, q: Point2,
                      limits: SolveLimits | None = None,
                      tol: Tolerances = DEFAULT_TOL) -> MmsReport:
    """Relax one point per segment until the largest move stalls."""
    limits = limits or SolveLimits()
    if not segments:
        return MmsReport(path=polyline([p, q], tol), iterations=0,
                         converged_by=ConvergedBy.LENGTH_TOLERANCE,
                         per_iteration_lengths=(dist(p, q),))
    xs = [p.x, q.x] + [c.x for s in segments for c in s]
    ys = [p.y, q.y] + [c.y for s in segments for c in s]
    diameter = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    diameter = max(diameter, tol.eps_geom)
    pts = smoothed_chain_descent(segments, p, q, max(1.0, diameter))

    def total() -> float:
        run = dist(p, pts[0])
        for a, b in zip(pts, pts[1:]):
            run += dist(a, b)
        return run + dist(pts[-1], q)

    lengths = [total()]
    converged = ConvergedBy.MAX_ITERATIONS
    iterations = 0
    for _ in range(limits.max_iter):
        moved = 0.0
        for i, seg in enumerate(segments):
            prev_pt = p if i == 0 else pts[i - 1]
            next_pt = q if i == len(segments) - 1 else pts[i + 1]
            new = best_transit_point(seg, prev_pt, next_pt, tol)
            moved = max(moved, dist(new, pts[i]))
            pts[i] = new
        iterations += 1
        lengths.append(total())
        if moved < limits.tol_len * diameter:
            converged = ConvergedBy.LENGTH_TOLERANCE
            break
    degenerate = False
    chain = [p, *pts, q]
    for a, b in zip(chain, chain[1:]):
        if dist(a, b) <= tol.eps_geom:
            degenerate = True
            break
    return MmsReport(path=polyline(chain, tol), iterations=iterations,
                     converged_by=converged,
                     per_iteration_lengths=tuple(lengths),
                     degenerate=degenerate)
