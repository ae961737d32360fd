"""Discretized dynamic-programming reference for segment-visiting paths.

Independent check for the corridor solvers: sample every segment, run a
layered DP over the samples, then tighten by re-running the DP on shrinking
windows around the incumbent choice of each layer. The result is an upper
bound on the true optimum that the window passes drive toward machine
precision, with no shared code path with the funnel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_TOL, Point2, PolylinePath, Segment, Tolerances, polyline


class OracleError(Exception):
    pass


class EmptyLayerError(OracleError):
    pass


@dataclass(frozen=True)
class DiscretizedInstance:
    """Sampled layers between fixed endpoints.

    layers[k] holds the candidate points of the k-th crossed segment, in
    segment order. segments carries the originals when refinement passes
    need to resample.
    """

    layers: tuple[tuple[Point2, ...], ...]
    src: Point2
    dst: Point2
    segments: tuple[Segment, ...] | None = None


def sample_segment(seg: Segment, m: int) -> tuple[Point2, ...]:
    """m evenly spaced points on the segment, endpoints included."""
    if m < 1:
        raise EmptyLayerError(f"need at least one sample, got {m}")
    if m == 1:
        return (seg.a,)
    ts = np.linspace(0.0, 1.0, m)
    ax, ay = seg.a
    bx, by = seg.b
    return tuple(Point2(ax + (bx - ax) * t, ay + (by - ay) * t) for t in ts)


def discretize(segments: list[Segment], src: Point2, dst: Point2,
               m: int = 512) -> DiscretizedInstance:
    layers = tuple(sample_segment(s, m) for s in segments)
    return DiscretizedInstance(layers, src, dst, tuple(segments))


def _dp_over_layers(layers: list[np.ndarray], src: Point2, dst: Point2
                    ) -> tuple[float, list[int]]:
    """Forward DP; returns (length, chosen index per layer)."""
    sx, sy = src
    first = layers[0]
    cost = np.hypot(first[:, 0] - sx, first[:, 1] - sy)
    parents: list[np.ndarray] = []
    prev = first
    for cur in layers[1:]:
        dx = prev[:, 0][:, None] - cur[:, 0][None, :]
        dy = prev[:, 1][:, None] - cur[:, 1][None, :]
        tot = cost[:, None] + np.hypot(dx, dy)
        parent = np.argmin(tot, axis=0)
        cost = tot[parent, np.arange(cur.shape[0])]
        parents.append(parent)
        prev = cur
    dx, dy = dst
    final = cost + np.hypot(prev[:, 0] - dx, prev[:, 1] - dy)
    j = int(np.argmin(final))
    best = float(final[j])
    picks = [j]
    for parent in reversed(parents):
        j = int(parent[j])
        picks.append(j)
    picks.reverse()
    return best, picks


def dp_shortest(inst: DiscretizedInstance, refine_passes: int = 2,
                tol: Tolerances = DEFAULT_TOL) -> PolylinePath:
    """Near-shortest path visiting one point per layer, in order.

    refine_passes > 0 requires inst.segments; each pass re-samples every
    segment on a window around the incumbent point (two lattice steps wide,
    shrinking geometrically), which can only reduce the returned length.
    refine_passes=0 is the pure lattice optimum.
    """
    for k, layer in enumerate(inst.layers):
        if len(layer) == 0:
            raise EmptyLayerError(f"layer {k} has no samples")
    if not inst.layers:
        return polyline([inst.src, inst.dst], tol)

    layers = [np.asarray(layer, dtype=float) for layer in inst.layers]
    _, picks = _dp_over_layers(layers, inst.src, inst.dst)

    if refine_passes > 0:
        if inst.segments is None:
            raise OracleError("refinement needs the source segments")
        m = max(len(layer) for layer in inst.layers)
        m = max(m, 8)
        params = []
        for seg, layer, j in zip(inst.segments, inst.layers, picks):
            n = len(layer)
            params.append(j / (n - 1) if n > 1 else 0.0)
        widths = [2.0 / max(len(layer) - 1, 1) for layer in inst.layers]
        segs = inst.segments
        for _ in range(refine_passes):
            win_layers = []
            spans = []
            for seg, t0, w in zip(segs, params, widths):
                lo = max(0.0, t0 - w)
                hi = min(1.0, t0 + w)
                ts = np.linspace(lo, hi, m)
                ax, ay = seg.a
                bx, by = seg.b
                win_layers.append(np.column_stack((ax + (bx - ax) * ts,
                                                   ay + (by - ay) * ts)))
                spans.append((lo, hi))
            _, picks = _dp_over_layers(win_layers, inst.src, inst.dst)
            params = [lo + (hi - lo) * (j / (m - 1))
                      for (lo, hi), j in zip(spans, picks)]
            widths = [2.0 * (hi - lo) / (m - 1) for lo, hi in spans]
        pts = [Point2(seg.a.x + (seg.b.x - seg.a.x) * t,
                      seg.a.y + (seg.b.y - seg.a.y) * t)
               for seg, t in zip(segs, params)]
    else:
        pts = [Point2(*layers[k][picks[k]]) for k in range(len(layers))]

    return polyline([inst.src, *pts, inst.dst], tol)


def oracle_length(segments: list[Segment], src: Point2, dst: Point2,
                  m: int = 512, refine_passes: int = 2,
                  tol: Tolerances = DEFAULT_TOL) -> float:
    """One-call wrapper: discretize, solve, return the length."""
    return dp_shortest(discretize(segments, src, dst, m), refine_passes, tol).length
