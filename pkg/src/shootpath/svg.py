"""Minimal SVG 1.1 rendering of maps, traces, and solved instances.

Renders are pure functions of their inputs: coordinates are written with
four decimals, layers come out in a fixed order, and nothing depends on
dict iteration or clock time, so outputs are golden-file comparable.
World y grows upward; the renderer flips it into SVG screen space.
"""
from __future__ import annotations

from .bundles import BundleSequence
from .geometry import Point2, PolylinePath
from .robot import PlanTrace, WorldMap

_OBSTACLE_FILL = "#c9ccd4"
_OBSTACLE_STROKE = "#5b616e"
_TAU_COLOR = "#9097a3"
_WALK_COLOR = "#1f6fd0"
_PATH_COLORS = ("#d0361f", "#1f8d46", "#8042c8", "#c8851e", "#1f8d8d")
_POINT_COLOR = "#30343c"


def _f(x: float) -> str:
    s = f"{x:.4f}"
    return "0.0000" if s == "-0.0000" else s


class _Canvas:
    """Collects layered elements in world coordinates, then scales once."""

    def __init__(self) -> None:
        self._layers: list[tuple[str, list[str]]] = []
        self._pts: list[Point2] = []

    def layer(self, name: str) -> None:
        self._layers.append((name, []))

    def _emit(self, element: str) -> None:
        self._layers[-1][1].append(element)

    def _track(self, pts) -> None:
        self._pts.extend(pts)

    def polygon(self, pts, fill: str, stroke: str, width: float) -> None:
        self._track(pts)
        coords = " ".join(f"{_f(p.x)},{_f(p.y)}" for p in pts)
        self._emit(f'<polygon points="{coords}" fill="{fill}" '
                   f'stroke="{stroke}" stroke-width="{_f(width)}"/>')

    def polyline(self, pts, stroke: str, width: float,
                 dash: str | None = None) -> None:
        if len(pts) < 2:
            return
        self._track(pts)
        coords = " ".join(f"{_f(p.x)},{_f(p.y)}" for p in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self._emit(f'<polyline points="{coords}" fill="none" '
                   f'stroke="{stroke}" stroke-width="{_f(width)}"'
                   f'{extra} stroke-linejoin="round" stroke-linecap="round"/>')

    def dot(self, p: Point2, r: float, fill: str) -> None:
        self._track([p])
        self._emit(f'<circle cx="{_f(p.x)}" cy="{_f(p.y)}" r="{_f(r)}" '
                   f'fill="{fill}"/>')

    def to_string(self, width: int = 640) -> str:
        if not self._pts:
            self._pts = [Point2(0.0, 0.0), Point2(1.0, 1.0)]
        xmin = min(p.x for p in self._pts)
        xmax = max(p.x for p in self._pts)
        ymin = min(p.y for p in self._pts)
        ymax = max(p.y for p in self._pts)
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        pad = 0.05 * span
        xmin, xmax = xmin - pad, xmax + pad
        ymin, ymax = ymin - pad, ymax + pad
        height = round(width * (ymax - ymin) / (xmax - xmin))
        body = []
        for name, elems in self._layers:
            if not elems:
                continue
            body.append(f'<g id="{name}">')
            body.extend("  " + e for e in elems)
            body.append("</g>")
        inner = "\n    ".join(body)
        # flip y: world up becomes screen up
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{height}" '
            f'viewBox="{_f(xmin)} {_f(-ymax)} {_f(xmax - xmin)} '
            f'{_f(ymax - ymin)}">\n'
            f'  <g transform="scale(1,-1)">\n    {inner}\n  </g>\n'
            '</svg>\n')


def _stroke(world_span: float) -> float:
    return max(world_span / 640.0, 1e-6)


def _world_span(world: WorldMap | None, extra_pts) -> float:
    pts = list(extra_pts)
    if world is not None:
        for ring in world.obstacles:
            pts.extend(ring)
    if not pts:
        return 1.0
    return max(max(p.x for p in pts) - min(p.x for p in pts),
               max(p.y for p in pts) - min(p.y for p in pts), 1.0)


def _draw_world(cv: _Canvas, world: WorldMap, w: float) -> None:
    cv.layer("obstacles")
    for ring in world.obstacles:
        cv.polygon(ring, _OBSTACLE_FILL, _OBSTACLE_STROKE, w)


def render_world(world: WorldMap, width: int = 640) -> str:
    """Just the obstacles."""
    cv = _Canvas()
    _draw_world(cv, world, _stroke(_world_span(world, [])))
    return cv.to_string(width)


def render_trace(world: WorldMap, trace: PlanTrace, width: int = 640) -> str:
    """Obstacles, graph return trajectories (dashed), and the walked path."""
    cv = _Canvas()
    span = _world_span(world, trace.path.vertices)
    w = _stroke(span)
    _draw_world(cv, world, w)
    cv.layer("returns")
    for ev in trace.events:
        cv.polyline(ev.tau_hat.vertices, _TAU_COLOR, 1.2 * w, dash=f"{_f(4*w)} {_f(3*w)}")
    cv.layer("walk")
    cv.polyline(trace.path.vertices, _WALK_COLOR, 1.8 * w)
    cv.layer("centers")
    for c in trace.centers:
        cv.dot(c, 2.2 * w, _POINT_COLOR)
    if trace.path.vertices:
        cv.layer("endpoints")
        cv.dot(trace.path.vertices[0], 3.5 * w, _WALK_COLOR)
        cv.dot(trace.path.vertices[-1], 3.5 * w, _PATH_COLORS[1])
    return cv.to_string(width)


def render_instance(seq: BundleSequence,
                    paths: dict[str, PolylinePath] | None = None,
                    width: int = 640) -> str:
    """Bundles with their trajectory, plus any solution paths on top."""
    cv = _Canvas()
    pts = list(seq.tau.vertices)
    for b in seq.interior:
        for s in b.segments:
            pts.extend(s)
    for p in (paths or {}).values():
        pts.extend(p.vertices)
    w = _stroke(_world_span(None, pts))
    cv.layer("tau")
    cv.polyline(seq.tau.vertices, _TAU_COLOR, w, dash=f"{_f(4*w)} {_f(3*w)}")
    cv.layer("bundles")
    for b in seq.interior:
        for s in b.segments:
            cv.polyline([s.a, s.b], _POINT_COLOR, w)
        cv.dot(b.vertex, 2.0 * w, _POINT_COLOR)
    cv.layer("path")
    for i, (name, p) in enumerate(sorted((paths or {}).items())):
        color = _PATH_COLORS[i % len(_PATH_COLORS)]
        cv.polyline(p.vertices, color, 1.8 * w)
    cv.layer("endpoints")
    cv.dot(seq.p, 3.0 * w, _WALK_COLOR)
    cv.dot(seq.q, 3.0 * w, _PATH_COLORS[1])
    return cv.to_string(width)
