"""JSON map, instance, and scenario files, plus CSV report writers.

Maps are UTF-8 JSON: {"obstacles": [[[x, y], ...], ...]} with polygons in
counterclockwise order (clockwise input is flipped on load), plus an
optional "bounds": [xmin, ymin, xmax, ymax]. Instances carry a bundle
sequence: {"p": [x, y], "q": [x, y], "bundles": [{"vertex": [x, y],
"segments": [[x, y], ...]}]} where segment entries are far endpoints in
crossing order. Scenario files name a map and the exploration parameters.

CSV output is deterministic for a fixed input; the wall-time column is the
last one so golden comparisons can strip it.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import IO, Any

from .bundles import BundleSequence, bundle_sequence, fan
from .geometry import DEFAULT_TOL, Point2, Segment, Tolerances, segment_intersection
from .robot import PlanTrace, WorldMap, plan
from .shooting import MmsReport, SolveLimits


class ParseError(Exception):
    """Malformed input file; carries location when one is known."""

    def __init__(self, msg: str, *, line: int | None = None,
                 col: int | None = None, fieldname: str | None = None) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if col is not None:
            where.append(f"col {col}")
        if fieldname is not None:
            where.append(f"field {fieldname!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(msg + suffix)
        self.line = line
        self.col = col
        self.fieldname = fieldname


class NonSimplePolygonError(ParseError):
    """Obstacle polygon self-intersects or degenerates."""

    def __init__(self, msg: str, index: int) -> None:
        super().__init__(msg, fieldname=f"obstacles[{index}]")
        self.index = index


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e.msg}", line=e.lineno, col=e.colno) from e
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror or e}") from e


def _num(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError("expected a number", fieldname=where)
    f = float(v)
    if not math.isfinite(f):
        raise ParseError("number must be finite", fieldname=where)
    return f


def _point(v: Any, where: str) -> Point2:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ParseError("expected an [x, y] pair", fieldname=where)
    return Point2(_num(v[0], where + "[0]"), _num(v[1], where + "[1]"))


def _check_simple(ring: list[Point2], index: int,
                  tol: Tolerances = DEFAULT_TOL) -> None:
    n = len(ring)
    if n < 3:
        raise NonSimplePolygonError("polygon needs at least 3 vertices", index)
    scale = max(1.0, max(abs(p.x) + abs(p.y) for p in ring))
    edges = [Segment(ring[i], ring[(i + 1) % n]) for i in range(n)]
    for i, e in enumerate(edges):
        if math.hypot(e.b.x - e.a.x, e.b.y - e.a.y) <= tol.eps_geom * scale:
            raise NonSimplePolygonError(f"repeated vertex at position {i}", index)
    for i in range(n):
        for j in range(i + 1, n):
            hit = segment_intersection(edges[i], edges[j], tol)
            if hit is None:
                continue
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent and isinstance(hit, Point2):
                continue  # shared endpoint
            raise NonSimplePolygonError(
                f"edges {i} and {j} intersect", index)
    area = sum(e.a.x * e.b.y - e.b.x * e.a.y for e in edges) / 2.0
    if abs(area) <= tol.eps_geom * scale * scale:
        raise NonSimplePolygonError("polygon has zero area", index)


def parse_map(data: Any, name: str = "<map>",
              tol: Tolerances = DEFAULT_TOL) -> WorldMap:
    if not isinstance(data, dict):
        raise ParseError(f"{name}: top level must be an object")
    if "obstacles" not in data:
        raise ParseError(f"{name}: missing key", fieldname="obstacles")
    raw = data["obstacles"]
    if not isinstance(raw, list):
        raise ParseError(f"{name}: expected an array", fieldname="obstacles")
    rings = []
    for i, poly in enumerate(raw):
        if not isinstance(poly, list):
            raise ParseError(f"{name}: expected an array of points",
                             fieldname=f"obstacles[{i}]")
        ring = [_point(v, f"obstacles[{i}][{j}]") for j, v in enumerate(poly)]
        _check_simple(ring, i, tol)
        rings.append(tuple(ring))
    bounds = None
    if "bounds" in data:
        b = data["bounds"]
        if not isinstance(b, list) or len(b) != 4:
            raise ParseError(f"{name}: bounds must be [xmin, ymin, xmax, ymax]",
                             fieldname="bounds")
        bounds = tuple(_num(v, f"bounds[{k}]") for k, v in enumerate(b))
        if bounds[0] >= bounds[2] or bounds[1] >= bounds[3]:
            raise ParseError(f"{name}: bounds must span a positive area",
                             fieldname="bounds")
    return WorldMap(obstacles=tuple(rings), bounds=bounds)


def load_map(path: str, tol: Tolerances = DEFAULT_TOL) -> WorldMap:
    """Read a map file; polygons are validated and normalized to CCW."""
    return parse_map(_load_json(path), path, tol)


def parse_instance(data: Any, name: str = "<instance>",
                   tol: Tolerances = DEFAULT_TOL) -> BundleSequence:
    if not isinstance(data, dict):
        raise ParseError(f"{name}: top level must be an object")
    for key in ("p", "q", "bundles"):
        if key not in data:
            raise ParseError(f"{name}: missing key", fieldname=key)
    p = _point(data["p"], "p")
    q = _point(data["q"], "q")
    raw = data["bundles"]
    if not isinstance(raw, list):
        raise ParseError(f"{name}: expected an array", fieldname="bundles")
    interior = []
    for i, b in enumerate(raw):
        where = f"bundles[{i}]"
        if not isinstance(b, dict) or "vertex" not in b or "segments" not in b:
            raise ParseError(f"{name}: bundle needs vertex and segments",
                             fieldname=where)
        v = _point(b["vertex"], where + ".vertex")
        segs = b["segments"]
        if not isinstance(segs, list):
            raise ParseError(f"{name}: expected an array",
                             fieldname=where + ".segments")
        ends = [_point(e, f"{where}.segments[{j}]") for j, e in enumerate(segs)]
        sector = _num(b.get("sector_angle", math.pi), where + ".sector_angle")
        interior.append(fan(v, ends, sector))
    return bundle_sequence(p, interior, q, tol)


def load_instance(path: str, tol: Tolerances = DEFAULT_TOL) -> BundleSequence:
    """Read a bundle-sequence instance file."""
    return parse_instance(_load_json(path), path, tol)


def dump_instance(seq: BundleSequence, path: str) -> None:
    """Write a bundle sequence back out in the instance format."""
    data = {
        "p": [seq.p.x, seq.p.y],
        "q": [seq.q.x, seq.q.y],
        "bundles": [
            {"vertex": [b.vertex.x, b.vertex.y],
             "segments": [[s.b.x, s.b.y] for s in b.segments],
             **({"sector_angle": b.sector_angle}
                if b.sector_angle != math.pi else {})}
            for b in seq.interior
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


_SOLVERS = {"mms": "mms", "rubber_band": "rubber_band",
            "graph": "graph", "graph_only": "graph"}


@dataclass(frozen=True)
class Scenario:
    """One exploration run: a map plus the parameters driving it."""

    map_path: str
    start: Point2
    goal: Point2
    r: float
    alpha: float = 1.0
    beta: float = 1.0
    k_rule: int | None = None  # None: floor(N/5) rule; int: fixed K
    solver: str = "mms"
    limits: SolveLimits = field(default_factory=SolveLimits)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ParseError("radius must be positive", fieldname="radius")
        if self.start == self.goal:
            raise ParseError("start and goal coincide", fieldname="goal")
        if self.solver not in ("mms", "rubber_band", "graph"):
            raise ParseError(f"unknown solver {self.solver!r}",
                             fieldname="solver")


def parse_scenario(data: Any, name: str = "<scenario>",
                   base_dir: str = ".") -> Scenario:
    if not isinstance(data, dict):
        raise ParseError(f"{name}: top level must be an object")
    for key in ("map", "start", "goal", "radius"):
        if key not in data:
            raise ParseError(f"{name}: missing key", fieldname=key)
    if not isinstance(data["map"], str):
        raise ParseError(f"{name}: map must be a path string", fieldname="map")
    map_path = os.path.normpath(os.path.join(base_dir, data["map"]))
    solver = data.get("solver", "mms")
    if solver not in _SOLVERS:
        raise ParseError(f"{name}: unknown solver {solver!r}", fieldname="solver")
    k_rule: int | None = None
    if "k_rule" in data:
        kr = data["k_rule"]
        if kr == "floor_n_over_5":
            k_rule = None
        elif isinstance(kr, dict) and isinstance(kr.get("fixed"), int) \
                and not isinstance(kr.get("fixed"), bool) and kr["fixed"] >= 1:
            k_rule = kr["fixed"]
        else:
            raise ParseError(
                f"{name}: k_rule must be \"floor_n_over_5\" or "
                "{\"fixed\": k >= 1}", fieldname="k_rule")
    lim = SolveLimits()
    if "limits" in data:
        lo = data["limits"]
        if not isinstance(lo, dict):
            raise ParseError(f"{name}: limits must be an object",
                             fieldname="limits")
        unknown = set(lo) - {"max_iter", "tol_len", "tol_angle"}
        if unknown:
            raise ParseError(
                f"{name}: unknown limit key {sorted(unknown)[0]!r}",
                fieldname="limits")
        try:
            lim = SolveLimits(
                max_iter=int(lo.get("max_iter", lim.max_iter)),
                tol_len=_num(lo.get("tol_len", lim.tol_len), "limits.tol_len"),
                tol_angle=_num(lo.get("tol_angle", lim.tol_angle),
                               "limits.tol_angle"))
        except ValueError as e:
            raise ParseError(f"{name}: {e}", fieldname="limits") from e
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ParseError(f"{name}: seed must be an integer", fieldname="seed")
    return Scenario(map_path=map_path,
                    start=_point(data["start"], "start"),
                    goal=_point(data["goal"], "goal"),
                    r=_num(data["radius"], "radius"),
                    alpha=_num(data.get("alpha", 1.0), "alpha"),
                    beta=_num(data.get("beta", 1.0), "beta"),
                    k_rule=k_rule, solver=_SOLVERS[solver],
                    limits=lim, seed=seed)


def load_scenario(path: str) -> Scenario:
    """Read a scenario file; the map path resolves relative to it."""
    return parse_scenario(_load_json(path), path, os.path.dirname(path) or ".")


def run_scenario(sc: Scenario, tol: Tolerances = DEFAULT_TOL) -> PlanTrace:
    """Load the scenario's map and run the exploration plan."""
    world = load_map(sc.map_path, tol)
    return plan(world, sc.start, sc.goal, sc.r, alpha=sc.alpha, beta=sc.beta,
                solver=sc.solver, limits=sc.limits, fixed_k=sc.k_rule, tol=tol)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


PLAN_CSV_HEADER = ("event,solver,n_bundles,k,tau_len,solver_len,"
                   "reduction_pct,iterations,converged_by,wall_time_s")


def plan_csv_rows(trace: PlanTrace) -> list[str]:
    """Per-event rows plus a totals row. Wall time is the last column."""
    rows = [PLAN_CSV_HEADER]
    tot_tau = tot_len = tot_time = 0.0
    tot_iter = 0
    for ev in trace.events:
        tau = ev.tau_length
        ln = ev.walked.length
        red = 100.0 * (tau - ln) / tau if tau > 0 else 0.0
        iters = ev.report.iterations if ev.report else 0
        conv = ev.report.converged_by.value if ev.report else ""
        rows.append(",".join([
            str(ev.index), ev.solver, str(len(ev.sequence.interior)),
            str(ev.k), _fmt(tau), _fmt(ln), _fmt(red), str(iters), conv,
            _fmt(ev.wall_time)]))
        tot_tau += tau
        tot_len += ln
        tot_iter += iters
        tot_time += ev.wall_time
    red = 100.0 * (tot_tau - tot_len) / tot_tau if tot_tau > 0 else 0.0
    rows.append(",".join([
        "total", "", "", "", _fmt(tot_tau), _fmt(tot_len), _fmt(red),
        str(tot_iter), "", _fmt(tot_time)]))
    return rows


def write_plan_csv(trace: PlanTrace, out: str | IO[str]) -> None:
    text = "\n".join(plan_csv_rows(trace)) + "\n"
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def solve_csv_rows(report: MmsReport) -> list[str]:
    rows = ["iteration,length"]
    for i, ln in enumerate(report.per_iteration_lengths):
        rows.append(f"{i},{_fmt(ln)}")
    return rows


def write_solve_csv(report: MmsReport, out: str | IO[str]) -> None:
    text = "\n".join(solve_csv_rows(report)) + "\n"
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
