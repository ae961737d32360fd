"""Shortest paths through sequences of segment bundles, and a scan-and-go
exploration planner that uses them for return trips."""

from .geometry import (
    DEFAULT_TOL,
    Point2,
    PolylinePath,
    Segment,
    Tolerances,
    polyline,
)
from .bundles import (
    Bundle,
    BundleSequence,
    CuttingSegment,
    bundle_sequence,
    fan,
    insert_fake_segments,
    partition,
)
from .funnel import shortest_path_corridor, taut_path, triangulate_subsequence
from .io_formats import (
    NonSimplePolygonError,
    ParseError,
    Scenario,
    dump_instance,
    load_instance,
    load_map,
    load_scenario,
    run_scenario,
    write_plan_csv,
)
from .shooting import (
    ConvergedBy,
    MmsReport,
    ShootingState,
    SolveLimits,
    collinear_update,
    initial_state,
    solve,
)
from .oracle import DiscretizedInstance, discretize, dp_shortest, oracle_length
from .rubber_band import rubber_band_solve, trim_bundles
from .robot import ExplorationGraph, PlanTrace, WorldMap, compute_sights, plan
from .svg import render_instance, render_trace, render_world

__all__ = [
    "DEFAULT_TOL",
    "Point2",
    "PolylinePath",
    "Segment",
    "Tolerances",
    "polyline",
    "Bundle",
    "BundleSequence",
    "CuttingSegment",
    "bundle_sequence",
    "fan",
    "insert_fake_segments",
    "partition",
    "shortest_path_corridor",
    "taut_path",
    "triangulate_subsequence",
    "NonSimplePolygonError",
    "ParseError",
    "Scenario",
    "dump_instance",
    "load_instance",
    "load_map",
    "load_scenario",
    "run_scenario",
    "write_plan_csv",
    "render_instance",
    "render_trace",
    "render_world",
    "ConvergedBy",
    "MmsReport",
    "ShootingState",
    "SolveLimits",
    "collinear_update",
    "initial_state",
    "solve",
    "DiscretizedInstance",
    "discretize",
    "dp_shortest",
    "oracle_length",
    "rubber_band_solve",
    "trim_bundles",
    "ExplorationGraph",
    "PlanTrace",
    "WorldMap",
    "compute_sights",
    "plan",
]

__version__ = "0.1.0"
