"""Shared helpers for the test suite."""
from __future__ import annotations

import math

from hypothesis import HealthCheck, settings

from shootpath.bundles import BundleSequence
from shootpath.geometry import Point2, Segment
from shootpath.oracle import oracle_length

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def flat_segments(seq: BundleSequence) -> list[Segment]:
    """All fan segments of the interior bundles, in traversal order."""
    return [s for b in seq.interior for s in b.segments]


def sequence_oracle(seq: BundleSequence, m: int = 512,
                    refine_passes: int = 2) -> float:
    """Reference length for the path along the sequence's fan segments."""
    return oracle_length(flat_segments(seq), seq.p, seq.q,
                         m=m, refine_passes=refine_passes)


def pt(x: float, y: float) -> Point2:
    return Point2(float(x), float(y))


def close(a: float, b: float, rel: float = 1e-9, abs_: float = 1e-9) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)
