"""Growing self-organizing network for reconstructing curves and surfaces,
with brute-force witness/Delaunay oracles and topological verification."""

from .core import (
    RunReport,
    SoamParams,
    SoamState,
    StepEvents,
    TelemetryFrame,
    Unit,
    UnitState,
    adapt_firing,
    adapt_threshold,
    init,
    process_signal,
    run,
    update_state,
)
from .geometry import (
    BoundingBox,
    PointIndex,
    bounding_box,
    distance,
    nearest_two,
    rescale_to_major,
)
from .simplicial import LinkClass, LinkGraph, SimplicialComplex, classify_link

__all__ = [
    "BoundingBox",
    "LinkClass",
    "LinkGraph",
    "PointIndex",
    "RunReport",
    "SimplicialComplex",
    "SoamParams",
    "SoamState",
    "StepEvents",
    "TelemetryFrame",
    "Unit",
    "UnitState",
    "adapt_firing",
    "adapt_threshold",
    "bounding_box",
    "classify_link",
    "distance",
    "init",
    "nearest_two",
    "process_signal",
    "rescale_to_major",
    "run",
    "update_state",
]

__version__ = "0.1.0"
