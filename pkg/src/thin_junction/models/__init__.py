"""Data models for the thin-junction toolkit."""

from .config import RunConfig, serialize_config
from .edge_function import (
    AnalyticEdgeFunction,
    EdgeFunction,
    GridEdgeFunction,
    energy_product,
    mass_product,
    vertex_trace,
)
from .eigenpair import EigenPair
from .graph import (
    ConstantRadius,
    DensityProfile,
    EdgeSpec,
    JunctionSettings,
    NodeSpec,
    SampledRadius,
    StarGraph,
)
from .manifest import RunManifest
from .node_constants import InnerConstants, InnerRequest, NodeConstants
from .regime import AlphaRegime, RegimeKind

__all__ = [
    "AlphaRegime",
    "AnalyticEdgeFunction",
    "ConstantRadius",
    "DensityProfile",
    "EdgeFunction",
    "EdgeSpec",
    "EigenPair",
    "GridEdgeFunction",
    "InnerConstants",
    "InnerRequest",
    "JunctionSettings",
    "NodeConstants",
    "NodeSpec",
    "RegimeKind",
    "RunConfig",
    "RunManifest",
    "SampledRadius",
    "StarGraph",
    "energy_product",
    "mass_product",
    "serialize_config",
    "vertex_trace",
]
