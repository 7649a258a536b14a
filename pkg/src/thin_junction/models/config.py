"""Run configuration data model."""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from ..utils.formatting import write_json
from .graph import StarGraph
from .node_constants import NodeConstants
from .regime import AlphaRegime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """
    A parsed run configuration.

    Attributes:
        graph: Star graph with its node
        regime: Regime from the ``alpha`` block (zero if absent)
        source: File the configuration was read from
        sha256: Digest of the file bytes, recorded in run manifests
    """

    graph: StarGraph
    regime: AlphaRegime = field(default_factory=AlphaRegime.zero)
    source: Path | None = None
    sha256: str | None = None

    def with_regime(self, regime: AlphaRegime) -> "RunConfig":
        return replace(self, regime=regime)

    def with_constants(self, constants: NodeConstants) -> "RunConfig":
        """Configuration whose node tables are overridden by ``constants``."""
        merged = self.graph.node.constants.merged(constants)
        return replace(self, graph=self.graph.with_node(constants=merged))

    def to_dict(self) -> dict[str, Any]:
        data = self.graph.to_dict()
        data["alpha"] = self.regime.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        regime = AlphaRegime.from_dict(data["alpha"]) if "alpha" in data else AlphaRegime.zero()
        return cls(graph=StarGraph.from_dict(data), regime=regime)

    def save(self, config_file: Path) -> Path:
        """Save with 17-digit floats; the result loads back field-for-field."""
        path = write_json(config_file, self.to_dict())
        logger.info(f"Configuration saved to: {path}")
        return path


def serialize_config(graph: StarGraph, regime: AlphaRegime) -> dict[str, Any]:
    """Configuration document for a graph and regime."""
    return RunConfig(graph=graph, regime=regime).to_dict()


def file_digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
