"""Shared graphs and configuration files for the test suite."""

import json
import math

import pytest

from thin_junction.models.graph import JunctionSettings, NodeSpec, StarGraph
from thin_junction.models.node_constants import NodeConstants

# outlet side 8 cells at spacing 0.05: area exactly pi*h^2
JUNCTION_RADIUS = 0.4 / math.sqrt(math.pi)


def make_graph(
    lengths=(1.0, 1.0, 1.0),
    radii=(0.1, 0.1, 0.1),
    ell0=0.1,
    mass=0.02,
    node_volume=0.01,
    constants: NodeConstants | None = None,
    junction: JunctionSettings | None = None,
) -> StarGraph:
    node = NodeSpec(
        ell0=ell0,
        mass_integral=mass,
        node_volume=node_volume,
        constants=constants or NodeConstants(),
        junction=junction,
    )
    return StarGraph.constant(lengths, radii, node)


def config_document(lengths=(1.0, 1.0, 1.0), radii=(0.1, 0.1, 0.1), regime="zero", **node) -> dict:
    return {
        "edges": [
            {"length": length, "radius": {"const": h}} for length, h in zip(lengths, radii, strict=True)
        ],
        "node": {"ell0": 0.1, "mass_integral": 0.02, "node_volume": 0.01, **node},
        "alpha": {"regime": regime},
    }


@pytest.fixture
def symmetric_graph() -> StarGraph:
    """Three equal edges: Lambda_1 = pi^2/4, then a double pole mode at pi^2."""
    return make_graph()


@pytest.fixture
def asymmetric_graph() -> StarGraph:
    """Edges of different lengths and radii with a simple spectrum."""
    return make_graph(lengths=(1.0, 1.4, 1.9), radii=(0.1, 0.12, 0.08))


@pytest.fixture
def write_config(tmp_path):
    """Write a configuration document into tmp_path and return its path."""

    def _write(document: dict, name: str = "config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write
