"""Limit eigenpairs."""

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..utils.exceptions import SolverError
from .edge_function import EdgeTriple, energy_product
from .graph import StarGraph
from .regime import AlphaRegime


@dataclass(frozen=True, eq=False)
class EigenPair:
    """
    Limit eigenvalue with its energy-normalized eigenfunction triple.

    Attributes:
        eigenvalue: Lambda_n
        index: n, counted from 1 with multiplicity
        triple: Edge functions W^(1), W^(2), W^(3)
        regime: Regime whose limit problem produced the pair
        degenerate: Multiple or nearly multiple eigenvalue
        multiplicity: Number of independent eigenfunctions at this eigenvalue
        pole_type: Eigenfunction vanishes at the vertex
    """

    eigenvalue: float
    index: int
    triple: EdgeTriple
    regime: AlphaRegime
    degenerate: bool = False
    multiplicity: int = 1
    pole_type: bool = False

    @property
    def omega(self) -> float:
        return float(np.sqrt(self.eigenvalue))

    @property
    def vertex_value(self) -> float:
        """W^(1)(0); equal on all edges by continuity."""
        return self.triple[0].vertex_trace()[0]

    @property
    def vertex_values(self) -> tuple[float, float, float]:
        return tuple(f.vertex_trace()[0] for f in self.triple)

    @property
    def vertex_derivatives(self) -> tuple[float, float, float]:
        return tuple(f.vertex_trace()[1] for f in self.triple)

    def residuals(self, graph: StarGraph) -> dict[str, float]:
        """
        Residuals of the eigenpair invariants.

        - normalization: energy norm minus one
        - sign: negative part of the first nonzero end derivative
        - continuity: spread of the vertex values
        - kirchhoff: flux balance including the vertex mass term
        - dirichlet: largest end value
        """
        beta = graph.vertex_mass_coefficient(self.regime.has_vertex_mass)
        end_slopes = [f.end_derivative() for f in self.triple]
        leading = next((s for s in end_slopes if abs(s) > 1e-12), 0.0)
        values = np.array(self.vertex_values)
        flux = float(np.dot(graph.vertex_weights, self.vertex_derivatives))

        return {
            "normalization": abs(energy_product(graph.edges, self.triple, self.triple) - 1.0),
            "sign": max(0.0, -leading),
            "continuity": float(np.ptp(values)),
            "kirchhoff": abs(flux + beta * self.eigenvalue * values[0]),
            "dirichlet": max(abs(f.end_value()) for f in self.triple),
        }

    def check(self, graph: StarGraph, tolerance: float = 1e-8) -> None:
        """
        Raise if any invariant residual exceeds the tolerance.

        Raises:
            SolverError: Naming the violated invariant
        """
        violated = {
            name: value for name, value in self.residuals(graph).items() if value > tolerance
        }
        if violated:
            raise SolverError(
                f"Eigenpair {self.index} violates invariants: {violated}",
                solver="limit_spectrum",
                operation="eigenpair invariants",
                details={"residuals": violated},
            )

    def to_dict(self) -> dict[str, Any]:
        derivatives = self.vertex_derivatives
        return {
            "n": self.index,
            "lambda": self.eigenvalue,
            "vertex_value": self.vertex_value,
            "vertex_derivative": list(derivatives),
            "degenerate": self.degenerate,
            "multiplicity": self.multiplicity,
            "pole_type": self.pole_type,
        }
