"""Sources of junction constants for the expansion recursion."""

import logging
from abc import ABC, abstractmethod
from collections import defaultdict

from ..models.graph import StarGraph
from ..models.node_constants import (
    InnerConstants,
    InnerRequest,
    NodeConstants,
    format_edge_key,
)
from ..models.regime import AlphaRegime, ExponentKey
from ..utils.exceptions import MissingConstantsError

logger = logging.getLogger(__name__)


class ConstantsProvider(ABC):
    """Supplies delta, node mass integrals and tail integrals per exponent."""

    @abstractmethod
    def inner_constants(self, key: ExponentKey, request: InnerRequest) -> InnerConstants:
        """
        Constants of the inner problem at one exponent.

        Raises:
            MissingConstantsError: If the constants are not available
        """

    @property
    def name(self) -> str:
        return type(self).__name__


class TableConstantsProvider(ConstantsProvider):
    """
    Constants read from the node tables of the configuration.

    Table keys (k, p) are mapped to the exponent keys of the regime. Under a
    rational alpha several (k, p) share one exponent; their entries add up.
    """

    def __init__(self, constants: NodeConstants, regime: AlphaRegime, mass_integral: float):
        self._regime = regime
        self._needs_mass = mass_integral > 0.0
        self._delta: dict[ExponentKey, dict[int, float]] = defaultdict(dict)
        self._mass: dict[ExponentKey, float] = {}
        self._tails: dict[ExponentKey, dict[int, float]] = defaultdict(dict)

        for (k, p, i), value in constants.delta.items():
            if i == 1:
                logger.debug(f"Ignoring delta on edge 1 at {format_edge_key((k, p, i))}")
                continue
            key = regime.key(k, p)
            self._delta[key][i] = self._delta[key].get(i, 0.0) + value
        for (k, p), value in constants.mass.items():
            key = regime.key(k, p)
            self._mass[key] = self._mass.get(key, 0.0) + value
        for (k, p, i), value in constants.tails.items():
            key = regime.key(k, p)
            self._tails[key][i] = self._tails[key].get(i, 0.0) + value

    @classmethod
    def from_graph(cls, graph: StarGraph, regime: AlphaRegime) -> "TableConstantsProvider":
        return cls(graph.node.constants, regime, graph.mass)

    def inner_constants(self, key: ExponentKey, request: InnerRequest) -> InnerConstants:
        k, p = request.provenance
        deltas = self._delta.get(key, {})
        for i in (2, 3):
            if i not in deltas:
                raise MissingConstantsError(
                    f"No delta for exponent {request.label} on edge {i}",
                    order=request.label,
                    key=f"delta_table{format_edge_key((k, p, i))}",
                )

        # a missing mass entry only fails once a flux datum consumes it
        mass = self._mass.get(key, None if self._needs_mass else 0.0)

        tails = self._tails.get(key, {})
        return InnerConstants(
            delta=(deltas[2], deltas[3]),
            mass_remainder=mass,
            tails=tuple(tails.get(i) for i in (1, 2, 3)),
            source="config",
        )


class JunctionConstantsProvider(ConstantsProvider):
    """
    Constants computed on the model junction, table entries first.

    Only exponents below 2 are computable: their inner problems are driven
    by the linear outlet growth and the node source alone.
    """

    MAX_EXPONENT = 2.0

    def __init__(
        self,
        graph: StarGraph,
        regime: AlphaRegime,
        junction_service,
        tables: TableConstantsProvider | None = None,
    ):
        self._graph = graph
        self._regime = regime
        self._service = junction_service
        self._tables = tables
        self.requests: list[InnerRequest] = []

    def inner_constants(self, key: ExponentKey, request: InnerRequest) -> InnerConstants:
        if self._tables is not None:
            try:
                tabled = self._tables.inner_constants(key, request)
            except MissingConstantsError:
                pass
            else:
                if tabled.mass_remainder is not None:
                    return tabled

        if self._regime.exponent(key) >= self.MAX_EXPONENT - 1e-12:
            k, p = request.provenance
            raise MissingConstantsError(
                f"Junction constants at exponent {request.label} are not computable",
                order=request.label,
                key=f"delta_table{format_edge_key((k, p, 2))}",
            )

        logger.info(f"Computing junction constants for exponent {request.label}")
        self.requests.append(request)
        return self._service.inner_constants(self._graph, request)
