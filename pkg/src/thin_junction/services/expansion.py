"""
Asymptotic expansion of eigenvalues in the thin parameter.

The series runs over the exponents k - p*alpha of the regime. Every
coefficient (mu_e, w_e) solves one corrector problem whose data are
collected from the coefficients of lower exponents:

- the forcing sum of mu_s h^2 w_r over s + r = e,
- the vertex jumps delta_e of the inner junction problem,
- the flux datum matching the regular expansion over the node, the outlet
  tails of the inner solutions and the node mass.

Coefficients with negative exponents are zero; the recursion reads all
coefficient maps with a default of zero.
"""

import logging
import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..models.edge_function import AnalyticEdgeFunction, EdgeFunction, GridEdgeFunction
from ..models.eigenpair import EigenPair
from ..models.graph import StarGraph
from ..models.node_constants import InnerConstants, InnerRequest, format_mass_key
from ..models.regime import AlphaRegime, ExponentKey, RegimeKind
from ..utils.exceptions import (
    DegeneracyError,
    MissingConstantsError,
    SolverError,
    ValidationError,
)
from ..utils.formatting import write_json
from .base import BaseService
from .constants_provider import ConstantsProvider, TableConstantsProvider
from .corrector import CorrectorProblem, solve_corrector, zero_like
from .limit_spectrum import solve_limit_spectrum

logger = logging.getLogger(__name__)

VANISHING_TOLERANCE = 1e-12
EXPONENT_TOLERANCE = 1e-12
MAX_SAMPLED_ORDER = 2

SERIES_COLUMNS = ("exponent", "label", "k", "p", "mu")


@dataclass(frozen=True)
class LatticeEntry:
    key: ExponentKey
    exponent: float
    provenance: tuple[int, int]
    label: str

    def to_dict(self) -> dict[str, Any]:
        k, p = self.provenance
        return {"e": self.exponent, "k": k, "p": p, "label": self.label}


@dataclass(frozen=True)
class ExponentLattice:
    """
    Exponents of the partial sum of order M, in increasing order.

    Attributes:
        regime: Regime generating the exponents
        order: M, the largest exponent
        entries: Lattice entries with their smallest generating (k, p)
    """

    regime: AlphaRegime
    order: int
    entries: tuple[LatticeEntry, ...]

    def __iter__(self) -> Iterator[LatticeEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: ExponentKey) -> bool:
        return any(entry.key == key for entry in self.entries)

    @property
    def exponents(self) -> list[float]:
        return [entry.exponent for entry in self.entries]

    def entry(self, key: ExponentKey) -> LatticeEntry:
        for entry in self.entries:
            if entry.key == key:
                return entry
        raise KeyError(key)


def build_lattice(regime: AlphaRegime, order: int) -> ExponentLattice:
    """
    Exponents k - p*alpha with 0 <= k <= M and 0 <= k - p*alpha <= M.

    Rational alpha = m0/n0 collapses the scale to the multiples of 1/n0;
    alpha = 0 and alpha = 1 give the integers 0..M.

    Raises:
        ValidationError: If the order is negative
    """
    if order < 0:
        raise ValidationError(f"Order must be nonnegative, got {order}", field="order", value=order)

    found: dict[ExponentKey, tuple[int, int]] = {}
    if regime.kind == RegimeKind.IRRATIONAL:
        for k in range(order + 1):
            p = 0
            while k - p * regime.alpha >= 0.0:
                found[(k, p)] = (k, p)
                p += 1
    elif regime.kind == RegimeKind.RATIONAL:
        limit = order * regime.n0
        # provenance of the largest q may need k up to M + m0
        for k in range(order + regime.m0 + 1):
            for p in range(k * regime.n0 // regime.m0 + 1):
                key = regime.key(k, p)
                if 0 <= key[0] <= limit and key not in found:
                    found[key] = (k, p)
    else:
        for k in range(order + 1):
            found[regime.key(k, 0)] = (k, 0)

    entries = sorted(
        (
            LatticeEntry(key, regime.exponent(key), provenance, regime.label(key))
            for key, provenance in found.items()
        ),
        key=lambda entry: entry.exponent,
    )
    return ExponentLattice(regime=regime, order=order, entries=tuple(entries))


@dataclass
class AsymptoticSeries:
    """
    Coefficients of the expansion of one eigenvalue and its eigenfunction.

    Attributes:
        graph: Star graph of the limit problem
        lattice: Exponent lattice of the requested order
        pair: Limit eigenpair (coefficient at exponent 0)
        mu: Eigenvalue coefficients by exponent key
        correctors: Eigenfunction coefficients by exponent key
        inner: Junction constants used at each exponent
        diagnostics: Corrector residuals by exponent key
        flags: Run flags (truncation, neglected tails, vanishing rule)
    """

    graph: StarGraph
    lattice: ExponentLattice
    pair: EigenPair
    mu: dict[ExponentKey, float] = field(default_factory=dict)
    correctors: dict[ExponentKey, tuple[EdgeFunction, ...]] = field(default_factory=dict)
    inner: dict[ExponentKey, InnerConstants] = field(default_factory=dict)
    diagnostics: dict[ExponentKey, dict[str, float]] = field(default_factory=dict)
    flags: dict[str, Any] = field(default_factory=dict)

    @property
    def regime(self) -> AlphaRegime:
        return self.lattice.regime

    @property
    def order(self) -> int:
        return self.lattice.order

    @property
    def n(self) -> int:
        return self.pair.index

    def coefficient(self, key: ExponentKey) -> float:
        return self.mu.get(key, 0.0)

    def coefficient_at(self, exponent: float) -> float:
        """Coefficient at a numerical exponent (0 when absent)."""
        for entry in self.computed_entries:
            if abs(entry.exponent - exponent) < EXPONENT_TOLERANCE:
                return self.mu[entry.key]
        return 0.0

    @property
    def computed_entries(self) -> list[LatticeEntry]:
        return [entry for entry in self.lattice if entry.key in self.mu]

    def rows(self) -> list[list]:
        return [
            [entry.exponent, entry.label, *entry.provenance, self.mu[entry.key]]
            for entry in self.computed_entries
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "alpha": self.regime.to_dict(),
            "order": self.order,
            "lattice": [entry.to_dict() for entry in self.lattice],
            "mu": {entry.label: self.mu[entry.key] for entry in self.computed_entries},
            "flags": dict(self.flags),
            "diagnostics": {
                entry.label: self.diagnostics[entry.key]
                for entry in self.computed_entries
                if entry.key in self.diagnostics
            },
        }

    def save(self, path: Path) -> Path:
        return write_json(path, self.to_dict())


def evaluate_series(series: AsymptoticSeries, eps: float, up_to: float | None = None) -> float:
    """Partial sum of eps^e mu_e over e <= up_to, in increasing exponent order."""
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}", field="eps", value=eps)
    bound = series.order if up_to is None else up_to
    total = 0.0
    for entry in series.computed_entries:
        if entry.exponent <= bound + EXPONENT_TOLERANCE:
            total += eps**entry.exponent * series.mu[entry.key]
    return total


def evaluate_eigenfunction(
    series: AsymptoticSeries, eps: float, up_to: float | None = None, points: int = 201
) -> tuple[GridEdgeFunction, GridEdgeFunction, GridEdgeFunction]:
    """Samples of W + sum eps^e w_e on each edge."""
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}", field="eps", value=eps)
    bound = series.order if up_to is None else up_to
    result = [f.sample(points) for f in series.pair.triple]
    for entry in series.computed_entries:
        if entry.exponent <= 0.0 or entry.exponent > bound + EXPONENT_TOLERANCE:
            continue
        weight = eps**entry.exponent
        result = [
            acc + weight * f.sample(points)
            for acc, f in zip(result, series.correctors[entry.key], strict=True)
        ]
    return tuple(result)


# Closed forms


def _jump_term(graph: StarGraph, pair: EigenPair, delta: Sequence[float]) -> float:
    h2 = graph.vertex_weights
    slopes = pair.vertex_derivatives
    return sum(delta[i - 1] * h2[i] * slopes[i] for i in (1, 2))


def first_order_alpha0(graph: StarGraph, pair: EigenPair, delta: Sequence[float]) -> float:
    """
    mu_1 for alpha = 0 with jumps delta = (delta_2, delta_3).

    mu_1 = Lambda [W(0) d_1 - sum delta_i h_i(0)^2 W_i'(0)] with
    d_1 = Lambda W(0) (l0 sum h_i(0)^2 - m/pi).
    """
    mu0, w0 = pair.eigenvalue, pair.vertex_value
    d1 = mu0 * w0 * (graph.node.ell0 * float(np.sum(graph.vertex_weights)) - graph.mass / math.pi)
    return mu0 * (w0 * d1 - _jump_term(graph, pair, delta))


def first_order_alpha1(
    graph: StarGraph, pair: EigenPair, delta: Sequence[float], mass_remainder: float = 0.0
) -> float:
    """
    mu_1 for alpha = 1 on the vertex-mass limit problem.

    The node integral enters through its bounded remainder only; the part
    m w_1(0) belongs to the vertex mass of the limit operator.
    """
    mu0, w0 = pair.eigenvalue, pair.vertex_value
    d1 = mu0 * w0 * graph.node.ell0 * float(np.sum(graph.vertex_weights))
    d1 -= mu0 * mass_remainder / math.pi
    return mu0 * (w0 * d1 - _jump_term(graph, pair, delta))


def mass_chain_coefficient(pair: EigenPair, mass: float) -> float:
    """-(Lambda W(0))^2 m/pi, the coefficient of eps^(1-alpha)."""
    return -((pair.eigenvalue * pair.vertex_value) ** 2) * mass / math.pi


# Recursion


def _vertex_derivative(f: EdgeFunction, order: int) -> float:
    if order == 0:
        return f.vertex_trace()[0]
    if isinstance(f, AnalyticEdgeFunction):
        return float(f.derivative(0.0, order))
    if order == 1:
        return f.vertex_trace()[1]
    raise ValidationError(
        f"Grid edge functions provide vertex derivatives up to order 1, not {order}",
        field="order",
        value=order,
    )


def _weighted(graph: StarGraph, i: int, f: EdgeFunction) -> EdgeFunction:
    """h_i^2 f."""
    edge = graph.edges[i]
    if isinstance(f, AnalyticEdgeFunction):
        return edge.h0**2 * f
    return GridEdgeFunction(f.length, edge.h(f.grid) ** 2 * f.values)


class SeriesBuilder:
    """Runs the recursion for one eigenpair, exponent by exponent."""

    def __init__(
        self,
        graph: StarGraph,
        regime: AlphaRegime,
        pair: EigenPair,
        order: int,
        provider: ConstantsProvider,
        strict: bool = True,
    ):
        self.graph = graph
        self.regime = regime
        self.pair = pair
        self.provider = provider
        self.strict = strict
        self.beta = graph.vertex_mass_coefficient(regime.has_vertex_mass)
        self.series = AsymptoticSeries(graph=graph, lattice=build_lattice(regime, order), pair=pair)

        zero = regime.zero_key
        self.series.mu[zero] = pair.eigenvalue
        self.series.correctors[zero] = pair.triple
        self.series.flags.update(
            {
                "constants": provider.name,
                "exponential_tail_neglected": False,
                "truncated_at": None,
                "missing_key": None,
                "pole_type": pair.pole_type,
            }
        )

    # coefficient access

    def _splits(self, target: ExponentKey) -> Iterator[tuple]:
        """(s, r, mu_s, w_r) for every computed s and r with s + r = target."""
        for s, mu_s in self.series.mu.items():
            r = self.regime.sub(target, s)
            w_r = self.series.correctors.get(r)
            if w_r is not None:
                yield s, r, mu_s, w_r

    def _is_inner_nontrivial(self, key: ExponentKey) -> bool:
        """
        Whether the inner problem at this exponent has data.

        Below exponent 1 the inner coefficient is the constant w(0). For
        irrational alpha, exponents k - p*alpha with k - p < 1 lie outside the
        span of the geometric (1) and mass (1 - alpha) generators.
        """
        if self.regime.exponent(key) < 1.0 - EXPONENT_TOLERANCE:
            return False
        if self.regime.kind == RegimeKind.IRRATIONAL:
            return key[0] - key[1] >= 1
        return True

    def _mass_remainder(self, r: ExponentKey, consumer: ExponentKey) -> float:
        """
        Node integral of rho0 times the bounded part of N_r, read at ``consumer``.

        Raises:
            MissingConstantsError: If no table supplied it
        """
        inner = self.series.inner.get(r)
        if inner is None:
            return 0.0
        if inner.mass_remainder is None:
            lattice = self.series.lattice
            raise MissingConstantsError(
                f"No node mass integral for exponent {lattice.entry(r).label}",
                order=lattice.entry(consumer).label,
                key=f"mass_table{format_mass_key(lattice.entry(r).provenance)}",
            )
        return inner.mass_remainder

    def _node_integral(self, r: ExponentKey, consumer: ExponentKey) -> float:
        """Node integral of rho0 N_r: m w_r(0) plus the bounded remainder."""
        value = self.graph.mass * self.series.correctors[r][0].vertex_trace()[0]
        return value + self._mass_remainder(r, consumer)

    def _tail_sum(self, r: ExponentKey) -> float:
        inner = self.series.inner.get(r)
        if inner is None:
            return 0.0
        if not inner.tails_complete:
            self.series.flags["exponential_tail_neglected"] = True
        return inner.tail_sum

    # recursion data

    def inner_request(self, entry) -> InnerRequest:
        key = entry.key
        previous = self.series.correctors.get(self.regime.sub(key, self.regime.key(1, 0)))
        slopes = (
            tuple(f.vertex_trace()[1] for f in previous) if previous is not None else (0.0, 0.0, 0.0)
        )
        node_target = self.regime.sub(key, self.regime.key(2, 1))
        node = sum(
            mu_s * w_r[0].vertex_trace()[0] for _, _, mu_s, w_r in self._splits(node_target)
        )
        return InnerRequest(
            label=entry.label,
            provenance=entry.provenance,
            outlet_slopes=slopes,
            node_coefficient=node,
        )

    def flux_datum(self, key: ExponentKey) -> float:
        """Right-hand side of the Kirchhoff condition at exponent ``key``."""
        regime = self.regime
        h2 = self.graph.vertex_weights
        ell0 = self.graph.node.ell0

        matching = 0.0
        j = 1
        while not regime.is_negative(shifted := regime.sub(key, regime.key(j, 0))):
            factor = ell0**j / math.factorial(j)
            for _, _, mu_s, w_r in self._splits(shifted):
                matching += factor * mu_s * sum(
                    h2[i] * _vertex_derivative(w_r[i], j - 1) for i in range(3)
                )
            j += 1

        tails = sum(
            mu_s * self._tail_sum(r)
            for _, r, mu_s, _ in self._splits(regime.sub(key, regime.key(1, 0)))
        )

        mass_target = regime.sub(key, regime.key(1, 1))
        mass = sum(
            mu_s * self._node_integral(r, key) for _, r, mu_s, _ in self._splits(mass_target)
        )
        if mass_target == key:
            # the part m w_e(0) is the vertex mass of the limit operator
            mass += self.pair.eigenvalue * self._mass_remainder(key, key)

        return matching - (tails + mass) / math.pi

    def forcing(self, key: ExponentKey) -> tuple[EdgeFunction, ...]:
        """Sum of mu_s h^2 w_r over s + r = key with s, r != 0."""
        result = [zero_like(f) for f in self.pair.triple]
        for _, _, mu_s, w_r in self._splits(key):
            result = [
                acc + mu_s * _weighted(self.graph, i, f)
                for i, (acc, f) in enumerate(zip(result, w_r, strict=True))
            ]
        return tuple(result)

    def _inner_constants(self, entry) -> InnerConstants:
        if not self._is_inner_nontrivial(entry.key):
            return InnerConstants(delta=(0.0, 0.0), tails=(0.0, 0.0, 0.0), source="trivial")
        return self.provider.inner_constants(entry.key, self.inner_request(entry))

    def run(self) -> AsymptoticSeries:
        series = self.series
        for entry in series.lattice:
            key = entry.key
            if key == self.regime.zero_key:
                continue

            try:
                inner = self._inner_constants(entry)
                series.inner[key] = inner
                flux_datum = self.flux_datum(key)
            except MissingConstantsError as e:
                series.inner.pop(key, None)
                if self.strict:
                    raise
                logger.warning(f"Series for n={self.pair.index} truncated at {entry.label}: {e}")
                series.flags["truncated_at"] = entry.label
                series.flags["missing_key"] = e.key
                break

            problem = CorrectorProblem(
                graph=self.graph,
                base=self.pair,
                rhs=self.forcing(key),
                jumps=inner.delta,
                flux_datum=flux_datum,
                beta=self.beta,
            )
            solution = solve_corrector(problem)
            series.mu[key] = solution.mu_k
            series.correctors[key] = solution.triple
            series.diagnostics[key] = solution.diagnostics
            logger.debug(f"mu_{entry.label} = {solution.mu_k!r}")

        self._check_vanishing()
        return series

    def _check_vanishing(self) -> None:
        if not self.regime.is_fractional:
            return
        bound = 1.0 - self.regime.alpha
        below = [
            abs(self.series.mu[entry.key])
            for entry in self.series.computed_entries
            if 0.0 < entry.exponent < bound - EXPONENT_TOLERANCE
        ]
        largest = max(below, default=0.0)
        self.series.flags["vanishing_max"] = largest
        if largest > VANISHING_TOLERANCE:
            raise SolverError(
                f"Coefficient below exponent 1 - alpha does not vanish: {largest:.3e}",
                solver="expansion",
                operation="vanishing rule",
            )


def base_pair(graph: StarGraph, regime: AlphaRegime, n: int) -> EigenPair:
    """The n-th limit eigenpair; refused when degenerate."""
    pair = solve_limit_spectrum(graph, regime, count=n)[n - 1]
    if pair.degenerate:
        raise DegeneracyError(
            f"Eigenvalue {n} is degenerate (multiplicity {pair.multiplicity}); "
            "the expansion needs a simple eigenvalue",
            index=n,
        )
    return pair


def expand(
    graph: StarGraph,
    regime: AlphaRegime,
    n: int,
    order: int,
    provider: ConstantsProvider | None = None,
    strict: bool = True,
    pair: EigenPair | None = None,
) -> AsymptoticSeries:
    """
    Asymptotic series of the n-th eigenvalue up to exponent ``order``.

    Args:
        provider: Source of junction constants; the node tables by default
        strict: Raise on missing constants instead of truncating
        pair: Precomputed limit eigenpair n

    Raises:
        DegeneracyError: If eigenvalue n is degenerate
        MissingConstantsError: If strict and a constant is unavailable
        ValidationError: If the order is out of range
    """
    if order < 0:
        raise ValidationError(f"Order must be nonnegative, got {order}", field="order", value=order)
    if not graph.is_constant_radius and order > MAX_SAMPLED_ORDER:
        raise ValidationError(
            f"Graphs with sampled radii support orders up to {MAX_SAMPLED_ORDER}, got {order}",
            field="order",
            value=order,
        )

    if pair is None:
        pair = base_pair(graph, regime, n)
    elif pair.degenerate:
        raise DegeneracyError(f"Eigenvalue {pair.index} is degenerate", index=pair.index)

    provider = provider or TableConstantsProvider.from_graph(graph, regime)
    logger.info(f"Expanding eigenvalue {n} ({regime}) to order {order} with {provider.name}")
    return SeriesBuilder(graph, regime, pair, order, provider, strict).run()


def expand_alpha0(graph: StarGraph, n: int, order: int, **kwargs) -> AsymptoticSeries:
    """Series for alpha = 0."""
    return expand(graph, AlphaRegime.zero(), n, order, **kwargs)


def expand_fractional(
    graph: StarGraph, regime: AlphaRegime, n: int, order: int, **kwargs
) -> AsymptoticSeries:
    """Series for alpha in (0, 1), rational or irrational."""
    if not regime.is_fractional:
        raise ValidationError(f"Regime {regime} is not fractional", field="alpha")
    return expand(graph, regime, n, order, **kwargs)


def expand_alpha1(graph: StarGraph, n: int, order: int, **kwargs) -> AsymptoticSeries:
    """Series for alpha = 1 around the vertex-mass limit problem."""
    return expand(graph, AlphaRegime.one(), n, order, **kwargs)


class ExpansionService(BaseService):
    """Expands several eigenvalues concurrently."""

    def __init__(self, max_workers: int = 4):
        super().__init__()
        self.max_workers = max_workers

    def _do_initialize(self) -> None:
        pass

    def expand_many(
        self,
        graph: StarGraph,
        regime: AlphaRegime,
        indices: Sequence[int],
        order: int,
        provider: ConstantsProvider | None = None,
        strict: bool = True,
    ) -> list[AsymptoticSeries]:
        """Series for each index, in the order of ``indices``."""
        self.initialize()
        pairs = solve_limit_spectrum(graph, regime, count=max(indices))

        def job(n: int) -> AsymptoticSeries:
            pair = pairs[n - 1]
            if pair.degenerate:
                raise DegeneracyError(f"Eigenvalue {n} is degenerate", index=n)
            return expand(graph, regime, n, order, provider=provider, strict=strict, pair=pair)

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            return list(executor.map(job, indices))
