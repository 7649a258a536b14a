"""Limit spectral problem on the star graph."""

import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.linalg import null_space
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh

from ..models.edge_function import AnalyticEdgeFunction, GridEdgeFunction
from ..models.eigenpair import EigenPair
from ..models.graph import StarGraph
from ..models.regime import AlphaRegime
from ..utils.exceptions import PoleProximityError, SolverError, ValidationError
from ..utils.formatting import write_csv, write_json

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-12
POLE_MERGE_TOLERANCE = 1e-10
DEGENERACY_TOLERANCE = 1e-6
ROOT_TOLERANCE = 1e-13
MIN_POINTS_PER_EDGE = 16
DEFAULT_POINTS_PER_EDGE = 2001
DENSE_LIMIT = 2000

SPECTRUM_COLUMNS = ("n", "lambda", "W0", "dW0_1", "dW0_2", "dW0_3", "degenerate")


@dataclass(frozen=True)
class SecularEquation:
    """
    G(omega) = sum_i h_i^2 cot(omega l_i) - beta omega, omega = sqrt(mu).

    G decreases strictly between consecutive poles omega = k pi / l_i, so each
    gap between poles holds exactly one root.
    """

    weights: tuple[float, float, float]
    lengths: tuple[float, float, float]
    beta: float = 0.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValidationError("Vertex mass coefficient must be nonnegative", field="beta")

    @classmethod
    def from_graph(
        cls, graph: StarGraph, regime: AlphaRegime, beta: float | None = None
    ) -> "SecularEquation":
        """
        Secular equation of a constant-radius graph.

        ``beta`` defaults to m/pi in regime One and 0 otherwise.
        """
        if not graph.is_constant_radius:
            raise ValidationError(
                "The secular equation requires constant cross-sections", field="radius"
            )
        if beta is None:
            beta = graph.vertex_mass_coefficient(regime.has_vertex_mass)
        return cls(
            tuple(float(w) for w in graph.vertex_weights),
            tuple(float(length) for length in graph.lengths),
            float(beta),
        )

    @property
    def _w(self) -> np.ndarray:
        return np.asarray(self.weights)

    @property
    def _l(self) -> np.ndarray:
        return np.asarray(self.lengths)

    def value(self, omega: float) -> float:
        sines = np.sin(omega * self._l)
        if np.any(np.abs(sines) < POLE_TOLERANCE):
            raise PoleProximityError(
                f"Secular function evaluated at a pole (omega={omega!r})",
                solver="secular",
                operation="value",
            )
        return float(np.sum(self._w * np.cos(omega * self._l) / sines) - self.beta * omega)

    def values(self, omegas: np.ndarray) -> np.ndarray:
        """Vectorized value, for scanning away from the poles."""
        arg = np.outer(omegas, self._l)
        return (self._w / np.tan(arg)).sum(axis=1) - self.beta * omegas

    def slope(self, omega: float) -> float:
        """dG/domega."""
        sines = np.sin(omega * self._l)
        return float(-np.sum(self._w * self._l / sines**2) - self.beta)

    def poles(self, omega_max: float) -> list[tuple[float, tuple[int, ...]]]:
        """
        Distinct poles up to ``omega_max`` with the edges vanishing there.

        Coinciding poles of different edges are merged.
        """
        candidates = sorted(
            (k * math.pi / length, i)
            for i, length in enumerate(self.lengths)
            for k in range(1, int(omega_max * length / math.pi + 1e-9) + 1)
        )
        merged: list[tuple[float, list[int]]] = []
        for omega, edge in candidates:
            if merged and abs(omega - merged[-1][0]) <= POLE_MERGE_TOLERANCE * omega:
                merged[-1][1].append(edge)
            else:
                merged.append((omega, [edge]))
        return [(omega, tuple(sorted(set(edges)))) for omega, edges in merged]


def secular_eval(eq: SecularEquation, mu: float) -> float:
    """
    Evaluate the secular function at mu > 0.

    Raises:
        PoleProximityError: If |sin(sqrt(mu) l_i)| < 1e-12 for some edge
    """
    if mu <= 0:
        raise ValidationError(f"mu must be positive, got {mu}", field="mu", value=mu)
    return eq.value(math.sqrt(mu))


def _root_between(eq: SecularEquation, lower: float, upper: float) -> float:
    """The unique root of G in the open gap (lower, upper) between two poles."""
    width = upper - lower
    step = min(math.pi / (64.0 * length) for length in eq.lengths)
    pad = 1e-9 * width
    grid = np.linspace(lower + pad, upper - pad, max(8, math.ceil(width / step)) + 1)
    values = eq.values(grid)

    crossing = np.flatnonzero((values[:-1] > 0) & (values[1:] <= 0))
    if crossing.size == 0:
        raise SolverError(
            f"No sign change of the secular function in ({lower}, {upper})",
            solver="secular",
            operation="bracket",
        )
    a, b = grid[crossing[0]], grid[crossing[0] + 1]
    if values[crossing[0] + 1] == 0.0:
        return float(b)

    omega = brentq(eq.value, a, b, xtol=ROOT_TOLERANCE, rtol=4 * np.finfo(float).eps)

    # one Newton step with the analytic slope
    polished = omega - eq.value(omega) / eq.slope(omega)
    if a < polished < b and abs(eq.value(polished)) <= abs(eq.value(omega)):
        omega = polished
    return float(omega)


def _secular_pair(
    eq: SecularEquation, omega: float, index: int, regime: AlphaRegime
) -> EigenPair:
    lengths, weights = np.asarray(eq.lengths), np.asarray(eq.weights)
    amplitudes = 1.0 / np.sin(omega * lengths)
    energy = np.sum(
        weights * amplitudes**2 * omega**2 * (lengths / 2 + np.sin(2 * omega * lengths) / (4 * omega))
    )
    amplitudes /= math.sqrt(energy)
    # dW1/dx(l1) = -A1 omega must be positive
    if amplitudes[0] > 0:
        amplitudes = -amplitudes

    triple = tuple(
        AnalyticEdgeFunction.sine(float(length), omega, float(a))
        for length, a in zip(lengths, amplitudes, strict=True)
    )
    return EigenPair(eigenvalue=omega**2, index=index, triple=triple, regime=regime)


def _pole_amplitudes(
    eq: SecularEquation, omega: float, edges: tuple[int, ...]
) -> list[np.ndarray]:
    """
    Amplitude vectors of the vertex-zero eigenfunctions at a shared pole.

    Amplitudes vanish off ``edges``; on them the Kirchhoff sum
    sum h_i^2 A_i cos(omega l_i) = 0 leaves |edges| - 1 free directions,
    returned orthonormal in the energy product.
    """
    lengths, weights = np.asarray(eq.lengths), np.asarray(eq.weights)
    idx = np.asarray(edges)
    # energy of A sin(omega (l - x)) with sin(omega l) = 0
    energy_scale = np.sqrt(weights[idx] * omega**2 * lengths[idx] / 2)
    constraint = weights[idx] * np.cos(omega * lengths[idx]) / energy_scale
    basis = null_space(constraint[None, :])

    vectors = []
    for column in basis.T:
        amplitudes = np.zeros(3)
        amplitudes[idx] = column / energy_scale
        leading = next(a for a in amplitudes if abs(a) > 1e-12)
        if leading > 0:
            amplitudes = -amplitudes
        vectors.append(amplitudes)
    return vectors


def _flag_degeneracy(values: Sequence[float]) -> tuple[list[bool], list[int]]:
    """Degeneracy flags and cluster sizes for sorted eigenvalues."""
    values = list(values)
    clusters: list[list[int]] = []
    for i, value in enumerate(values):
        if clusters and abs(value - values[clusters[-1][-1]]) < DEGENERACY_TOLERANCE * abs(value):
            clusters[-1].append(i)
        else:
            clusters.append([i])

    multiplicity = [0] * len(values)
    for cluster in clusters:
        for i in cluster:
            multiplicity[i] = len(cluster)
    return [m > 1 for m in multiplicity], multiplicity


def secular_spectrum(
    eq: SecularEquation, regime: AlphaRegime, count: int
) -> list[EigenPair]:
    """
    First ``count`` eigenpairs of a constant-radius limit problem.

    Secular roots give the eigenfunctions with nonzero vertex value; shared
    poles of at least two edges give the vertex-zero ones.
    """
    # the longest edge alone contributes count + 2 poles below omega_max
    omega_max = (count + 2) * math.pi / max(eq.lengths)
    poles = eq.poles(omega_max)

    modes: list[tuple[float, str, object]] = []
    lower = 0.0
    for omega_pole, edges in poles:
        modes.append((_root_between(eq, lower, omega_pole), "secular", None))
        if len(edges) >= 2:
            for amplitudes in _pole_amplitudes(eq, omega_pole, edges):
                modes.append((omega_pole, "pole", amplitudes))
        lower = omega_pole
    modes.sort(key=lambda mode: mode[0])
    modes = modes[: count + 1]

    degenerate, multiplicity = _flag_degeneracy([omega**2 for omega, _, _ in modes])

    pairs = []
    for n, (omega, kind, amplitudes) in enumerate(modes[:count], start=1):
        if kind == "secular":
            pair = _secular_pair(eq, omega, n, regime)
        else:
            triple = tuple(
                AnalyticEdgeFunction.sine(length, omega, float(a))
                for length, a in zip(eq.lengths, amplitudes, strict=True)
            )
            pair = EigenPair(eigenvalue=omega**2, index=n, triple=triple, regime=regime)
        pairs.append(
            EigenPair(
                eigenvalue=pair.eigenvalue,
                index=n,
                triple=pair.triple,
                regime=regime,
                degenerate=degenerate[n - 1],
                multiplicity=multiplicity[n - 1],
                pole_type=kind == "pole",
            )
        )
    return pairs


@dataclass(frozen=True, eq=False)
class DiscreteGraphSystem:
    """
    P1 finite-element discretization of the limit problem.

    Unknown 0 is the shared vertex value; each edge then contributes its
    interior nodes in order from the vertex. Dirichlet ends are eliminated.

    Attributes:
        graph: Graph being discretized
        regime: Regime of the limit problem
        points: Grid points per edge, vertex and end included
        beta: Point mass added to the vertex diagonal of the mass matrix
        stiffness: K, weights h^2
        mass: M, weights h^2, plus beta at the vertex
        trim: Length removed from every edge at the vertex side
    """

    graph: StarGraph
    regime: AlphaRegime
    points: int
    beta: float
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    trim: float = 0.0

    @property
    def size(self) -> int:
        return self.stiffness.shape[0]

    @property
    def interior(self) -> int:
        return self.points - 2

    def edge_length(self, i: int) -> float:
        return self.graph.edges[i].length - self.trim

    def edge_slice(self, i: int) -> slice:
        start = 1 + i * self.interior
        return slice(start, start + self.interior)

    def to_triple(self, vector: np.ndarray) -> tuple[GridEdgeFunction, ...]:
        """Edge functions (vertex value, interior values, 0) of a solution vector."""
        return tuple(
            GridEdgeFunction(
                self.edge_length(i),
                np.concatenate(([vector[0]], vector[self.edge_slice(i)], [0.0])),
            )
            for i in range(3)
        )

    def from_triple(self, triple) -> np.ndarray:
        """Nodal vector of an edge triple (vertex value taken from edge 1)."""
        vector = np.zeros(self.size)
        for i, f in enumerate(triple):
            samples = f.sample(self.points).values
            if i == 0:
                vector[0] = samples[0]
            vector[self.edge_slice(i)] = samples[1:-1]
        return vector

    def load_vector(self, triple) -> np.ndarray:
        """Consistent-mass load vector of edge forcings f: entries of int f phi_j."""
        load = np.zeros(self.size)
        for i, f in enumerate(triple):
            values = f.sample(self.points).values
            step = self.edge_length(i) / (self.points - 1)
            nodal = np.zeros(self.points)
            nodal[:-1] += step / 6 * (2 * values[:-1] + values[1:])
            nodal[1:] += step / 6 * (values[:-1] + 2 * values[1:])
            load[0] += nodal[0]
            load[self.edge_slice(i)] += nodal[1:-1]
        return load

    def vertex_vector(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[0] = 1.0
        return e


def assemble_discrete(
    graph: StarGraph,
    regime: AlphaRegime,
    points_per_edge: int,
    beta: float | None = None,
    trim: float = 0.0,
) -> DiscreteGraphSystem:
    """
    Assemble the P1 stiffness and mass matrices on uniform edge grids.

    Args:
        graph: Star graph
        regime: Regime; regime One adds m/pi at the vertex unless ``beta`` is given
        points_per_edge: Grid points per edge including both ends (>= 16)
        beta: Explicit vertex point mass
        trim: Shorten every edge by this length at the vertex

    Raises:
        ValidationError: If fewer than 16 points per edge are requested
    """
    if points_per_edge < MIN_POINTS_PER_EDGE:
        raise ValidationError(
            f"At least {MIN_POINTS_PER_EDGE} points per edge are required",
            field="points",
            value=points_per_edge,
        )
    if beta is None:
        beta = graph.vertex_mass_coefficient(regime.has_vertex_mass)

    interior = points_per_edge - 2
    size = 1 + 3 * interior
    rows, cols, k_data, m_data = [], [], [], []

    for i, edge in enumerate(graph.edges):
        length = edge.length - trim
        step = length / (points_per_edge - 1)
        midpoints = trim + step * (np.arange(points_per_edge - 1) + 0.5)
        h2 = edge.h(midpoints) ** 2

        nodes = np.empty(points_per_edge, dtype=int)
        nodes[0] = 0
        nodes[1:-1] = 1 + i * interior + np.arange(interior)
        nodes[-1] = -1
        a, b = nodes[:-1], nodes[1:]

        k_e = h2 / step
        m_e = h2 * step / 6.0
        for r, c, k, m in ((a, a, k_e, 2 * m_e), (b, b, k_e, 2 * m_e), (a, b, -k_e, m_e), (b, a, -k_e, m_e)):
            keep = (r >= 0) & (c >= 0)
            rows.append(r[keep])
            cols.append(c[keep])
            k_data.append(k[keep])
            m_data.append(m[keep])

    rows, cols = np.concatenate(rows), np.concatenate(cols)
    stiffness = sp.coo_matrix((np.concatenate(k_data), (rows, cols)), shape=(size, size)).tocsr()
    mass = sp.coo_matrix((np.concatenate(m_data), (rows, cols)), shape=(size, size)).tocsr()
    if beta:
        mass = mass + sp.csr_matrix(([beta], ([0], [0])), shape=(size, size))

    logger.debug(f"Assembled graph system: {size} unknowns, beta={beta}, trim={trim}")
    return DiscreteGraphSystem(graph, regime, points_per_edge, float(beta), stiffness, mass, trim)


def discrete_eigenvalues(system: DiscreteGraphSystem, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Smallest ``count`` generalized eigenpairs of (K, M), eigenvectors M-normalized."""
    count = min(count, system.size - 1)
    if system.size <= DENSE_LIMIT:
        values, vectors = scipy.linalg.eigh(
            system.stiffness.toarray(),
            system.mass.toarray(),
            subset_by_index=[0, count - 1],
        )
    else:
        values, vectors = eigsh(
            system.stiffness.tocsc(), k=count, M=system.mass.tocsc(), sigma=0.0, which="LM"
        )
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]
    return values, vectors


def solve_discrete(system: DiscreteGraphSystem, count: int) -> list[EigenPair]:
    """Energy-normalized grid eigenpairs of a discrete system."""
    values, vectors = discrete_eigenvalues(system, count + 1)
    degenerate, multiplicity = _flag_degeneracy(values)

    pairs = []
    for n in range(min(count, len(values))):
        vector = vectors[:, n] / math.sqrt(vectors[:, n] @ (system.stiffness @ vectors[:, n]))
        # last interior node of the first edge that is not identically zero
        ends = [vector[system.edge_slice(i)][-1] for i in range(3)]
        leading = next((v for v in ends if abs(v) > 1e-12 * np.max(np.abs(vector))), 0.0)
        if leading > 0:
            vector = -vector

        scale = np.max(np.abs(vector))
        pairs.append(
            EigenPair(
                eigenvalue=float(values[n]),
                index=n + 1,
                triple=system.to_triple(vector),
                regime=system.regime,
                degenerate=degenerate[n],
                multiplicity=multiplicity[n],
                pole_type=abs(vector[0]) < 1e-8 * scale,
            )
        )
    return pairs


def solve_limit_spectrum(
    graph: StarGraph,
    regime: AlphaRegime,
    count: int,
    points_per_edge: int | None = None,
    method: str = "auto",
) -> list[EigenPair]:
    """
    First ``count`` limit eigenpairs, sorted ascending.

    Args:
        graph: Star graph
        regime: Regime (the vertex carries mass m/pi in regime One)
        count: Number of eigenpairs
        points_per_edge: Grid resolution for the discrete path
        method: "auto" (secular for constant radius), "secular" or "grid"

    Raises:
        ValidationError: If count < 1 or the secular path is forced on
            variable cross-sections
    """
    if count < 1:
        raise ValidationError(f"Count must be at least 1, got {count}", field="count", value=count)

    start = time.perf_counter()
    use_secular = method == "secular" or (method == "auto" and graph.is_constant_radius)
    if use_secular:
        eq = SecularEquation.from_graph(graph, regime)
        pairs = secular_spectrum(eq, regime, count)
        tolerance = 1e-8
    else:
        system = assemble_discrete(graph, regime, points_per_edge or DEFAULT_POINTS_PER_EDGE)
        pairs = solve_discrete(system, count)
        tolerance = None

    if tolerance is not None:
        for pair in pairs:
            worst = max(pair.residuals(graph).values())
            if worst > tolerance:
                logger.warning(f"Eigenpair {pair.index} invariant residual {worst:.3e}")

    flagged = [pair.index for pair in pairs if pair.degenerate]
    if flagged:
        logger.warning(f"Degenerate eigenvalues flagged at indices {flagged}")
    logger.info(
        f"Limit spectrum ({'secular' if use_secular else 'grid'}, regime {regime}): "
        f"{len(pairs)} pairs in {time.perf_counter() - start:.3f}s"
    )
    return pairs


def spectrum_rows(pairs: Sequence[EigenPair]) -> list[list]:
    rows = []
    for pair in pairs:
        derivatives = pair.vertex_derivatives
        rows.append(
            [pair.index, pair.eigenvalue, pair.vertex_value, *derivatives, pair.degenerate]
        )
    return rows


def spectrum_to_dict(pairs: Sequence[EigenPair], regime: AlphaRegime) -> dict:
    return {
        "regime": regime.to_dict(),
        "eigenpairs": [pair.to_dict() for pair in pairs],
    }


def write_spectrum(path: Path, pairs: Sequence[EigenPair], regime: AlphaRegime, fmt: str = "csv") -> Path:
    """Write the eigenpair table as CSV or JSON."""
    if fmt == "json":
        return write_json(path, spectrum_to_dict(pairs, regime))
    return write_csv(path, SPECTRUM_COLUMNS, spectrum_rows(pairs))
