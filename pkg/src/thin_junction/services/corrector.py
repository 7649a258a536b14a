"""Vertex-corrected edge problems of the expansion recursion."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import polynomial as P
from scipy.sparse.linalg import LinearOperator, onenormest, splu

from ..models.edge_function import (
    AnalyticEdgeFunction,
    EdgeFunction,
    GridEdgeFunction,
    edge_integral,
    energy_product,
    plain_product,
)
from ..models.eigenpair import EigenPair
from ..models.graph import StarGraph
from ..utils.exceptions import DegeneracyError, IllConditionedError, ValidationError
from .limit_spectrum import assemble_discrete

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class CorrectorProblem:
    """
    Edge problem -(h^2 w')' - mu0 h^2 w = F + mu_k h^2 W with Dirichlet ends,
    vertex jumps w1(0) = w_i(0) - delta_i (i = 2, 3) and the flux condition
    sum h_i^2 w_i'(0) + beta mu0 w1(0) = d - beta mu_k W(0).

    Attributes:
        graph: Graph carrying h
        base: Simple eigenpair (mu0, W)
        rhs: Forcing F per edge, same representation as the base
        jumps: (delta_2, delta_3)
        flux_datum: d
        beta: Vertex point mass (0 unless regime One)
    """

    graph: StarGraph
    base: EigenPair
    rhs: tuple[EdgeFunction, EdgeFunction, EdgeFunction]
    jumps: tuple[float, float] = (0.0, 0.0)
    flux_datum: float = 0.0
    beta: float = 0.0

    @property
    def is_analytic(self) -> bool:
        return all(isinstance(f, AnalyticEdgeFunction) for f in (*self.base.triple, *self.rhs))

    @property
    def deltas(self) -> tuple[float, float, float]:
        return (0.0, *self.jumps)


@dataclass
class CorrectorSolution:
    """
    Solution of a corrector problem.

    Attributes:
        mu_k: Series coefficient fixed by solvability
        triple: Corrector, energy-orthogonal to the base eigenfunction
        diagnostics: Solvability, orthogonality and transmission residuals
    """

    mu_k: float
    triple: tuple[EdgeFunction, EdgeFunction, EdgeFunction]
    diagnostics: dict[str, float] = field(default_factory=dict)


def zero_like(f: EdgeFunction) -> EdgeFunction:
    if isinstance(f, AnalyticEdgeFunction):
        return AnalyticEdgeFunction.zero(f.length, f.omega)
    return GridEdgeFunction.zero(f.length, f.points)


def _substitution(edge_index: int, p: CorrectorProblem, like: EdgeFunction) -> EdgeFunction:
    """delta (l - x)/l on an edge, in the representation of ``like``."""
    delta = p.deltas[edge_index]
    length = p.graph.edges[edge_index].length
    if isinstance(like, AnalyticEdgeFunction):
        return AnalyticEdgeFunction.from_arrays(length, like.omega, [0.0], [0.0, delta / length])
    return GridEdgeFunction(length, delta * (length - like.grid) / length)


def homogenize(p: CorrectorProblem) -> CorrectorProblem:
    """
    Remove the vertex jumps by substituting phi_i = w_i - delta_i (l_i - x)/l_i.

    The returned problem has continuous vertex values, forcing
    F_i + mu0 h^2 delta_i (l_i - x)/l_i - 2 delta_i h h'/l_i and flux datum
    d + sum delta_i h_i(0)^2 / l_i.
    """
    if p.jumps == (0.0, 0.0):
        return p

    mu0 = p.base.eigenvalue
    rhs = list(p.rhs)
    flux = p.flux_datum
    for i in (1, 2):
        delta = p.deltas[i]
        if delta == 0.0:
            continue
        edge = p.graph.edges[i]
        f = rhs[i]
        if isinstance(f, AnalyticEdgeFunction):
            # constant radius: h' = 0
            shift = (mu0 * edge.h0**2) * _substitution(i, p, f)
            rhs[i] = f + shift
        else:
            x = f.grid
            extra = (
                mu0 * edge.h(x) ** 2 * delta * (edge.length - x) / edge.length
                - 2.0 * delta * edge.h(x) * edge.dh(x) / edge.length
            )
            rhs[i] = GridEdgeFunction(f.length, f.values + extra)
        flux += delta * edge.h0**2 / edge.length

    return replace(p, rhs=tuple(rhs), jumps=(0.0, 0.0), flux_datum=flux)


def fredholm_coefficient(p: CorrectorProblem) -> float:
    """
    mu_k from the solvability condition, without solving.

    mu_k = mu0 [W(0) d - sum_{i=2,3} delta_i h_i(0)^2 W_i'(0) - sum int F_i W_i],
    using the energy normalization of W (which includes the vertex mass).
    """
    base = p.base
    derivatives = base.vertex_derivatives
    jump_term = sum(
        p.deltas[i] * p.graph.edges[i].h0 ** 2 * derivatives[i] for i in (1, 2)
    )
    forcing = plain_product(p.graph.edges, p.rhs, base.triple)
    return base.eigenvalue * (base.vertex_value * p.flux_datum - jump_term - forcing)


# Analytic path


def _particular(f: AnalyticEdgeFunction) -> AnalyticEdgeFunction:
    """A solution of -w'' - omega^2 w = f (any boundary values)."""
    omega = f.omega

    poly = np.zeros(1)
    term, factor = f.poly_coeffs, -1.0 / omega**2
    while np.any(term != 0):
        poly = P.polyadd(poly, factor * term)
        term = P.polyder(term, 2)
        factor *= -1.0 / omega**2

    # trig part: w = Re(u e^{i omega t}) with u'' + 2 i omega u' = -Z
    v = np.zeros(1, dtype=complex)
    term, factor = f.trig_coeffs, -1.0 / (2j * omega)
    while np.any(term != 0):
        v = P.polyadd(v, factor * term)
        term = P.polyder(term)
        factor *= -1.0 / (2j * omega)
    u = P.polyint(v)

    return AnalyticEdgeFunction.from_arrays(f.length, omega, u, poly)


def _solve_analytic(p: CorrectorProblem) -> tuple[float, tuple[AnalyticEdgeFunction, ...], float]:
    base, graph = p.base, p.graph
    mu0, omega = base.eigenvalue, base.omega
    w0 = base.vertex_value
    h2 = graph.vertex_weights

    sines, cosines, particulars, responses = [], [], [], []
    for i, edge in enumerate(graph.edges):
        length = edge.length
        sines.append(AnalyticEdgeFunction.from_arrays(length, omega, [-1j], [0.0]))
        cosines.append(AnalyticEdgeFunction.from_arrays(length, omega, [1.0], [0.0]))
        particulars.append(_particular((1.0 / h2[i]) * p.rhs[i]))
        responses.append(_particular(base.triple[i]))

    matrix = np.zeros((7, 7))
    rhs = np.zeros(7)

    # Dirichlet ends: sin vanishes there, cos is 1
    for i in range(3):
        matrix[i, 3 + i] = 1.0
        matrix[i, 6] = responses[i].end_value()
        rhs[i] = -particulars[i].end_value()

    def at_vertex(f: AnalyticEdgeFunction) -> tuple[float, float]:
        return f.vertex_trace()

    traces = [
        [at_vertex(f) for f in family] for family in (sines, cosines, particulars, responses)
    ]
    s_tr, c_tr, p_tr, q_tr = traces

    # continuity w1(0) - w_i(0) = -delta_i
    for row, i in ((3, 1), (4, 2)):
        matrix[row, 0] = s_tr[0][0]
        matrix[row, 3] = c_tr[0][0]
        matrix[row, i] = -s_tr[i][0]
        matrix[row, 3 + i] = -c_tr[i][0]
        matrix[row, 6] = q_tr[0][0] - q_tr[i][0]
        rhs[row] = -p.deltas[i] - p_tr[0][0] + p_tr[i][0]

    # flux with the vertex mass terms
    for i in range(3):
        matrix[5, i] = h2[i] * s_tr[i][1]
        matrix[5, 3 + i] = h2[i] * c_tr[i][1]
        matrix[5, 6] += h2[i] * q_tr[i][1]
    matrix[5, 0] += p.beta * mu0 * s_tr[0][0]
    matrix[5, 3] += p.beta * mu0 * c_tr[0][0]
    matrix[5, 6] += p.beta * mu0 * q_tr[0][0] + p.beta * w0
    rhs[5] = (
        p.flux_datum
        - sum(h2[i] * p_tr[i][1] for i in range(3))
        - p.beta * mu0 * p_tr[0][0]
    )

    # energy orthogonality to W
    for i, edge in enumerate(graph.edges):
        w_i = base.triple[i]
        matrix[6, i] = edge_integral(edge, sines[i], w_i, "energy")
        matrix[6, 3 + i] = edge_integral(edge, cosines[i], w_i, "energy")
        matrix[6, 6] += edge_integral(edge, responses[i], w_i, "energy")
        rhs[6] -= edge_integral(edge, particulars[i], w_i, "energy")

    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise IllConditionedError(
            f"Corrector system condition number {condition:.3e} exceeds {CONDITION_LIMIT:.0e}",
            solver="corrector",
            operation="analytic",
            details={"condition": condition},
        )

    z = np.linalg.solve(matrix, rhs)
    mu_k = float(z[6])
    triple = tuple(
        z[i] * sines[i] + z[3 + i] * cosines[i] + particulars[i] + mu_k * responses[i]
        for i in range(3)
    )
    return mu_k, triple, condition


# Grid path


def _condition_estimate(matrix: sp.csc_matrix, lu) -> float:
    n = matrix.shape[0]
    inverse = LinearOperator(
        (n, n),
        matvec=lu.solve,
        rmatvec=lambda y: lu.solve(y, trans="T"),
        dtype=float,
    )
    return float(onenormest(matrix) * onenormest(inverse))


def _solve_grid(p: CorrectorProblem) -> tuple[float, tuple[GridEdgeFunction, ...], float]:
    base = p.base
    if not all(isinstance(f, GridEdgeFunction) for f in base.triple):
        raise ValidationError(
            "Grid corrector solves need a grid base eigenpair", field="base"
        )
    points = base.triple[0].points
    system = assemble_discrete(p.graph, base.regime, points, beta=p.beta)
    mu0 = base.eigenvalue

    w = system.from_triple(base.triple)
    mw = system.mass @ w
    kw = system.stiffness @ w
    load = system.load_vector(p.rhs) - p.flux_datum * system.vertex_vector()

    saddle = sp.bmat(
        [
            [system.stiffness - mu0 * system.mass, sp.csc_matrix(-mw[:, None])],
            [sp.csc_matrix(kw[None, :]), None],
        ],
        format="csc",
    )
    lu = splu(saddle)
    condition = _condition_estimate(saddle, lu)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise IllConditionedError(
            f"Saddle system condition estimate {condition:.3e} exceeds {CONDITION_LIMIT:.0e}",
            solver="corrector",
            operation="saddle",
            details={"condition": condition},
        )

    solution = lu.solve(np.concatenate((load, [0.0])))
    return float(solution[-1]), system.to_triple(solution[:-1]), condition


def _transmission_residuals(p: CorrectorProblem, mu_k: float, triple) -> dict[str, float]:
    values = [f.vertex_trace()[0] for f in triple]
    slopes = [f.vertex_trace()[1] for f in triple]
    h2 = p.graph.vertex_weights
    mu0 = p.base.eigenvalue
    flux = float(np.dot(h2, slopes)) + p.beta * mu0 * values[0] + p.beta * mu_k * p.base.vertex_value
    return {
        "continuity": max(abs(values[0] - (values[i] - p.deltas[i])) for i in (1, 2)),
        "flux": abs(flux - p.flux_datum),
        "dirichlet": max(abs(f.end_value()) for f in triple),
    }


def solve_corrector(p: CorrectorProblem) -> CorrectorSolution:
    """
    Solve a corrector problem.

    The jumps are first removed by :func:`homogenize`; the continuous problem
    is solved (7x7 closed-form system for analytic data, bordered FE system on
    grids), the substitution is undone and the result projected back to the
    energy-orthogonal complement of W.

    Raises:
        DegeneracyError: If the base eigenvalue is flagged degenerate
        IllConditionedError: If the linear system is too ill-conditioned
    """
    base = p.base
    if base.degenerate:
        raise DegeneracyError(
            f"Eigenvalue {base.index} is degenerate; corrector problems need a simple eigenvalue",
            index=base.index,
        )

    reduced = homogenize(p)
    if p.is_analytic:
        mu_k, phi, condition = _solve_analytic(reduced)
    else:
        mu_k, phi, condition = _solve_grid(reduced)

    triple = list(phi)
    for i in (1, 2):
        if p.deltas[i] != 0.0:
            triple[i] = triple[i] + _substitution(i, p, triple[i])

    edges = p.graph.edges
    overlap = energy_product(edges, triple, base.triple)
    triple = tuple(f - overlap * w for f, w in zip(triple, base.triple, strict=True))

    if p.is_analytic:
        solvability = abs(mu_k - fredholm_coefficient(p))
    else:
        # discrete solvability of the bordered system
        system_w = base.triple
        load = plain_product(edges, reduced.rhs, system_w)
        solvability = abs(mu_k - base.eigenvalue * (base.vertex_value * reduced.flux_datum - load))

    diagnostics = {
        "solvability": float(solvability),
        "orthogonality": abs(energy_product(edges, triple, base.triple)),
        "condition": condition,
        **_transmission_residuals(p, mu_k, triple),
    }
    logger.debug(f"Corrector solve for eigenpair {base.index}: mu_k={mu_k!r}, {diagnostics}")
    return CorrectorSolution(mu_k=mu_k, triple=triple, diagnostics=diagnostics)

