"""
Direct eps-dependent reference solver and convergence-rate studies.

The surrogate is the star graph with the node lumped into a vertex point
mass eps^(1-alpha) m/pi. It reproduces the mass-driven terms of the
expansion and none of the geometric jump terms.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..models.graph import StarGraph
from ..models.regime import AlphaRegime
from ..utils.exceptions import DiscretizationError, MeshResolutionError, ValidationError
from ..utils.formatting import write_csv
from .base import BaseService
from .expansion import mass_chain_coefficient
from .limit_spectrum import (
    DEFAULT_POINTS_PER_EDGE,
    DiscreteGraphSystem,
    assemble_discrete,
    discrete_eigenvalues,
    solve_discrete,
    solve_limit_spectrum,
)

logger = logging.getLogger(__name__)

MIN_RATE_SAMPLES = 4
MIN_DECADES = 2.0
DISCRETIZATION_SHARE = 0.1
BOUND_TOLERANCE = 1e-9
MAX_EPSILON = 0.5
ORACLE_COLUMNS = ("eps", "n", "lambda", "lambda_minus_Lambda", "predicted", "residual")


@dataclass(frozen=True)
class SurrogateSystem:
    """
    Discretized surrogate at one eps.

    Attributes:
        eps: Thin parameter
        regime: Regime of the node density
        system: P1 system with the lumped vertex mass
        node_offset: Whether edges start at eps*l0
    """

    eps: float
    regime: AlphaRegime
    system: DiscreteGraphSystem
    node_offset: bool = False

    @property
    def lump(self) -> float:
        return self.system.beta


def vertex_lump(graph: StarGraph, regime: AlphaRegime, eps: float) -> float:
    """eps^(1-alpha) m/pi."""
    return eps ** (1.0 - regime.alpha) * graph.mass / math.pi


def build_surrogate(
    graph: StarGraph,
    regime: AlphaRegime,
    eps: float,
    points_per_edge: int = DEFAULT_POINTS_PER_EDGE,
    node_offset: bool = False,
) -> SurrogateSystem:
    """
    Assemble the surrogate at ``eps``.

    Raises:
        ValidationError: If eps is outside (0, 0.5)
        MeshResolutionError: If the node offset is below one grid step
    """
    if not 0.0 < eps < MAX_EPSILON:
        raise ValidationError(f"eps must lie in (0, {MAX_EPSILON}), got {eps}", field="eps", value=eps)
    trim = eps * graph.node.ell0 if node_offset else 0.0
    if node_offset:
        step = min(graph.lengths) / (points_per_edge - 1)
        if trim < step:
            raise MeshResolutionError(
                f"Node offset {trim:.3e} is below the grid step {step:.3e}",
                solver="oracle",
                operation="build_surrogate",
            )
    system = assemble_discrete(
        graph, regime, points_per_edge, beta=vertex_lump(graph, regime, eps), trim=trim
    )
    return SurrogateSystem(eps=eps, regime=regime, system=system, node_offset=node_offset)


def solve_surrogate(
    graph: StarGraph,
    regime: AlphaRegime,
    eps: float,
    count: int,
    points_per_edge: int = DEFAULT_POINTS_PER_EDGE,
    node_offset: bool = False,
) -> np.ndarray:
    """Smallest ``count`` surrogate eigenvalues, ascending."""
    surrogate = build_surrogate(graph, regime, eps, points_per_edge, node_offset)
    values, _ = discrete_eigenvalues(surrogate.system, count)
    return values


@dataclass(frozen=True)
class RateFit:
    """
    Least-squares line through (log eps, log |value|).

    Attributes:
        epsilons: Sample points
        values: Sampled quantity
        slope: Fitted exponent
        intercept: Fitted log prefactor
        residual: Root-mean-square deviation of the fit in log space
    """

    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    slope: float
    intercept: float
    residual: float

    @property
    def prefactor(self) -> float:
        return math.copysign(math.exp(self.intercept), self.values[-1])

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "samples": [[e, v] for e, v in zip(self.epsilons, self.values, strict=True)],
        }


def fit_rate(epsilons: Sequence[float], values: Sequence[float]) -> RateFit:
    """
    Fit |value| ~ C eps^slope.

    Raises:
        ValidationError: With fewer than 4 samples or less than 2 decades
    """
    eps = np.asarray(epsilons, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(eps) < MIN_RATE_SAMPLES:
        raise ValidationError(
            f"Rate fits need at least {MIN_RATE_SAMPLES} samples, got {len(eps)}",
            field="eps",
            value=len(eps),
        )
    if math.log10(eps.max() / eps.min()) < MIN_DECADES - 1e-12:
        raise ValidationError(
            f"Rate fits need samples spanning {MIN_DECADES:g} decades", field="eps"
        )
    x, y = np.log(eps), np.log(np.abs(vals))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return RateFit(
        epsilons=tuple(eps.tolist()),
        values=tuple(vals.tolist()),
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
    )


@dataclass
class RateStudy:
    """
    Convergence of one surrogate eigenvalue towards its limit.

    Attributes:
        n: Eigenvalue index
        regime: Regime of the node density
        limit: Lambda_n from the secular solver
        predicted_coefficient: Closed-form coefficient of eps^(1-alpha)
        fit: Fit of lambda_n(eps) - Lambda_n
        residual_fit: Fit of the residual after the first correction, if any
        prefactor: Estimated coefficient of eps^(1-alpha)
        rows: CSV rows (eps, n, lambda, lambda - Lambda, predicted, residual)
    """

    n: int
    regime: AlphaRegime
    limit: float
    predicted_coefficient: float
    fit: RateFit
    residual_fit: RateFit | None
    prefactor: float
    rows: list[list] = field(default_factory=list)

    @property
    def relative_prefactor_error(self) -> float:
        if self.predicted_coefficient == 0.0:
            return abs(self.prefactor)
        return abs(self.prefactor / self.predicted_coefficient - 1.0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.regime.to_dict(),
            "limit": self.limit,
            "predicted_coefficient": self.predicted_coefficient,
            "prefactor": self.prefactor,
            "relative_prefactor_error": self.relative_prefactor_error,
            "fit": self.fit.to_dict(),
            "residual_fit": self.residual_fit.to_dict() if self.residual_fit else None,
        }


def _two_term_prefactor(epsilons: np.ndarray, signal: np.ndarray, rate: float) -> float:
    """Coefficient of eps^rate in a least-squares fit by eps^rate and eps^(2 rate)."""
    basis = np.column_stack([epsilons**rate, epsilons ** (2.0 * rate)])
    scale = np.max(np.abs(basis), axis=0)
    coefficients, *_ = np.linalg.lstsq(basis / scale, signal, rcond=None)
    return float(coefficients[0] / scale[0])


class OracleService(BaseService):
    """Surrogate sweeps, rate studies and bounds reports."""

    def __init__(self, max_workers: int = 4, points_per_edge: int = DEFAULT_POINTS_PER_EDGE):
        super().__init__()
        self.max_workers = max_workers
        self.points_per_edge = points_per_edge

    def _do_initialize(self) -> None:
        logger.debug(f"Oracle ready: {self.points_per_edge} points per edge")

    def sweep(
        self,
        graph: StarGraph,
        regime: AlphaRegime,
        epsilons: Sequence[float],
        count: int,
        node_offset: bool = False,
        points_per_edge: int | None = None,
    ) -> np.ndarray:
        """Eigenvalues of shape (len(epsilons), count), solved concurrently."""
        self.initialize()
        points = points_per_edge or self.points_per_edge

        def job(eps: float) -> np.ndarray:
            return solve_surrogate(graph, regime, eps, count, points, node_offset)

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            return np.array(list(executor.map(job, epsilons)))

    def rate_study(
        self,
        graph: StarGraph,
        regime: AlphaRegime,
        n: int,
        epsilons: Sequence[float],
        node_offset: bool = False,
    ) -> RateStudy:
        """
        Fit lambda_n(eps) - Lambda_n against eps.

        Raises:
            ValidationError: If eps is not decreasing or too short, or alpha = 1
            DiscretizationError: If refining the mesh moves lambda_n by more
                than 10% of the smallest signal
        """
        eps = np.asarray(epsilons, dtype=float)
        if len(eps) < MIN_RATE_SAMPLES:
            raise ValidationError(
                f"Rate studies need at least {MIN_RATE_SAMPLES} values of eps",
                field="eps",
                value=len(eps),
            )
        if np.any(np.diff(eps) >= 0):
            raise ValidationError("eps values must be strictly decreasing", field="eps")

        if regime.has_vertex_mass:
            raise ValidationError(
                "The surrogate does not depend on eps when alpha = 1", field="alpha", value=1.0
            )
        pair = solve_limit_spectrum(graph, regime, count=n)[n - 1]
        limit = pair.eigenvalue
        rate = 1.0 - regime.alpha
        coefficient = mass_chain_coefficient(pair, graph.mass)

        values = self.sweep(graph, regime, eps, n, node_offset)[:, n - 1]
        signal = values - limit

        coarse = solve_surrogate(
            graph, regime, eps[-1], n, (self.points_per_edge + 1) // 2, node_offset
        )[n - 1]
        shift = abs(values[-1] - coarse)
        smallest = np.min(np.abs(signal))
        if shift > DISCRETIZATION_SHARE * smallest:
            raise DiscretizationError(
                f"Mesh refinement moves lambda_{n} by {shift:.3e}, "
                f"above {DISCRETIZATION_SHARE:.0%} of the smallest signal {smallest:.3e}",
                solver="oracle",
                operation="rate_study",
            )

        predicted = limit + coefficient * eps**rate
        residual = values - predicted
        fit = fit_rate(eps, signal)
        residual_fit = fit_rate(eps, residual) if coefficient != 0.0 else None
        prefactor = _two_term_prefactor(eps, signal, rate)

        rows = [
            [float(e), n, float(v), float(s), float(p), float(r)]
            for e, v, s, p, r in zip(eps, values, signal, predicted, residual, strict=True)
        ]
        logger.info(
            f"Rate study n={n}, alpha={regime}: slope {fit.slope:.4f}, "
            f"prefactor {prefactor:.6e} vs predicted {coefficient:.6e}"
        )
        return RateStudy(
            n=n,
            regime=regime,
            limit=limit,
            predicted_coefficient=coefficient,
            fit=fit,
            residual_fit=residual_fit,
            prefactor=prefactor,
            rows=rows,
        )

    def bounds_check(
        self,
        graph: StarGraph,
        regime: AlphaRegime,
        epsilons: Sequence[float],
        count: int = 5,
        node_offset: bool = False,
        values: np.ndarray | None = None,
    ) -> dict:
        """
        Lower bound of lambda_1 and upper bounds of lambda_n over a sweep.

        The vertex lump only adds mass, so each lambda_n(eps) lies below the
        n-th eigenvalue of the massless system on the same grid.

        Args:
            values: Eigenvalues of an earlier sweep over ``epsilons``
        """
        if values is None:
            values = self.sweep(graph, regime, epsilons, count, node_offset)
        count = values.shape[1]
        trims = [eps * graph.node.ell0 if node_offset else 0.0 for eps in epsilons]
        massless = {
            trim: discrete_eigenvalues(
                assemble_discrete(graph, regime, self.points_per_edge, beta=0.0, trim=trim), count
            )[0]
            for trim in set(trims)
        }
        ceilings = np.array([massless[trim] for trim in trims])
        reference = solve_limit_spectrum(graph, AlphaRegime.one(), count=1)[0].eigenvalue
        lower = float(values[:, 0].min())
        report = {
            "alpha": regime.to_dict(),
            "eps": [float(e) for e in epsilons],
            "node_offset": node_offset,
            "lambda1_min": lower,
            "lambda_max": values.max(axis=0).tolist(),
            "lower_reference": 0.1 * reference,
            "upper_reference": ceilings.max(axis=0).tolist(),
            "bounded_below": lower > 0.1 * reference,
            "bounded_above": bool(np.all(values <= ceilings * (1.0 + BOUND_TOLERANCE))),
            "ordered": bool(np.all(np.diff(values, axis=1) >= 0.0)),
        }
        logger.info(
            f"Bounds over {len(epsilons)} values of eps: lambda_1 >= {lower:.6g}, "
            f"bounded above: {report['bounded_above']}"
        )
        return report

    def eigenvector_deviation(
        self, graph: StarGraph, regime: AlphaRegime, n: int, eps: float
    ) -> list[float]:
        """
        Sup-norm distance per edge between the surrogate eigenvector and W_n.

        Both sides are normalized in the energy product; the surrogate vector
        is signed to match W_n.
        """
        surrogate = build_surrogate(graph, regime, eps, self.points_per_edge)
        grid = solve_discrete(surrogate.system, n)[n - 1].triple
        limit = solve_limit_spectrum(graph, regime, count=n)[n - 1].triple

        points = self.points_per_edge
        samples = [(g.values, w.sample(points).values) for g, w in zip(grid, limit, strict=True)]
        overlap = sum(float(a @ b) for a, b in samples)
        sign = 1.0 if overlap >= 0.0 else -1.0
        return [float(np.max(np.abs(sign * a - b))) for a, b in samples]

    @staticmethod
    def write_rows(path: Path, study: RateStudy) -> Path:
        return write_csv(path, ORACLE_COLUMNS, study.rows)
