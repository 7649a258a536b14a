"""Tests for the vertex-corrected edge problems."""

import numpy as np
import pytest

from thin_junction.models.regime import AlphaRegime
from thin_junction.services.corrector import (
    CorrectorProblem,
    fredholm_coefficient,
    homogenize,
    solve_corrector,
    zero_like,
)
from thin_junction.services.limit_spectrum import (
    assemble_discrete,
    solve_discrete,
    solve_limit_spectrum,
)
from thin_junction.utils.exceptions import DegeneracyError


def _weighted_base(graph, pair, c):
    """c h^2 W on every edge."""
    return tuple((c * edge.h0**2) * f for edge, f in zip(graph.edges, pair.triple, strict=True))


class TestAnalyticCorrector:
    """Test the closed-form path."""

    def test_forcing_by_the_eigenfunction(self, asymmetric_graph):
        """Test that forcing c h^2 W gives mu_k = -c."""
        pair = solve_limit_spectrum(asymmetric_graph, AlphaRegime.zero(), 1)[0]
        problem = CorrectorProblem(
            graph=asymmetric_graph, base=pair, rhs=_weighted_base(asymmetric_graph, pair, 0.7)
        )

        solution = solve_corrector(problem)

        assert solution.mu_k == pytest.approx(-0.7, rel=1e-10)
        assert solution.diagnostics["orthogonality"] < 1e-10
        assert solution.diagnostics["dirichlet"] < 1e-10

    @pytest.mark.parametrize("regime", [AlphaRegime.zero(), AlphaRegime.one()])
    def test_solvability_with_jumps(self, asymmetric_graph, regime):
        """Test that the solve reproduces the solvability formula."""
        pair = solve_limit_spectrum(asymmetric_graph, regime, 2)[1]
        problem = CorrectorProblem(
            graph=asymmetric_graph,
            base=pair,
            rhs=tuple(zero_like(f) for f in pair.triple),
            jumps=(0.03, -0.02),
            flux_datum=0.15,
            beta=asymmetric_graph.vertex_mass_coefficient(regime.has_vertex_mass),
        )

        solution = solve_corrector(problem)

        assert solution.mu_k == pytest.approx(fredholm_coefficient(problem), rel=1e-9)
        for name in ("solvability", "continuity", "flux", "dirichlet"):
            assert solution.diagnostics[name] < 1e-9, name

    def test_homogenize(self, asymmetric_graph):
        """Test that homogenization removes the jumps into the flux datum."""
        pair = solve_limit_spectrum(asymmetric_graph, AlphaRegime.zero(), 1)[0]
        problem = CorrectorProblem(
            graph=asymmetric_graph,
            base=pair,
            rhs=tuple(zero_like(f) for f in pair.triple),
            jumps=(0.5, 0.0),
        )

        reduced = homogenize(problem)

        assert reduced.jumps == (0.0, 0.0)
        edge = asymmetric_graph.edges[1]
        assert reduced.flux_datum == pytest.approx(0.5 * edge.h0**2 / edge.length)
        assert homogenize(reduced) is reduced

    def test_degenerate_base_refused(self, symmetric_graph):
        """Test that a degenerate eigenvalue is refused."""
        pair = solve_limit_spectrum(symmetric_graph, AlphaRegime.zero(), 3)[1]
        problem = CorrectorProblem(
            graph=symmetric_graph, base=pair, rhs=tuple(zero_like(f) for f in pair.triple)
        )

        with pytest.raises(DegeneracyError):
            solve_corrector(problem)


class TestGridCorrector:
    """Test the bordered finite-element path."""

    def test_forcing_by_the_eigenfunction(self, asymmetric_graph):
        """Test mu_k = -c on the grid."""
        system = assemble_discrete(asymmetric_graph, AlphaRegime.zero(), 301)
        pair = solve_discrete(system, 1)[0]
        rhs = tuple(
            (0.7 * edge.h0**2) * f for edge, f in zip(asymmetric_graph.edges, pair.triple, strict=True)
        )

        solution = solve_corrector(CorrectorProblem(graph=asymmetric_graph, base=pair, rhs=rhs))

        assert solution.mu_k == pytest.approx(-0.7, rel=1e-8)
        assert solution.diagnostics["orthogonality"] < 1e-8

    def test_matches_analytic_path(self, asymmetric_graph):
        """Test agreement of the grid and closed-form solves with jumps."""
        regime = AlphaRegime.zero()
        analytic_pair = solve_limit_spectrum(asymmetric_graph, regime, 1)[0]
        grid_pair = solve_discrete(assemble_discrete(asymmetric_graph, regime, 1201), 1)[0]

        def solve(pair):
            problem = CorrectorProblem(
                graph=asymmetric_graph,
                base=pair,
                rhs=tuple(zero_like(f) for f in pair.triple),
                jumps=(0.03, -0.02),
                flux_datum=0.15,
            )
            return solve_corrector(problem)

        analytic, grid = solve(analytic_pair), solve(grid_pair)

        assert grid.mu_k == pytest.approx(analytic.mu_k, rel=1e-3)
        x = np.linspace(0.0, asymmetric_graph.edges[2].length, 11)
        expected = analytic.triple[2].value(x)
        np.testing.assert_allclose(
            grid.triple[2].value(x), expected, atol=1e-3 * np.max(np.abs(expected))
        )
