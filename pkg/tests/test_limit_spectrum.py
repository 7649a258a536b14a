"""Tests for the limit spectral problem."""

import math

import numpy as np
import pytest

from conftest import make_graph
from thin_junction.models.graph import EdgeSpec, SampledRadius, StarGraph
from thin_junction.models.regime import AlphaRegime
from thin_junction.services.limit_spectrum import (
    SecularEquation,
    assemble_discrete,
    discrete_eigenvalues,
    secular_eval,
    solve_limit_spectrum,
    write_spectrum,
)
from thin_junction.utils.exceptions import PoleProximityError, ValidationError
from thin_junction.utils.formatting import read_csv, read_json


class TestSecularSpectrum:
    """Test the secular path on constant cross-sections."""

    def test_symmetric_star(self, symmetric_graph):
        """Test the closed-form spectrum of three equal edges."""
        pairs = solve_limit_spectrum(symmetric_graph, AlphaRegime.zero(), 4)

        np.testing.assert_allclose(
            [pair.eigenvalue for pair in pairs],
            [math.pi**2 / 4, math.pi**2, math.pi**2, 9 * math.pi**2 / 4],
            rtol=1e-12,
        )
        assert not pairs[0].degenerate
        assert pairs[1].degenerate and pairs[2].degenerate
        assert pairs[1].multiplicity == 2
        assert pairs[1].pole_type and pairs[2].pole_type
        assert not pairs[3].pole_type

    def test_invariants(self, asymmetric_graph):
        """Test normalization, sign, continuity, Kirchhoff and Dirichlet conditions."""
        for regime in (AlphaRegime.zero(), AlphaRegime.one()):
            for pair in solve_limit_spectrum(asymmetric_graph, regime, 5):
                pair.check(asymmetric_graph, tolerance=1e-8)

    def test_pole_mode_vertex_value(self, symmetric_graph):
        """Test that the pole modes vanish at the vertex."""
        pairs = solve_limit_spectrum(symmetric_graph, AlphaRegime.zero(), 3)

        assert abs(pairs[1].vertex_value) < 1e-12
        assert abs(pairs[0].vertex_value) > 1.0

    def test_vertex_mass_lowers_eigenvalues(self, asymmetric_graph):
        """Test that the mass of regime One lowers every non-pole eigenvalue."""
        zero = solve_limit_spectrum(asymmetric_graph, AlphaRegime.zero(), 3)
        one = solve_limit_spectrum(asymmetric_graph, AlphaRegime.one(), 3)

        for a, b in zip(zero, one, strict=True):
            assert b.eigenvalue < a.eigenvalue

    def test_massless_node_regimes_agree(self):
        """Test that regime One without mass is regime zero."""
        graph = make_graph(lengths=(1.0, 1.3, 1.7), mass=0.0)

        zero = solve_limit_spectrum(graph, AlphaRegime.zero(), 3)
        one = solve_limit_spectrum(graph, AlphaRegime.one(), 3)

        np.testing.assert_allclose(
            [p.eigenvalue for p in one], [p.eigenvalue for p in zero], rtol=1e-13
        )

    def test_secular_eval(self, symmetric_graph):
        """Test evaluation at a root, at a pole and at mu <= 0."""
        eq = SecularEquation.from_graph(symmetric_graph, AlphaRegime.zero())

        assert abs(secular_eval(eq, math.pi**2 / 4)) < 1e-14
        with pytest.raises(PoleProximityError):
            secular_eval(eq, math.pi**2)
        with pytest.raises(ValidationError):
            secular_eval(eq, 0.0)

    def test_count_validation(self, symmetric_graph):
        """Test that at least one eigenpair is requested."""
        with pytest.raises(ValidationError):
            solve_limit_spectrum(symmetric_graph, AlphaRegime.zero(), 0)


class TestDiscreteSpectrum:
    """Test the finite-element path."""

    def test_grid_matches_secular(self, asymmetric_graph):
        """Test agreement of the two paths."""
        regime = AlphaRegime.one()
        secular = solve_limit_spectrum(asymmetric_graph, regime, 3)
        grid = solve_limit_spectrum(asymmetric_graph, regime, 3, points_per_edge=801, method="grid")

        np.testing.assert_allclose(
            [p.eigenvalue for p in grid], [p.eigenvalue for p in secular], rtol=1e-4
        )
        for a, b in zip(grid, secular, strict=True):
            assert a.vertex_value == pytest.approx(b.vertex_value, rel=1e-3)

    def test_minimum_points(self, asymmetric_graph):
        """Test the grid size limit."""
        with pytest.raises(ValidationError):
            assemble_discrete(asymmetric_graph, AlphaRegime.zero(), 15)

    def test_vertex_mass_in_mass_matrix(self, asymmetric_graph):
        """Test that regime One adds m/pi to the vertex diagonal."""
        zero = assemble_discrete(asymmetric_graph, AlphaRegime.zero(), 101)
        one = assemble_discrete(asymmetric_graph, AlphaRegime.one(), 101)

        difference = (one.mass - zero.mass).toarray()
        assert difference[0, 0] == pytest.approx(asymmetric_graph.mass / math.pi)
        assert np.count_nonzero(difference) == 1

    def test_sampled_radius(self):
        """Test a variable cross-section, solved on the grid only."""
        samples = (0.1, 0.1) + tuple(np.linspace(0.1, 0.14, 17)) + (0.14, 0.14)
        base = make_graph(lengths=(1.0, 1.3, 1.7))
        graph = StarGraph(
            edges=(EdgeSpec(1.0, SampledRadius(samples)), *base.edges[1:]), node=base.node
        )

        pairs = solve_limit_spectrum(graph, AlphaRegime.zero(), 2, points_per_edge=401)

        assert 0.0 < pairs[0].eigenvalue < pairs[1].eigenvalue
        with pytest.raises(ValidationError):
            solve_limit_spectrum(graph, AlphaRegime.zero(), 2, method="secular")

    def test_second_order_convergence(self, symmetric_graph):
        """Test that the grid error of Lambda_1 falls like the square of the step."""
        points = np.array([17, 33, 65, 129, 257])
        errors = [
            discrete_eigenvalues(assemble_discrete(symmetric_graph, AlphaRegime.zero(), p), 1)[0][0]
            - math.pi**2 / 4
            for p in points
        ]

        slope, _ = np.polyfit(np.log(1.0 / (points - 1)), np.log(np.abs(errors)), 1)
        assert slope == pytest.approx(2.0, abs=0.1)

    def test_fine_grid_matches_secular(self, asymmetric_graph):
        """Test the first five eigenvalues of regime One on a fine grid."""
        regime = AlphaRegime.one()

        secular = solve_limit_spectrum(asymmetric_graph, regime, 5)
        grid = solve_limit_spectrum(asymmetric_graph, regime, 5, points_per_edge=10001, method="grid")

        np.testing.assert_allclose(
            [p.eigenvalue for p in grid], [p.eigenvalue for p in secular], rtol=1e-6
        )

    def test_eigenvalues_sorted(self, symmetric_graph):
        """Test the ordering of the discrete eigenvalues."""
        values, vectors = discrete_eigenvalues(
            assemble_discrete(symmetric_graph, AlphaRegime.zero(), 101), 4
        )

        assert np.all(np.diff(values) >= -1e-12)
        assert vectors.shape[1] == 4


class TestWriteSpectrum:
    """Test the spectrum tables."""

    def test_csv(self, tmp_path, symmetric_graph):
        """Test the CSV columns."""
        pairs = solve_limit_spectrum(symmetric_graph, AlphaRegime.zero(), 3)

        rows = read_csv(write_spectrum(tmp_path / "spectrum.csv", pairs, AlphaRegime.zero()))

        assert list(rows[0]) == ["n", "lambda", "W0", "dW0_1", "dW0_2", "dW0_3", "degenerate"]
        assert [row["degenerate"] for row in rows] == ["false", "true", "true"]

    def test_json(self, tmp_path, symmetric_graph):
        """Test the JSON layout."""
        pairs = solve_limit_spectrum(symmetric_graph, AlphaRegime.one(), 2)

        data = read_json(write_spectrum(tmp_path / "spectrum.json", pairs, AlphaRegime.one(), fmt="json"))

        assert data["regime"] == {"regime": "one"}
        assert data["eigenpairs"][0]["n"] == 1
