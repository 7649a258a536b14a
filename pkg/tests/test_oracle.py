"""Tests for the reference solver and the rate studies."""

import math

import numpy as np
import pytest

from conftest import make_graph
from thin_junction.models.regime import AlphaRegime
from thin_junction.services.expansion import mass_chain_coefficient
from thin_junction.services.limit_spectrum import (
    assemble_discrete,
    discrete_eigenvalues,
    solve_limit_spectrum,
)
from thin_junction.services.oracle import (
    ORACLE_COLUMNS,
    OracleService,
    build_surrogate,
    fit_rate,
    solve_surrogate,
    vertex_lump,
)
from thin_junction.utils.exceptions import MeshResolutionError, ValidationError
from thin_junction.utils.formatting import read_csv

POINTS = 201
EPSILONS = [0.2, 0.06, 0.02, 0.006, 0.002]


@pytest.fixture
def oracle():
    return OracleService(max_workers=2, points_per_edge=POINTS)


class TestSurrogate:
    """Test the lumped-mass surrogate."""

    def test_vertex_lump(self, symmetric_graph):
        """Test eps^(1-alpha) m/pi."""
        lump = vertex_lump(symmetric_graph, AlphaRegime.rational(1, 2), 0.04)

        assert lump == pytest.approx(0.2 * 0.02 / math.pi)

    def test_regime_one_is_the_limit_operator(self, symmetric_graph):
        """Test that for alpha = 1 the surrogate is the discrete limit problem."""
        regime = AlphaRegime.one()

        values = solve_surrogate(symmetric_graph, regime, 0.01, 3, POINTS)

        expected, _ = discrete_eigenvalues(assemble_discrete(symmetric_graph, regime, POINTS), 3)
        np.testing.assert_allclose(values, expected, rtol=1e-12)

    def test_massless_node(self):
        """Test that without mass the eigenvalues do not depend on eps."""
        graph = make_graph(mass=0.0)

        first = solve_surrogate(graph, AlphaRegime.zero(), 0.2, 3, POINTS)
        second = solve_surrogate(graph, AlphaRegime.zero(), 0.002, 3, POINTS)

        np.testing.assert_allclose(first, second, rtol=1e-12)

    def test_pole_modes_ignore_the_lump(self, oracle, symmetric_graph):
        """Test that modes vanishing at the vertex do not feel the node mass."""
        values = oracle.sweep(symmetric_graph, AlphaRegime.zero(), [0.2, 0.002], 3)

        np.testing.assert_allclose(values[0, 1:], values[1, 1:], rtol=1e-10)
        assert values[0, 0] < values[1, 0]

    def test_eps_range(self, symmetric_graph):
        """Test the eps validation."""
        with pytest.raises(ValidationError):
            build_surrogate(symmetric_graph, AlphaRegime.zero(), 0.5, POINTS)
        with pytest.raises(ValidationError):
            build_surrogate(symmetric_graph, AlphaRegime.zero(), 0.0, POINTS)

    def test_node_offset(self, symmetric_graph):
        """Test edges shortened by eps*l0."""
        regime = AlphaRegime.zero()

        trimmed = solve_surrogate(symmetric_graph, regime, 0.2, 1, POINTS, node_offset=True)
        full = solve_surrogate(symmetric_graph, regime, 0.2, 1, POINTS)

        assert trimmed[0] > full[0]
        with pytest.raises(MeshResolutionError):
            build_surrogate(symmetric_graph, regime, 0.01, POINTS, node_offset=True)


class TestFitRate:
    """Test the log-log fits."""

    def test_power_law(self):
        """Test an exact power law."""
        eps = np.array([0.1, 0.03, 0.01, 0.003, 0.001])

        fit = fit_rate(eps, -3.0 * eps**0.5)

        assert fit.slope == pytest.approx(0.5)
        assert fit.prefactor == pytest.approx(-3.0)
        assert fit.residual < 1e-12

    def test_too_few_samples(self):
        """Test the sample count."""
        with pytest.raises(ValidationError):
            fit_rate([0.1, 0.01, 0.001], [1.0, 0.1, 0.01])

    def test_too_narrow(self):
        """Test the span of the samples."""
        with pytest.raises(ValidationError):
            fit_rate([0.1, 0.05, 0.02, 0.01], [1.0, 0.5, 0.2, 0.1])


class TestRateStudy:
    """Test convergence towards the limit spectrum."""

    def test_first_order_rate(self, oracle, symmetric_graph):
        """Test that lambda_1(eps) - Lambda_1 ~ -(Lambda W(0))^2 m/pi eps for alpha = 0."""
        study = oracle.rate_study(symmetric_graph, AlphaRegime.zero(), 1, EPSILONS)

        pair = solve_limit_spectrum(symmetric_graph, AlphaRegime.zero(), 1)[0]
        assert study.predicted_coefficient == pytest.approx(
            mass_chain_coefficient(pair, symmetric_graph.mass)
        )
        assert study.predicted_coefficient < 0.0
        assert study.fit.slope == pytest.approx(1.0, abs=0.05)
        assert study.relative_prefactor_error < 0.05
        assert study.residual_fit is not None
        assert len(study.rows) == len(EPSILONS)

    def test_rows_and_document(self, oracle, symmetric_graph, tmp_path):
        """Test the CSV rows and the study document."""
        study = oracle.rate_study(symmetric_graph, AlphaRegime.zero(), 1, EPSILONS)

        rows = read_csv(oracle.write_rows(tmp_path / "oracle.csv", study))
        data = study.to_dict()

        assert tuple(rows[0]) == ORACLE_COLUMNS
        assert float(rows[-1]["eps"]) == pytest.approx(0.002)
        assert data["alpha"] == {"regime": "zero"}
        assert data["fit"]["slope"] == study.fit.slope

    def test_regime_one_refused(self, oracle, symmetric_graph):
        """Test that alpha = 1 has no eps dependence to study."""
        with pytest.raises(ValidationError):
            oracle.rate_study(symmetric_graph, AlphaRegime.one(), 1, EPSILONS)

    def test_eps_must_decrease(self, oracle, symmetric_graph):
        """Test the order of the samples."""
        with pytest.raises(ValidationError):
            oracle.rate_study(symmetric_graph, AlphaRegime.zero(), 1, sorted(EPSILONS))

    def test_too_few_samples(self, oracle, symmetric_graph):
        """Test the sample count."""
        with pytest.raises(ValidationError):
            oracle.rate_study(symmetric_graph, AlphaRegime.zero(), 1, EPSILONS[:3])


class TestReports:
    """Test the bounds and eigenvector reports."""

    def test_bounds_check(self, oracle, symmetric_graph):
        """Test the lower bound, the upper bound and the ordering over a sweep."""
        report = oracle.bounds_check(symmetric_graph, AlphaRegime.zero(), [0.1, 0.01], count=4)

        massless, _ = discrete_eigenvalues(
            assemble_discrete(symmetric_graph, AlphaRegime.zero(), POINTS), 4
        )
        assert report["ordered"] is True
        assert report["bounded_below"] is True
        assert report["bounded_above"] is True
        assert len(report["lambda_max"]) == 4
        np.testing.assert_allclose(report["upper_reference"], massless, rtol=1e-12)

    def test_upper_bound_fractional_regime(self, oracle, symmetric_graph):
        """Test that the lump lowers lambda_1 and leaves the pole modes at the ceiling."""
        report = oracle.bounds_check(
            symmetric_graph, AlphaRegime.rational(1, 2), [0.1, 0.01], count=3
        )

        ceiling = report["upper_reference"]
        assert report["bounded_above"] is True
        assert report["lambda_max"][0] < ceiling[0]
        np.testing.assert_allclose(report["lambda_max"][1:], ceiling[1:], rtol=1e-10)

    def test_upper_bound_with_node_offset(self, oracle, symmetric_graph):
        """Test that shortened edges raise the ceiling."""
        report = oracle.bounds_check(
            symmetric_graph, AlphaRegime.zero(), [0.2, 0.1], count=2, node_offset=True
        )

        full, _ = discrete_eigenvalues(
            assemble_discrete(symmetric_graph, AlphaRegime.zero(), POINTS), 2
        )
        assert report["node_offset"] is True
        assert report["bounded_above"] is True
        assert report["upper_reference"][0] > full[0]

    def test_unbounded_sweep_detected(self, oracle, symmetric_graph):
        """Test that an eigenvalue above the massless ceiling fails the check."""
        regime = AlphaRegime.zero()
        epsilons = [0.1, 0.01]
        values = oracle.sweep(symmetric_graph, regime, epsilons, 3)
        values[1, -1] *= 2.0

        report = oracle.bounds_check(symmetric_graph, regime, epsilons, values=values)

        assert report["bounded_above"] is False
        assert report["ordered"] is True

    def test_eigenvector_deviation(self, oracle, asymmetric_graph):
        """Test that the surrogate eigenvector approaches W_n."""
        deviation = oracle.eigenvector_deviation(asymmetric_graph, AlphaRegime.zero(), 1, 0.001)

        assert len(deviation) == 3
        assert max(deviation) < 1e-2


@pytest.mark.parametrize(
    "regime",
    [AlphaRegime.rational(3, 10), AlphaRegime.rational(1, 2), AlphaRegime.rational(4, 5)],
    ids=str,
)
def test_fractional_rate_law(regime):
    """Test lambda_1(eps) - Lambda_1 ~ mu eps^(1-alpha) on the default mesh."""
    graph = make_graph(lengths=(1.0, 1.4, 1.9), radii=(0.1, 0.12, 0.08), mass=0.005)
    epsilons = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4]

    study = OracleService(max_workers=2).rate_study(graph, regime, 1, epsilons)

    assert study.fit.slope == pytest.approx(1.0 - regime.alpha, abs=0.05)
    assert study.relative_prefactor_error < 0.01
