"""Tests for the asymptotic expansion."""

import math
from unittest.mock import patch

import pytest

from conftest import make_graph
from thin_junction.models.node_constants import InnerRequest, NodeConstants
from thin_junction.models.regime import AlphaRegime
from thin_junction.services.constants_provider import TableConstantsProvider
from thin_junction.services.expansion import (
    ExpansionService,
    SeriesBuilder,
    build_lattice,
    evaluate_eigenfunction,
    evaluate_series,
    expand,
    expand_alpha0,
    expand_alpha1,
    expand_fractional,
    first_order_alpha0,
    first_order_alpha1,
    mass_chain_coefficient,
)
from thin_junction.services.limit_spectrum import SecularEquation, secular_spectrum
from thin_junction.utils.exceptions import (
    DegeneracyError,
    MissingConstantsError,
    SolverError,
    ValidationError,
)

IRRATIONAL = 1 / math.sqrt(2)

FIRST_ORDER_TABLES = NodeConstants(
    delta={(1, 0, 2): 0.03, (1, 0, 3): -0.02},
    mass={(1, 0): 0.004},
)
DELTA_ONLY = {(1, 0, 2): 0.03, (1, 0, 3): -0.02, (2, 0, 2): 0.01, (2, 0, 3): 0.02}
ZERO_TABLES = NodeConstants(
    delta={(1, 0, 2): 0.0, (1, 0, 3): 0.0},
    mass={(1, 0): 0.0},
)


def _graph(constants: NodeConstants | None = None, **changes):
    data = {"lengths": (1.0, 1.4, 1.9), "radii": (0.1, 0.12, 0.08)}
    data.update(changes)
    return make_graph(constants=constants, **data)


class TestLattice:
    """Test the exponent lattice."""

    def test_integer_regimes(self):
        """Test that alpha = 0 and alpha = 1 give the integers."""
        for regime in (AlphaRegime.zero(), AlphaRegime.one()):
            assert build_lattice(regime, 3).exponents == [0.0, 1.0, 2.0, 3.0]

    def test_irrational(self):
        """Test the counts k - p*alpha for alpha = 1/sqrt(2)."""
        regime = AlphaRegime.irrational(IRRATIONAL)

        second = build_lattice(regime, 2)
        third = build_lattice(regime, 3)

        assert len(second) == 6
        assert len(third) == 11
        assert second.exponents == sorted(second.exponents)
        assert [entry.label for entry in second][:3] == ["0", "1-1a", "2-2a"]

    def test_rational(self):
        """Test that alpha = 1/3 collapses to multiples of 1/3."""
        lattice = build_lattice(AlphaRegime.rational(1, 3), 1)

        assert [entry.label for entry in lattice] == ["0", "1/3", "2/3", "1"]
        # smallest generating (k, p) of 1/3 is 1 - 2/3
        assert lattice.entry((1,)).provenance == (1, 2)
        assert lattice.entry((3,)).provenance == (1, 0)

    def test_negative_order(self):
        """Test the order validation."""
        with pytest.raises(ValidationError):
            build_lattice(AlphaRegime.zero(), -1)


class TestFirstOrder:
    """Test the recursion against the closed forms of mu_1."""

    def test_alpha0(self):
        """Test alpha = 0."""
        graph = _graph(FIRST_ORDER_TABLES)

        series = expand_alpha0(graph, 1, 1)

        expected = first_order_alpha0(graph, series.pair, (0.03, -0.02))
        assert series.coefficient((1,)) == pytest.approx(expected, rel=1e-9)
        assert series.inner[(1,)].source == "config"

    def test_alpha1(self):
        """Test alpha = 1 with the mass remainder."""
        graph = _graph(FIRST_ORDER_TABLES)

        series = expand_alpha1(graph, 2, 1)

        expected = first_order_alpha1(graph, series.pair, (0.03, -0.02), mass_remainder=0.004)
        assert series.coefficient((1,)) == pytest.approx(expected, rel=1e-9)

    def test_alpha0_geometric_term(self):
        """Test that a massless node without jumps gives l0 (Lambda W(0))^2 sum h^2."""
        graph = _graph(ZERO_TABLES, mass=0.0)

        series = expand_alpha0(graph, 1, 1)

        pair = series.pair
        expected = graph.node.ell0 * (pair.eigenvalue * pair.vertex_value) ** 2 * sum(
            graph.vertex_weights
        )
        assert series.coefficient((1,)) == pytest.approx(expected, rel=1e-9)


class TestMassChain:
    """Test the eps^(1-alpha) coefficient of the fractional regimes."""

    @pytest.mark.parametrize(
        "regime, key",
        [(AlphaRegime.rational(1, 2), (1,)), (AlphaRegime.irrational(IRRATIONAL), (1, 1))],
    )
    def test_mass_chain(self, regime, key):
        """Test mu_(1-alpha) = -(Lambda W(0))^2 m/pi."""
        graph = _graph(ZERO_TABLES)

        series = expand_fractional(graph, regime, 1, 1)

        expected = mass_chain_coefficient(series.pair, graph.mass)
        assert series.coefficient(key) == pytest.approx(expected, rel=1e-9)
        assert series.inner[key].source == "trivial"

    def test_secular_derivative(self):
        """Test the chain coefficient against the slope of the lumped secular root."""
        graph = _graph()
        regime = AlphaRegime.zero()
        series = expand_fractional(graph, AlphaRegime.rational(1, 2), 1, 0)
        beta = 1e-7

        base = SecularEquation.from_graph(graph, regime, beta=0.0)
        lumped = SecularEquation.from_graph(graph, regime, beta=beta)
        slope = (
            secular_spectrum(lumped, regime, 1)[0].eigenvalue
            - secular_spectrum(base, regime, 1)[0].eigenvalue
        ) / beta

        # beta = tau m / pi, so d lambda / d tau = slope * m / pi
        expected = mass_chain_coefficient(series.pair, graph.mass)
        assert slope * graph.mass / math.pi == pytest.approx(expected, rel=1e-4)

    def test_chain_matches_lumped_root_to_third_order(self):
        """Test the pure mass keys against the lumped secular root in tau = eps^(1-alpha)."""
        graph = _graph(ZERO_TABLES)
        series = expand_fractional(graph, AlphaRegime.irrational(IRRATIONAL), 1, 3, strict=False)
        tau = 0.003

        lumped = SecularEquation.from_graph(
            graph, AlphaRegime.zero(), beta=tau * graph.mass / math.pi
        )
        root = secular_spectrum(lumped, AlphaRegime.zero(), 1)[0].eigenvalue

        terms = [series.coefficient((p, p)) * tau**p for p in range(4)]
        errors = [abs(root - sum(terms[: p + 1])) for p in range(1, 4)]
        assert errors[2] < errors[1] < errors[0]
        assert errors[2] < 0.05 * abs(terms[3])

    def test_vanishing_rule(self):
        """Test that coefficients below 1 - alpha vanish."""
        graph = _graph(ZERO_TABLES)

        series = expand_fractional(graph, AlphaRegime.rational(1, 3), 1, 1)

        assert series.coefficient((1,)) == 0.0
        assert series.flags["vanishing_max"] == 0.0
        assert series.coefficient_at(2 / 3) == pytest.approx(
            mass_chain_coefficient(series.pair, graph.mass), rel=1e-9
        )

    def test_not_fractional(self):
        """Test that expand_fractional needs a fractional regime."""
        with pytest.raises(ValidationError):
            expand_fractional(_graph(), AlphaRegime.zero(), 1, 1)


class TestMissingConstants:
    """Test strict and truncating handling of missing constants."""

    def test_strict(self):
        """Test that a missing delta names its table key."""
        with pytest.raises(MissingConstantsError) as excinfo:
            expand_alpha0(_graph(), 1, 1)

        assert excinfo.value.key == "delta_table(1,2)"
        assert excinfo.value.order == "1"

    def test_truncate(self):
        """Test that truncation stops the series at the missing exponent."""
        series = expand_alpha0(_graph(), 1, 2, strict=False)

        assert list(series.mu) == [(0,)]
        assert series.flags["truncated_at"] == "1"
        assert series.flags["missing_key"] == "delta_table(1,2)"

    def test_first_order_without_mass_table(self):
        """Test that mu_1 for alpha = 0 needs only the jumps."""
        graph = _graph(NodeConstants(delta={(1, 0, 2): 0.03, (1, 0, 3): -0.02}))

        series = expand_alpha0(graph, 1, 1)

        expected = first_order_alpha0(graph, series.pair, (0.03, -0.02))
        assert series.coefficient((1,)) == pytest.approx(expected, rel=1e-9)
        assert series.inner[(1,)].mass_remainder is None

    def test_missing_mass_at_consuming_order(self):
        """Test that the mass remainder of exponent 1 is first read at exponent 2."""
        graph = _graph(NodeConstants(delta=DELTA_ONLY))

        with pytest.raises(MissingConstantsError) as excinfo:
            expand_alpha0(graph, 1, 2)

        assert excinfo.value.key == "mass_table(1)"
        assert excinfo.value.order == "2"

    def test_missing_mass_truncates(self):
        """Test that truncation keeps the coefficients below the consuming order."""
        series = expand_alpha0(_graph(NodeConstants(delta=DELTA_ONLY)), 1, 2, strict=False)

        assert list(series.mu) == [(0,), (1,)]
        assert (2,) not in series.inner
        assert series.flags["truncated_at"] == "2"
        assert series.flags["missing_key"] == "mass_table(1)"

    def test_missing_mass_alpha1(self):
        """Test that alpha = 1 reads the mass remainder at its own exponent."""
        graph = _graph(NodeConstants(delta={(1, 0, 2): 0.03, (1, 0, 3): -0.02}))

        with pytest.raises(MissingConstantsError) as excinfo:
            expand_alpha1(graph, 1, 1)

        assert excinfo.value.key == "mass_table(1)"
        assert excinfo.value.order == "1"

    def test_table_provider_sums_rational_keys(self):
        """Test that (k, p) entries sharing an exponent add up."""
        constants = NodeConstants(
            delta={(1, 0, 2): 1.0, (1, 0, 3): 2.0, (2, 2, 2): 0.5, (2, 2, 3): 0.25},
        )
        provider = TableConstantsProvider(constants, AlphaRegime.rational(1, 2), 0.0)
        request = InnerRequest(label="1", provenance=(1, 0))

        inner = provider.inner_constants((2,), request)

        assert inner.delta == (1.5, 2.25)
        assert inner.tails == (None, None, None)


class TestSeries:
    """Test series evaluation and the service."""

    def test_evaluate_series(self):
        """Test the partial sums."""
        graph = _graph(ZERO_TABLES)
        series = expand_fractional(graph, AlphaRegime.rational(1, 2), 1, 1)
        eps = 0.01

        expected = (
            series.coefficient((0,))
            + eps**0.5 * series.coefficient((1,))
            + eps * series.coefficient((2,))
        )
        assert evaluate_series(series, eps) == pytest.approx(expected, rel=1e-14)
        assert evaluate_series(series, eps, up_to=0.5) == pytest.approx(
            expected - eps * series.coefficient((2,)), rel=1e-14
        )
        with pytest.raises(ValidationError):
            evaluate_series(series, 1.5)

    def test_evaluate_eigenfunction(self):
        """Test that order 0 reproduces the limit eigenfunction."""
        series = expand_alpha0(_graph(FIRST_ORDER_TABLES), 1, 1)

        triple = evaluate_eigenfunction(series, 0.01, up_to=0.0, points=51)

        assert triple[0].values[0] == pytest.approx(series.pair.vertex_value)
        assert triple[0].values[-1] == pytest.approx(0.0, abs=1e-12)

    def test_serialization(self, tmp_path):
        """Test the series document."""
        series = expand_alpha0(_graph(FIRST_ORDER_TABLES), 1, 1)

        data = series.to_dict()

        assert data["n"] == 1
        assert set(data["mu"]) == {"0", "1"}
        assert data["flags"]["truncated_at"] is None
        assert series.save(tmp_path / "series.json").exists()

    def test_degenerate_refused(self, symmetric_graph):
        """Test that a degenerate eigenvalue is refused."""
        with pytest.raises(DegeneracyError):
            expand(symmetric_graph, AlphaRegime.zero(), 2, 1)

    def test_expand_many(self):
        """Test concurrent expansion of several eigenvalues."""
        graph = _graph(FIRST_ORDER_TABLES)
        service = ExpansionService(max_workers=2)

        series = service.expand_many(graph, AlphaRegime.zero(), [1, 2, 3], 1)

        assert [s.n for s in series] == [1, 2, 3]
        single = expand_alpha0(graph, 2, 1)
        assert series[1].coefficient((1,)) == pytest.approx(single.coefficient((1,)), rel=1e-12)

    def test_vanishing_failure_is_solver_error(self):
        """Test that a nonzero coefficient below 1 - alpha fails the run."""
        keys = ((1, 2), (1, 1), (1, 0))
        constants = NodeConstants(
            delta={(k, p, i): 0.0 for k, p in keys for i in (2, 3)} | {(1, 2, 2): 0.1},
            mass={key: 0.0 for key in keys},
        )
        graph = _graph(constants)

        # a jump at exponent 1/3 drives mu_(1/3) away from zero
        with patch.object(SeriesBuilder, "_is_inner_nontrivial", return_value=True):
            with pytest.raises(SolverError, match="does not vanish"):
                expand_fractional(graph, AlphaRegime.rational(1, 3), 1, 1)


THIRD_ORDER_TABLES = NodeConstants(
    delta={
        (1, 0, 2): 0.03, (1, 0, 3): -0.02,
        (2, 0, 2): 0.01, (2, 0, 3): 0.02,
        (3, 0, 2): -0.01, (3, 0, 3): 0.005,
    },  # fmt: skip
    mass={(1, 0): 0.004, (2, 0): 0.001, (3, 0): 0.0},
)


@pytest.mark.parametrize("driver", [expand_alpha0, expand_alpha1])
def test_corrector_residuals_to_third_order(driver):
    """Test solvability, orthogonality and transmission of every corrector solve."""
    series = driver(_graph(THIRD_ORDER_TABLES), 1, 3)

    assert set(series.diagnostics) == {(1,), (2,), (3,)}
    scale = max(1.0, *(abs(mu) for mu in series.mu.values()))
    for key, diagnostics in series.diagnostics.items():
        assert diagnostics["solvability"] < 1e-10 * scale, key
        assert diagnostics["orthogonality"] < 1e-10 * scale, key
        for name in ("continuity", "flux", "dirichlet"):
            assert diagnostics[name] < 1e-8 * scale, (key, name)
