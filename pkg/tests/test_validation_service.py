"""Tests for the validation service."""

import pytest

from conftest import config_document
from thin_junction.services.validation_service import ValidationService


@pytest.fixture
def service():
    service = ValidationService()
    service.initialize()
    return service


class TestConfigDocument:
    """Test structural checks of configuration documents."""

    def test_valid_document(self, service):
        """Test that a well-formed document passes every check."""
        results = service.validate_config_document(config_document())

        assert all(result.is_valid for result in results)
        assert len(results) == 3

    def test_not_an_object(self, service):
        """Test a document that is not a JSON object."""
        [result] = service.validate_config_document([1, 2, 3])

        assert not result.is_valid
        assert result.details["error_type"] == "not_object"

    def test_wrong_edge_count(self, service):
        """Test a star with two edges."""
        document = config_document()
        document["edges"] = document["edges"][:2]

        results = service.validate_config_document(document)

        assert results[0].details["error_type"] == "edge_count"

    def test_bad_radius(self, service):
        """Test an edge without a usable radius."""
        document = config_document()
        document["edges"][1]["radius"] = {"linear": [0.1, 0.2]}

        results = service.validate_config_document(document)

        assert not results[0].is_valid
        assert results[0].details["edge"] == 2

    def test_missing_node_field(self, service):
        """Test a node without ell0."""
        document = config_document()
        del document["node"]["ell0"]

        results = service.validate_config_document(document)

        assert results[1].details == {"error_type": "node_field", "field": "ell0"}

    def test_non_numeric_table(self, service):
        """Test a table with a non-numeric entry."""
        document = config_document(delta_table={"(1,2)": "large"})

        results = service.validate_config_document(document)

        assert results[1].details["field"] == "delta_table"

    def test_bad_alpha(self, service):
        """Test alpha blocks."""
        document = config_document()
        document["alpha"] = {"regime": "half"}
        assert not service.validate_config_document(document)[2].is_valid

        document["alpha"] = {"regime": "rational", "m0": 1.5, "n0": 2}
        assert not service.validate_config_document(document)[2].is_valid

        document["alpha"] = {"regime": "irrational", "value": 0.3819660112501051}
        assert service.validate_config_document(document)[2].is_valid


class TestParameters:
    """Test command parameter checks."""

    def test_count(self, service):
        """Test eigenpair counts."""
        assert service.validate_count(1).is_valid
        assert not service.validate_count(0).is_valid

    def test_order(self, service):
        """Test expansion orders."""
        assert service.validate_order(0).is_valid
        assert not service.validate_order(-1).is_valid

    def test_points(self, service):
        """Test grid sizes."""
        assert service.validate_points(16).is_valid
        assert not service.validate_points(15).is_valid

    def test_epsilons(self, service):
        """Test eps ranges."""
        assert service.validate_epsilons([0.1, 0.01]).is_valid
        assert not service.validate_epsilons([]).is_valid

        result = service.validate_epsilons([0.1, 0.5, 0.0])
        assert not result.is_valid
        assert result.details["values"] == [0.5, 0.0]

    def test_rate_samples(self, service):
        """Test the sample count and span of rate fits."""
        assert service.validate_rate_samples([0.1, 0.03, 0.01, 0.001]).is_valid

        too_few = service.validate_rate_samples([0.1, 0.01, 0.001])
        assert too_few.details["error_type"] == "rate_samples"

        too_narrow = service.validate_rate_samples([0.1, 0.05, 0.02, 0.01])
        assert too_narrow.details["error_type"] == "rate_span"
