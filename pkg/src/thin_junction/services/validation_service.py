"""Validation service for configuration documents and run parameters."""

import math
from collections.abc import Sequence
from numbers import Real
from typing import Any

from ..models.regime import RegimeKind
from ..services.base import ValidationResult, ValidationServiceInterface

MIN_POINTS_PER_EDGE = 16
MAX_EPSILON = 0.5


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool) and math.isfinite(value)


class ValidationService(ValidationServiceInterface):
    """Service for validating configuration documents and command parameters."""

    REQUIRED_NODE_FIELDS = ("ell0", "mass_integral", "node_volume")
    TABLE_FIELDS = ("delta_table", "mass_table", "tail_table")

    def _do_initialize(self) -> None:
        """Perform service-specific initialization."""
        # No specific initialization needed for validation service
        pass

    def validate_config_document(self, data: Any) -> list[ValidationResult]:
        """
        Check the structure of a configuration document.

        Value ranges (edge lengths, ell0, coprimality, ...) are checked when
        the models are constructed; this only checks that the document has
        the documented shape.

        Returns:
            One ValidationResult per check, failures included
        """
        if not isinstance(data, dict):
            return [
                ValidationResult(
                    is_valid=False,
                    message="Configuration must be a JSON object",
                    details={"error_type": "not_object"},
                )
            ]

        results = [self._validate_edges(data.get("edges"))]
        results.append(self._validate_node(data.get("node")))
        if "alpha" in data:
            results.append(self._validate_alpha(data["alpha"]))
        return results

    def _validate_edges(self, edges: Any) -> ValidationResult:
        if not isinstance(edges, list) or len(edges) != 3:
            return ValidationResult(
                is_valid=False,
                message="'edges' must be a list of exactly 3 edges",
                details={"error_type": "edge_count"},
            )

        for index, edge in enumerate(edges, start=1):
            if not isinstance(edge, dict) or not _is_number(edge.get("length")):
                return ValidationResult(
                    is_valid=False,
                    message=f"Edge {index} needs a numeric 'length'",
                    details={"error_type": "edge_length", "edge": index},
                )
            radius = edge.get("radius")
            if not isinstance(radius, dict):
                return ValidationResult(
                    is_valid=False,
                    message=f"Edge {index} needs a 'radius' object",
                    details={"error_type": "edge_radius", "edge": index},
                )
            if "const" in radius:
                valid = _is_number(radius["const"])
            elif "samples" in radius:
                samples = radius["samples"]
                valid = isinstance(samples, list) and all(_is_number(v) for v in samples)
            else:
                valid = False
            if not valid:
                return ValidationResult(
                    is_valid=False,
                    message=f"Edge {index} radius must be {{'const': h}} or {{'samples': [...]}}",
                    details={"error_type": "edge_radius", "edge": index},
                )

        return ValidationResult(is_valid=True, message="Edges are well-formed")

    def _validate_node(self, node: Any) -> ValidationResult:
        if not isinstance(node, dict):
            return ValidationResult(
                is_valid=False,
                message="'node' must be an object",
                details={"error_type": "node_missing"},
            )

        for name in self.REQUIRED_NODE_FIELDS:
            if not _is_number(node.get(name)):
                return ValidationResult(
                    is_valid=False,
                    message=f"node.{name} must be a number",
                    details={"error_type": "node_field", "field": name},
                )

        for table in self.TABLE_FIELDS:
            entries = node.get(table, {})
            if not isinstance(entries, dict) or not all(_is_number(v) for v in entries.values()):
                return ValidationResult(
                    is_valid=False,
                    message=f"node.{table} must map keys to numbers",
                    details={"error_type": "node_table", "field": table},
                )

        bounds = node.get("density_bounds")
        if bounds is not None and (
            not isinstance(bounds, list) or len(bounds) != 2 or not all(map(_is_number, bounds))
        ):
            return ValidationResult(
                is_valid=False,
                message="node.density_bounds must be [c0, c1]",
                details={"error_type": "node_field", "field": "density_bounds"},
            )

        return ValidationResult(is_valid=True, message="Node is well-formed")

    def _validate_alpha(self, alpha: Any) -> ValidationResult:
        kinds = {kind.value for kind in RegimeKind}
        if not isinstance(alpha, dict) or alpha.get("regime") not in kinds:
            return ValidationResult(
                is_valid=False,
                message=f"alpha.regime must be one of {sorted(kinds)}",
                details={"error_type": "alpha_regime"},
            )

        regime = alpha["regime"]
        if regime == RegimeKind.IRRATIONAL.value and not _is_number(alpha.get("value")):
            return ValidationResult(
                is_valid=False,
                message="Irrational alpha needs a numeric 'value'",
                details={"error_type": "alpha_value"},
            )
        if regime == RegimeKind.RATIONAL.value and not (
            isinstance(alpha.get("m0"), int) and isinstance(alpha.get("n0"), int)
        ):
            return ValidationResult(
                is_valid=False,
                message="Rational alpha needs integer 'm0' and 'n0'",
                details={"error_type": "alpha_value"},
            )

        return ValidationResult(is_valid=True, message="Alpha is well-formed")

    def validate_count(self, count: int) -> ValidationResult:
        """Validate a requested number of eigenpairs."""
        if count < 1:
            return ValidationResult(
                is_valid=False,
                message=f"Count must be at least 1, got {count}",
                details={"error_type": "count", "value": count},
            )
        return ValidationResult(is_valid=True, message="Count is valid")

    def validate_order(self, order: int) -> ValidationResult:
        """Validate an expansion order."""
        if order < 0:
            return ValidationResult(
                is_valid=False,
                message=f"Order must be nonnegative, got {order}",
                details={"error_type": "order", "value": order},
            )
        return ValidationResult(is_valid=True, message="Order is valid")

    def validate_points(self, points: int) -> ValidationResult:
        """Validate a number of grid points per edge."""
        if points < MIN_POINTS_PER_EDGE:
            return ValidationResult(
                is_valid=False,
                message=f"At least {MIN_POINTS_PER_EDGE} points per edge are required, got {points}",
                details={"error_type": "points", "value": points},
            )
        return ValidationResult(is_valid=True, message="Points are valid")

    def validate_epsilons(self, epsilons: Sequence[float]) -> ValidationResult:
        """Validate a list of small parameters, each in (0, 0.5)."""
        if not epsilons:
            return ValidationResult(
                is_valid=False,
                message="The epsilon list is empty",
                details={"error_type": "epsilons_empty"},
            )

        bad = [eps for eps in epsilons if not (0.0 < eps < MAX_EPSILON)]
        if bad:
            return ValidationResult(
                is_valid=False,
                message=f"Epsilon values must lie in (0, {MAX_EPSILON}): {bad}",
                details={"error_type": "epsilons_range", "values": bad},
            )

        return ValidationResult(is_valid=True, message="Epsilons are valid")

    def validate_rate_samples(self, epsilons: Sequence[float]) -> ValidationResult:
        """A rate fit needs at least 4 samples spanning at least 2 decades."""
        result = self.validate_epsilons(epsilons)
        if not result.is_valid:
            return result

        if len(epsilons) < 4:
            return ValidationResult(
                is_valid=False,
                message=f"A rate fit needs at least 4 epsilon values, got {len(epsilons)}",
                details={"error_type": "rate_samples", "count": len(epsilons)},
            )
        span = math.log10(max(epsilons) / min(epsilons))
        if span < 2.0 - 1e-12:
            return ValidationResult(
                is_valid=False,
                message=f"Epsilon values must span at least 2 decades, got {span:.2f}",
                details={"error_type": "rate_span", "span": span},
            )

        return ValidationResult(is_valid=True, message="Rate samples are valid")
