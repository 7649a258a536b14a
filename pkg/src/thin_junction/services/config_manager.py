"""Configuration loading service."""

import json
import logging
from pathlib import Path

from ..models.config import RunConfig, file_digest
from ..models.graph import StarGraph
from ..models.regime import AlphaRegime
from ..utils.exceptions import ConfigurationError, ValidationError
from .validation_service import ValidationService

logger = logging.getLogger(__name__)


class ConfigManager:
    """
    Loads and validates run configuration files.

    Structural problems are reported through the validation service; value
    ranges are enforced by the models themselves. Every failure surfaces as
    a ConfigurationError naming the file.
    """

    def __init__(self, validation_service: ValidationService | None = None):
        self._validation_service = validation_service or ValidationService()

    def load_config(self, config_file: Path) -> RunConfig:
        """
        Load a configuration file.

        Args:
            config_file: Path to the JSON configuration

        Returns:
            RunConfig: Validated configuration with its file digest

        Raises:
            ConfigurationError: If the file is missing, malformed or invalid
        """
        config_file = Path(config_file)
        try:
            with open(config_file, encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(
                f"Failed to read configuration {config_file}: {e}",
                config_file=str(config_file),
            ) from e

        for result in self._validation_service.validate_config_document(data):
            if not result.is_valid:
                raise ConfigurationError(
                    result.message, config_file=str(config_file), details=dict(result.details)
                )

        try:
            config = RunConfig.from_dict(data)
        except ValidationError as e:
            raise ConfigurationError(
                e.message,
                config_file=str(config_file),
                details=dict(e.details),
            ) from e
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(
                f"Invalid configuration {config_file}: {e}", config_file=str(config_file)
            ) from e

        logger.info(f"Configuration loaded from: {config_file}")
        return RunConfig(
            graph=config.graph,
            regime=config.regime,
            source=config_file,
            sha256=file_digest(config_file),
        )


def load_config(path: Path) -> tuple[StarGraph, AlphaRegime]:
    """Load a configuration file into its star graph and regime."""
    config = ConfigManager().load_config(path)
    return config.graph, config.regime
