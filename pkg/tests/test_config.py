"""Tests for configuration models and management."""

import json
import tempfile
import unittest
from pathlib import Path

from conftest import config_document
from thin_junction.models.config import RunConfig, file_digest, serialize_config
from thin_junction.models.node_constants import NodeConstants
from thin_junction.models.regime import AlphaRegime, RegimeKind
from thin_junction.services.config_manager import ConfigManager, load_config
from thin_junction.utils.exceptions import ConfigurationError


class TestConfigManager(unittest.TestCase):
    """Test cases for ConfigManager."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()
        self.config_file = Path(self.temp_dir) / "config.json"
        self.manager = ConfigManager()

    def tearDown(self):
        """Clean up test fixtures."""
        import shutil

        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def _write(self, document) -> Path:
        self.config_file.write_text(json.dumps(document), encoding="utf-8")
        return self.config_file

    def test_load_valid_config(self):
        """Test loading a valid configuration."""
        document = config_document(
            lengths=(1.0, 1.5, 2.0),
            delta_table={"(1,2)": 0.1, "(1,3)": -0.1},
            mass_table={"(1)": 0.0},
        )
        document["alpha"] = {"regime": "rational", "m0": 1, "n0": 3}

        config = self.manager.load_config(self._write(document))

        self.assertEqual(list(config.graph.lengths), [1.0, 1.5, 2.0])
        self.assertEqual(config.regime, AlphaRegime.rational(1, 3))
        self.assertEqual(config.graph.node.constants.delta[(1, 0, 3)], -0.1)
        self.assertEqual(config.source, self.config_file)
        self.assertEqual(config.sha256, file_digest(self.config_file))

    def test_missing_alpha_defaults_to_zero(self):
        """Test the default regime."""
        document = config_document()
        del document["alpha"]

        config = self.manager.load_config(self._write(document))

        self.assertEqual(config.regime.kind, RegimeKind.ZERO)

    def test_missing_file(self):
        """Test loading a file that does not exist."""
        with self.assertRaises(ConfigurationError) as context:
            self.manager.load_config(Path(self.temp_dir) / "missing.json")

        self.assertIn("missing.json", context.exception.details["config_file"])

    def test_malformed_json(self):
        """Test loading a file that is not JSON."""
        self.config_file.write_text("{ edges: ", encoding="utf-8")

        with self.assertRaises(ConfigurationError):
            self.manager.load_config(self.config_file)

    def test_structural_error(self):
        """Test a document with the wrong shape."""
        document = config_document()
        document["edges"].append(document["edges"][0])

        with self.assertRaises(ConfigurationError) as context:
            self.manager.load_config(self._write(document))

        self.assertEqual(context.exception.details["error_type"], "edge_count")

    def test_value_error(self):
        """Test a well-shaped document with an out-of-range value."""
        document = config_document(ell0=0.5)

        with self.assertRaises(ConfigurationError) as context:
            self.manager.load_config(self._write(document))

        self.assertEqual(context.exception.details["field"], "ell0")

    def test_save_and_reload(self):
        """Test that a saved configuration loads back field for field."""
        config = self.manager.load_config(self._write(config_document(radii=(0.1, 0.2, 0.3))))
        config = config.with_regime(AlphaRegime.irrational(0.3819660112501051))

        saved = Path(self.temp_dir) / "saved.json"
        config.save(saved)
        reloaded = self.manager.load_config(saved)

        self.assertEqual(reloaded.to_dict(), config.to_dict())
        self.assertEqual(reloaded.regime, config.regime)

    def test_with_constants(self):
        """Test overriding the node tables."""
        config = self.manager.load_config(
            self._write(config_document(delta_table={"(1,2)": 1.0, "(1,3)": 2.0}))
        )

        updated = config.with_constants(NodeConstants(delta={(1, 0, 3): 5.0}))

        self.assertEqual(updated.graph.node.constants.delta, {(1, 0, 2): 1.0, (1, 0, 3): 5.0})

    def test_load_config_function(self):
        """Test the module-level loader."""
        graph, regime = load_config(self._write(config_document()))

        self.assertEqual(len(graph.edges), 3)
        self.assertEqual(regime.kind, RegimeKind.ZERO)

    def test_serialize_config(self):
        """Test the configuration document of a graph and regime."""
        config = self.manager.load_config(self._write(config_document()))

        document = serialize_config(config.graph, AlphaRegime.one())

        self.assertEqual(document["alpha"], {"regime": "one"})
        self.assertEqual(RunConfig.from_dict(document).regime, AlphaRegime.one())


if __name__ == "__main__":
    unittest.main()
