"""
Unit tests for the ConfigLoader singleton.
"""

import json
import tempfile
import unittest
from pathlib import Path

from hdspecreg.common.exceptions import ConfigError
from hdspecreg.config import ConfigLoader, config, parse_key_value_text


class TestConfigLoader(unittest.TestCase):
    """
    Test cases for loading, validating and overriding configuration.
    """

    def setUp(self) -> None:
        self.temp_dir = tempfile.TemporaryDirectory()
        self.dir = Path(self.temp_dir.name)
        config.reset()

    def tearDown(self) -> None:
        config.reset()
        self.temp_dir.cleanup()

    def test_singleton(self) -> None:
        self.assertIs(ConfigLoader(), config)

    def test_defaults(self) -> None:
        self.assertEqual(config.get_log_level(), "INFO")
        self.assertEqual(config.get_transform_config()["p_tilde"], 4)
        self.assertEqual(config.get_transform_config()["bandwidth_kernel_order"], 2)
        self.assertEqual(config.get_scad_settings()["a_grid"], [2.1, 3.0, 3.7])
        self.assertEqual(config.get_gmm_settings()["weighting"], "identity")
        self.assertEqual(config.get_simulation_settings()["replications"], 200)
        self.assertEqual(config.get_output_dir(), Path("results"))

    def test_load_json_merges_over_defaults(self) -> None:
        """
        A partial JSON file only replaces the keys it names.
        """
        path = self.dir / "cfg.json"
        path.write_text(json.dumps({"transform": {"p_tilde": 6}, "logging": {"logging_level": "debug"}}))
        config.load_config(str(path))
        self.assertEqual(config.get_transform_config()["p_tilde"], 6)
        self.assertEqual(config.get_transform_config()["kernel_order"], 4)
        self.assertEqual(config.get_log_level(), "DEBUG")

    def test_load_key_value_file(self) -> None:
        path = self.dir / "run.cfg"
        path.write_text(
            "# comment\n\nsimulation.design = 5\nsimulation.n = 250\noutput.dir = results/d5\ngmm.weighting = two_step\n"
        )
        config.load_config(str(path))
        sim = config.get_simulation_settings()
        self.assertEqual(sim["design"], 5)
        self.assertEqual(sim["n"], 250)
        self.assertEqual(config.get_output_dir(), Path("results/d5"))
        self.assertEqual(config.get_gmm_settings()["weighting"], "two_step")

    def test_missing_explicit_file(self) -> None:
        with self.assertRaises(ConfigError):
            config.load_config(str(self.dir / "absent.json"))

    def test_invalid_values_are_all_reported(self) -> None:
        path = self.dir / "bad.json"
        path.write_text(json.dumps({"transform": {"kernel_order": 3, "density_floor": 0.7}, "simulation": {"design": 9}}))
        with self.assertRaises(ConfigError) as ctx:
            config.load_config(str(path))
        message = str(ctx.exception)
        self.assertIn("kernel_order", message)
        self.assertIn("density_floor", message)
        self.assertIn("simulation.design", message)

    def test_merge_overrides_ignores_none(self) -> None:
        """
        Flags left unset do not clobber file values.
        """
        config.merge_overrides({"simulation.n": 1000, "simulation.seed": None, "scad.folds": 5})
        self.assertEqual(config.get_simulation_settings()["n"], 1000)
        self.assertEqual(config.get_simulation_settings()["seed"], 7)
        self.assertEqual(config.get_scad_settings()["folds"], 5)

    def test_merge_overrides_validates(self) -> None:
        with self.assertRaises(ConfigError):
            config.merge_overrides({"scad.a_grid": [1.5]})
        self.assertEqual(config.get_scad_settings()["a_grid"], [2.1, 3.0, 3.7])

    def test_get_nested_value_default(self) -> None:
        self.assertIsNone(config.get_nested_value("no.such.key"))
        self.assertEqual(config.get_nested_value("transform.missing", 3), 3)


class TestParseKeyValueText(unittest.TestCase):
    """
    Test cases for the plain-text configuration parser.
    """

    def test_values_are_decoded(self) -> None:
        parsed = parse_key_value_text("a.b = 1\na.c = [1, 2]\nd = true\ne = hello\nf = null")
        self.assertEqual(parsed, {"a": {"b": 1, "c": [1, 2]}, "d": True, "e": "hello", "f": None})

    def test_line_without_equals(self) -> None:
        with self.assertRaises(ConfigError):
            parse_key_value_text("just words")


if __name__ == "__main__":
    unittest.main()
