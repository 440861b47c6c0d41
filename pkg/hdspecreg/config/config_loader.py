"""
Configuration Loader for hdspecreg.
"""

import copy
import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from ..common.exceptions import ConfigError

logger = logging.getLogger(__name__)

# Default configuration file path in the project's config directory
DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / "configs_json" / "hdspecreg_config.json"

# Suffixes parsed as plain-text ``key = value`` files instead of JSON
KEY_VALUE_SUFFIXES = (".cfg", ".conf", ".ini", ".txt")

DEFAULTS: Dict[str, Any] = {
    "logging": {"logging_level": "INFO", "log_file": None},
    "output": {"dir": "results"},
    "optimizer": {
        "restarts": 3,
        "start_multipliers": [0.5, 1.0, 2.0],
        "max_evals_per_dim": 500,
        "fatol": 1e-8,
        "lower_multiplier": 1e-3,
        "upper_multiplier": 1e3,
    },
    "transform": {
        "p_tilde": 4,
        "kernel_order": 4,
        "bandwidth_kernel_order": 2,
        "density_floor": 0.01,
    },
    "scad": {
        "lambda_grid_size": 30,
        "lambda_range": [0.01, 2.0],
        "a_grid": [2.1, 3.0, 3.7],
        "folds": 10,
        "intercept": True,
    },
    "gmm": {
        "weighting": "identity",
        "lambda_grid_size": 30,
        "lambda_range": [0.01, 2.0],
        "a_grid": [2.1, 3.0, 3.7],
        "folds": 10,
        "intercept": True,
    },
    "simulation": {
        "design": 1,
        "n": 500,
        "p_n": 15,
        "replications": 200,
        "seed": 7,
        "workers": 1,
        "estimators": None,
        "mad_center": "median",
        "full_scale": False,
    },
}


class ConfigLoader:
    """
    Loads configuration from a JSON file (or a plain-text ``key = value``
    file) and merges it over built-in defaults, with command-line overrides
    taking precedence over both.

    This class validates value ranges and implements the Singleton pattern so
    that all parts of the project share the same configuration.
    """

    # Singleton instance
    _instance = None
    _lock = threading.Lock()

    def __new__(cls, *args, **kwargs) -> "ConfigLoader":
        with cls._lock:
            if cls._instance is None:
                instance = super().__new__(cls)
                instance._initialized = False
                instance._config_lock = threading.RLock()
                cls._instance = instance
            return cls._instance

    def __init__(self) -> None:
        """
        Initialize the ConfigLoader with the built-in defaults.
        """
        if self._initialized:
            return

        self.local_config: Dict[str, Any] = copy.deepcopy(DEFAULTS)
        self.source: Optional[str] = None
        self._initialized = True

    def _validate_config(self, config: Dict[str, Any]) -> None:
        """
        Validate that the configuration holds admissible values.

        Parameters
        ----------
        config : Dict[str, Any]
            The merged configuration dictionary to validate.

        Raises
        ------
        ConfigError
            If a mandatory key is missing or any value is out of range.
        """
        problems: List[str] = []
        if "logging_level" not in config.get("logging", {}):
            problems.append("logging.logging_level missing")

        transform = config.get("transform", {})
        if transform.get("kernel_order") not in (2, 4):
            problems.append("transform.kernel_order must be 2 or 4")
        if transform.get("bandwidth_kernel_order") not in (None, 2, 4):
            problems.append("transform.bandwidth_kernel_order must be 2, 4 or null")
        floor = transform.get("density_floor", 0.0)
        if not isinstance(floor, (int, float)) or not 0.0 <= floor < 0.5:
            problems.append("transform.density_floor must lie in [0, 0.5)")
        if int(transform.get("p_tilde", 0)) < 1:
            problems.append("transform.p_tilde must be >= 1")

        for section in ("scad", "gmm"):
            a_grid = config.get(section, {}).get("a_grid", [])
            if not a_grid or any(float(a) <= 2.0 for a in a_grid):
                problems.append(f"{section}.a_grid entries must all exceed 2")
            if int(config.get(section, {}).get("folds", 0)) < 2:
                problems.append(f"{section}.folds must be >= 2")

        if config.get("gmm", {}).get("weighting") not in ("identity", "two_step"):
            problems.append("gmm.weighting must be 'identity' or 'two_step'")

        simulation = config.get("simulation", {})
        if simulation.get("design") not in (1, 2, 3, 4, 5, 6):
            problems.append("simulation.design must be 1..6")
        if simulation.get("mad_center") not in ("median", "truth"):
            problems.append("simulation.mad_center must be 'median' or 'truth'")
        if int(simulation.get("replications", 0)) < 1:
            problems.append("simulation.replications must be >= 1")

        if problems:
            raise ConfigError(f"Invalid configuration: {'; '.join(problems)}")

    def load_config(self, config_path: Optional[str] = None) -> Dict[str, Any]:
        """
        Load configuration from a local file and merge it over the defaults.

        Parameters
        ----------
        config_path : str, optional
            Path to a JSON or ``key = value`` configuration file. If None, uses
            DEFAULT_CONFIG_PATH when it exists and the defaults otherwise.

        Returns
        -------
        Dict[str, Any]
            The loaded configuration as a dictionary.

        Raises
        ------
        ConfigError
            If an explicitly requested file is missing, unreadable, or holds
            invalid values.
        """
        if config_path is None:
            if not DEFAULT_CONFIG_PATH.exists():
                logger.debug("No default configuration at %s, using built-in defaults.", DEFAULT_CONFIG_PATH)
                with self._config_lock:
                    self.local_config = copy.deepcopy(DEFAULTS)
                    self.source = None
                return self.local_config
            config_path = str(DEFAULT_CONFIG_PATH)

        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {config_path}")

        try:
            if path.suffix.lower() in KEY_VALUE_SUFFIXES:
                file_config = parse_key_value_text(path.read_text(encoding="utf-8"))
            else:
                with path.open("r", encoding="utf-8") as f:
                    file_config = json.load(f)
        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError(f"Failed to load configuration from {config_path}: {e}")

        merged = _deep_merge(copy.deepcopy(DEFAULTS), file_config)
        self._validate_config(merged)
        with self._config_lock:
            self.local_config = merged
            self.source = str(path)

        logger.info("Successfully loaded configuration from %s", config_path)
        return self.local_config

    def merge_overrides(self, overrides: Mapping[str, Any]) -> Dict[str, Any]:
        """
        Merge command-line overrides (dotted keys or nested dicts) over the
        current configuration. ``None`` values are ignored.

        Parameters
        ----------
        overrides : Mapping[str, Any]
            Values to apply, e.g. ``{"simulation.n": 500}``.

        Returns
        -------
        Dict[str, Any]
            The updated configuration.
        """
        nested: Dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            _assign_dotted(nested, key, value)
        with self._config_lock:
            merged = _deep_merge(copy.deepcopy(self.local_config), nested)
            self._validate_config(merged)
            self.local_config = merged
            return self.local_config

    def reset(self) -> None:
        """
        Restore the built-in defaults.
        """
        with self._config_lock:
            self.local_config = copy.deepcopy(DEFAULTS)
            self.source = None

    def get_nested_value(self, path: str, default: Any = None) -> Any:
        """
        Retrieve a nested configuration value using dot notation.

        Parameters
        ----------
        path : str
            The dot-delimited path to the configuration value, e.g.
            "transform.p_tilde".
        default : Any, optional
            The default value to return if the path is missing, by default None.

        Returns
        -------
        Any
            The value found at the specified path, or the default if not found.
        """
        with self._config_lock:
            keys = path.split(".")
            value = self.local_config
            for key in keys:
                if not isinstance(value, dict) or key not in value:
                    return default
                value = value[key]
            return value

    def get_log_level(self) -> str:
        """
        Retrieve the configured logging level.

        Returns
        -------
        str
            The log level (e.g., "DEBUG", "INFO", "WARNING", "ERROR").
        """
        log_level = self.get_nested_value("logging.logging_level", "INFO")
        return str(log_level).upper()

    def get_log_file(self) -> Optional[str]:
        """
        Retrieve the configured log file path.

        Returns
        -------
        str or None
            The log file path if specified, otherwise None.
        """
        return self.get_nested_value("logging.log_file", None)

    def get_output_dir(self) -> Path:
        """
        Retrieve the directory reports are written to.

        Returns
        -------
        Path
            The output directory.
        """
        return Path(self.get_nested_value("output.dir", "results"))

    def get_optimizer_config(self) -> Dict[str, Any]:
        """
        Retrieve the bandwidth optimizer settings.

        Returns
        -------
        Dict[str, Any]
            Keyword arguments for ``OptimizerConfig``.
        """
        return dict(self.get_nested_value("optimizer", {}))

    def get_transform_config(self) -> Dict[str, Any]:
        """
        Retrieve the special-regressor transform settings.

        Returns
        -------
        Dict[str, Any]
            ``p_tilde``, ``kernel_order``, ``bandwidth_kernel_order`` and
            ``density_floor``.
        """
        return dict(self.get_nested_value("transform", {}))

    def get_scad_settings(self) -> Dict[str, Any]:
        """
        Retrieve the SCAD least-squares tuning settings.

        Returns
        -------
        Dict[str, Any]
            Grid sizes, grid ranges, folds and the intercept flag.
        """
        return dict(self.get_nested_value("scad", {}))

    def get_gmm_settings(self) -> Dict[str, Any]:
        """
        Retrieve the SCAD-GMM settings.

        Returns
        -------
        Dict[str, Any]
            Weighting scheme, grids, folds and the intercept flag.
        """
        return dict(self.get_nested_value("gmm", {}))

    def get_simulation_settings(self) -> Dict[str, Any]:
        """
        Retrieve the Monte Carlo settings.

        Returns
        -------
        Dict[str, Any]
            Design, sample size, replications, seed, workers and MAD centre.
        """
        return dict(self.get_nested_value("simulation", {}))


def parse_key_value_text(text: str) -> Dict[str, Any]:
    """
    Parse ``key = value`` lines with dotted keys into a nested dictionary.

    Parameters
    ----------
    text : str
        File contents. Blank lines and lines starting with ``#`` are skipped.

    Returns
    -------
    Dict[str, Any]
        Nested configuration. Values are decoded as JSON when possible
        (numbers, booleans, lists, null) and kept as strings otherwise.

    Raises
    ------
    ConfigError
        If a non-comment line has no ``=``.
    """
    result: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            decoded: Any = json.loads(value)
        except json.JSONDecodeError:
            decoded = value
        _assign_dotted(result, key, decoded)
    return result


def _assign_dotted(target: Dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = target
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    node[keys[-1]] = value


def _deep_merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(base.get(key), dict):
            _deep_merge(base[key], value)
        else:
            base[key] = value
    return base
