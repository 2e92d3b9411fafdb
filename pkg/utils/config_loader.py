# utils/config_loader.py
import copy
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from utils.logger import logger

DEFAULT_CONFIG_PATH = "lca_config.json"


class ConfigLoader:
    """Configuration loader with validation and caching."""

    def __init__(self, config_path: str = DEFAULT_CONFIG_PATH):
        self.config_path = Path(config_path)
        self.config_cache: Dict[str, Any] = {}
        self.config_hash: Optional[str] = None
        self.default_config = self._get_default_config()

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default toolkit limits and output options."""
        return {
            "toolkit": {
                "max_cochain_degree": 5,
                "max_check_degree": 4,
                "default_tau_cap": 3,
                "report_format": 1,
                "json_indent": 2,
                "max_residuals": 20,
            }
        }

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file with validation."""
        try:
            if not self.config_path.exists():
                logger.debug(f"📋 Config file {self.config_path} not found, using defaults")
                return copy.deepcopy(self.default_config)

            config_content = self.config_path.read_text()
            current_hash = hashlib.sha256(config_content.encode()).hexdigest()

            if current_hash == self.config_hash and self.config_cache:
                logger.debug(f"📋 Using cached config from {self.config_path}")
                return self.config_cache

            validated_config = self._validate_config(json.loads(config_content))

            self.config_cache = validated_config
            self.config_hash = current_hash

            logger.info(f"✅ Loaded and validated config from {self.config_path}")
            return validated_config

        except json.JSONDecodeError as e:
            logger.error(f"❌ Invalid JSON in {self.config_path}: {e}")
            return copy.deepcopy(self.default_config)
        except OSError as e:
            logger.error(f"❌ Error loading config: {e}")
            return copy.deepcopy(self.default_config)

    def _validate_config(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Merge the loaded values over the defaults and reset invalid ones."""
        validated_config = copy.deepcopy(self.default_config)
        defaults = self.default_config["toolkit"]
        toolkit = validated_config["toolkit"]

        loaded = config.get("toolkit", {})
        if not isinstance(loaded, dict):
            logger.warning("⚠️ 'toolkit' section is not an object, using defaults")
            loaded = {}

        for key, value in loaded.items():
            if key not in defaults:
                logger.warning(f"⚠️ Unknown config key toolkit.{key}, ignoring")
                continue
            toolkit[key] = value

        ranges = {
            "max_cochain_degree": (1, 9),
            "max_check_degree": (1, 6),
            "default_tau_cap": (0, 12),
            "json_indent": (0, 8),
            "max_residuals": (1, 10_000),
        }
        for key, (low, high) in ranges.items():
            value = toolkit[key]
            if not isinstance(value, int) or isinstance(value, bool) or not low <= value <= high:
                logger.warning(f"⚠️ Invalid toolkit.{key}: {value!r}, using {defaults[key]}")
                toolkit[key] = defaults[key]

        if toolkit["report_format"] != 1:
            logger.warning(f"⚠️ Unsupported report_format {toolkit['report_format']!r}, using 1")
            toolkit["report_format"] = 1

        if toolkit["max_check_degree"] > toolkit["max_cochain_degree"]:
            logger.warning("⚠️ max_check_degree exceeds max_cochain_degree, clamping")
            toolkit["max_check_degree"] = toolkit["max_cochain_degree"]

        return validated_config


_loaders: Dict[str, ConfigLoader] = {}


def get_toolkit_settings() -> Dict[str, Any]:
    """Toolkit section of the active config; ``LCA_CONFIG`` selects the file."""
    path = os.getenv("LCA_CONFIG", DEFAULT_CONFIG_PATH)
    loader = _loaders.get(path)
    if loader is None:
        loader = _loaders[path] = ConfigLoader(path)
    settings: Dict[str, Any] = loader.load_config()["toolkit"]
    return settings
