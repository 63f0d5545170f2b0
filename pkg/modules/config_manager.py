"""
Approximate At-Most-k Toolkit - Config Manager
==============================================

Singleton configuration manager for centralized config access.

Usage:
    from modules.config_manager import config
    max_h = config.get('search.max_h')
"""

import os
import yaml
import logging
from pathlib import Path
from typing import Any, Optional

# Configure module logger
logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "AMK_THREADS"


class ConfigManager:
    """
    Singleton configuration manager.

    Loads config once and provides cached access to all settings.
    """

    _instance: Optional['ConfigManager'] = None
    _config: dict = {}
    _loaded: bool = False

    def __new__(cls) -> 'ConfigManager':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not ConfigManager._loaded:
            self._load_config()
            ConfigManager._loaded = True

    def _load_config(self) -> None:
        """Load configuration from YAML file."""
        config_file = self.base_path / "config.yaml"

        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                ConfigManager._config = yaml.safe_load(f) or {}
            logger.debug(f"Config loaded from {config_file}")
        except FileNotFoundError:
            logger.error(f"Config file not found: {config_file}")
            ConfigManager._config = self._get_default_config()
        except yaml.YAMLError as e:
            logger.error(f"Invalid YAML in config file: {e}")
            ConfigManager._config = self._get_default_config()

    def _get_default_config(self) -> dict:
        """Return default configuration."""
        return {
            'app': {'name': 'Approximate At-Most-k Toolkit', 'version': '1.0.0'},
            'logging': {
                'level': 'WARNING',
                'path': '',
                'max_file_size_mb': 10,
                'backup_count': 5
            },
            'search': {
                'max_levels': 2,
                'max_h': 4,
                'max_w': 4,
                'max_leaf_m': 6
            },
            'oracle': {
                'default': 'dp',
                'brute_force_limit': 20
            },
            'parallel': {'threads': 4},
            'cache': {
                'enabled': False,
                'path': 'data/cache',
                'ttl_hours': 168
            },
            'output': {
                'results_dir': 'results',
                'ratio_digits': 12
            }
        }

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get config value using dot notation.

        Args:
            key: Config key in dot notation (e.g., 'search.max_levels')
            default: Default value if key not found

        Returns:
            Config value or default
        """
        keys = key.split('.')
        value = ConfigManager._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def get_section(self, section: str) -> dict:
        """
        Get entire config section.

        Args:
            section: Section name (e.g., 'search')

        Returns:
            Section dict or empty dict
        """
        return ConfigManager._config.get(section, {}) or {}

    @property
    def search(self) -> dict:
        """Get shape search bounds."""
        return self.get_section('search')

    @property
    def oracle(self) -> dict:
        """Get oracle configuration."""
        return self.get_section('oracle')

    @property
    def cache(self) -> dict:
        """Get cache configuration."""
        return self.get_section('cache')

    @property
    def base_path(self) -> Path:
        """Get application base path."""
        return Path(__file__).parent.parent

    def reload(self) -> None:
        """Force reload configuration."""
        ConfigManager._loaded = False
        self._load_config()
        ConfigManager._loaded = True


# Singleton instance for easy import
config = ConfigManager()


# =============================================================================
# UTILITY FUNCTIONS
# =============================================================================

def get_thread_count(override: Optional[int] = None) -> int:
    """
    Resolve the number of worker processes.

    The explicit override wins over parallel.threads; AMK_THREADS caps
    whichever of the two applies.

    Returns:
        Worker count, at least 1
    """
    threads = override if override is not None else config.get('parallel.threads', 1)

    env_value = os.environ.get(THREADS_ENV_VAR)
    if env_value:
        try:
            threads = min(threads, int(env_value))
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={env_value!r}")

    return max(1, int(threads))


def ensure_paths_exist(*paths: Path) -> None:
    """
    Ensure the given directories exist.

    Relative paths are resolved against the application base path.
    """
    for path in paths:
        path = Path(path)
        if not path.is_absolute():
            path = config.base_path / path
        try:
            path.mkdir(parents=True, exist_ok=True)
            logger.debug(f"Ensured path exists: {path}")
        except OSError as e:
            logger.warning(f"Could not create path {path}: {e}")


# Constants that should not be in config file
class Constants:
    """Application-wide constants."""

    # Exit codes
    EXIT_OK = 0
    EXIT_VALIDATION = 2
    EXIT_ORACLE_DISAGREEMENT = 3
    EXIT_NO_MODEL = 4

    # DIMACS
    DIMACS_TARGETS_PER_LINE = 20

    # Experiment grids
    FIG4_SIZES = (8, 16, 32, 64, 128)
    FIG5_SIZES = (10, 20, 30)

    # Shapes of the sec31 statistics rows: the two-level 1/2-of-16 chain and
    # the single-level model of the same (k, n)
    SEC31_SHAPE = "2x2,2x2;m=2;k=2;ff=0;ft=0"
    SEC31_FLAT_SHAPE = "2x2;m=4;k=2;ff=0;ft=0"

    ENCODINGS = ('approx', 'counter', 'binomial')
    ORACLES = ('dp', 'brute', 'both')
    REPRODUCE_TARGETS = ('fig4', 'fig5', 'sec31')
    CACHE_ACTIONS = ('stats', 'prune', 'clear')


if __name__ == "__main__":
    # Test config manager
    print(f"App name: {config.get('app.name')}")
    print(f"Search bounds: {config.search}")
    print(f"Threads: {get_thread_count()}")
    print(f"Base path: {config.base_path}")
