"""
Configuration Loader for CurrentKit

Provides typed access to config.yaml: tolerances, radii, caps, surgery and
length-function settings. Uses a singleton so every module sees one config.

Author: Harsh
"""

import os
import logging
from typing import Dict, Any, Optional, List
import yaml

logger = logging.getLogger(__name__)

DEFAULT_FILLING_FAMILIES: Dict[str, List[str]] = {
    'punctured_torus': ['a', 'b', 'ab'],
    'sphere3': ['aB', 'abb', 'aab'],
    'genus2_octagon': ['a1', 'b1', 'a2', 'b2', 'a1b1', 'a2b2'],
}


class ConfigLoader:
    """
    Type-safe configuration loader for CurrentKit.

    Attributes:
        config (Dict[str, Any]): The loaded configuration dictionary

    Example:
        >>> config = ConfigLoader()
        >>> config.get_tolerances()
        {'tol_pt': 1e-09, 'tol_class': 1e-09}
    """

    _instance: Optional['ConfigLoader'] = None

    def __new__(cls, config_path: str = "config.yaml"):
        """Implement singleton pattern to avoid reloading config."""
        if cls._instance is None:
            cls._instance = super(ConfigLoader, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self, config_path: str = "config.yaml"):
        """
        Initialize the configuration loader.

        Args:
            config_path: Path to the YAML configuration file

        Raises:
            FileNotFoundError: If config file doesn't exist
            yaml.YAMLError: If config file is invalid YAML
        """
        if self._initialized:
            return

        try:
            if not os.path.exists(config_path):
                raise FileNotFoundError(f"Configuration file not found: {config_path}")

            with open(config_path, 'r') as f:
                self.config = yaml.safe_load(f) or {}

            self.config_path = config_path
            logger.info(f"Configuration loaded successfully from {config_path}")
            self._initialized = True

        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML configuration: {str(e)}")
            raise
        except Exception as e:
            logger.error(f"Error loading configuration: {str(e)}")
            raise

    @classmethod
    def reset(cls) -> None:
        """Forget the loaded instance (tests and repeated CLI runs)."""
        cls._instance = None

    @classmethod
    def from_mapping(cls, data: Dict[str, Any], source: str = "<defaults>") -> 'ConfigLoader':
        """
        Install a configuration given as a dictionary, replacing any loaded one.

        Args:
            data: Configuration dictionary (an empty one yields the defaults)
            source: Label stored as config_path
        """
        cls.reset()
        instance = super(ConfigLoader, cls).__new__(cls)
        instance.config = dict(data)
        instance.config_path = source
        instance._initialized = True
        cls._instance = instance
        return instance

    # Geometry
    def get_tolerances(self) -> Dict[str, float]:
        """
        Get boundary-point and classification tolerances.

        Returns:
            Dictionary with tol_pt and tol_class
        """
        geometry = self.config.get('geometry', {})
        return {
            'tol_pt': float(geometry.get('tol_pt', 1e-9)),
            'tol_class': float(geometry.get('tol_class', 1e-9)),
        }

    # Group enumeration
    def get_element_cap(self) -> int:
        """Get the Cayley-ball element cap; CURRENTKIT_ELEMENT_CAP overrides it."""
        env = os.environ.get('CURRENTKIT_ELEMENT_CAP')
        if env:
            try:
                return int(env)
            except ValueError:
                logger.warning(f"Ignoring non-integer CURRENTKIT_ELEMENT_CAP={env!r}")
        return int(self.config.get('group', {}).get('element_cap', 5_000_000))

    # Counting
    def get_counting_config(self) -> Dict[str, Any]:
        """
        Get intersection-counting settings.

        Returns:
            Dictionary with radius, count_radius, candidate_radius, stabilization_margin
        """
        counting = self.config.get('counting', {})
        return {
            'radius': int(counting.get('radius', 6)),
            'count_radius': int(counting.get('count_radius', 6)),
            'candidate_radius': int(counting.get('candidate_radius', 4)),
            'stabilization_margin': float(counting.get('stabilization_margin', 2.0)),
        }

    def get_base_point_config(self) -> Dict[str, Any]:
        """
        Get generic base-point retry settings.

        Returns:
            Dictionary with max_attempts and jitter
        """
        base_point = self.config.get('counting', {}).get('base_point', {})
        return {
            'max_attempts': int(base_point.get('max_attempts', 20)),
            'jitter': float(base_point.get('jitter', 1e-3)),
        }

    # Surgery
    def get_surgery_max_steps(self) -> int:
        """Get the iteration cap of the simplification loop."""
        return int(self.config.get('surgery', {}).get('max_steps', 32))

    # Length functions
    def get_zero_tolerance(self) -> float:
        """Get the threshold below which a length counts as zero."""
        return float(self.config.get('length_functions', {}).get('zero_tol', 1e-9))

    def get_filling_family(self, surface: str) -> List[str]:
        """
        Get the normalization family of a surface.

        Args:
            surface: Surface name

        Returns:
            List of class words; empty if the surface has no configured family
        """
        families = self.config.get('length_functions', {}).get('filling_families', {})
        family = families.get(surface, DEFAULT_FILLING_FAMILIES.get(surface, []))
        return [str(word) for word in family]

    # Runtime
    def get_runtime_config(self) -> Dict[str, Any]:
        """
        Get runtime settings.

        Returns:
            Dictionary with threads and output_format
        """
        runtime = self.config.get('runtime', {})
        return {
            'threads': int(runtime.get('threads', 1)),
            'output_format': runtime.get('output_format', 'json'),
        }

    # Logging Configuration Methods
    def get_logging_config(self) -> Dict[str, Any]:
        """
        Get logging configuration.

        Returns:
            Dictionary with level, format, file, console, file_logging
        """
        return self.config.get('logging', {
            'level': 'INFO',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'file': 'currentkit.log',
            'console': True,
            'file_logging': False
        })


# Convenience function for quick access
def load_config(config_path: str = "config.yaml") -> ConfigLoader:
    """
    Convenience function to load configuration.

    Args:
        config_path: Path to the YAML configuration file

    Returns:
        ConfigLoader instance

    Example:
        >>> config = load_config()
        >>> radius = config.get_counting_config()['radius']
    """
    return ConfigLoader(config_path)
