"""
Pytest configuration and fixtures for currentkit tests.

Provides reusable test fixtures and setup/teardown logic.

Author: Harsh
"""

import os
import sys
import logging
from pathlib import Path
from typing import Dict, Any
import pytest
import yaml

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from currentkit.config_loader import ConfigLoader  # noqa: E402
from currentkit.surface_group import builtin  # noqa: E402


@pytest.fixture
def sample_config() -> Dict[str, Any]:
    """Provide a sample configuration dictionary for testing."""
    return {
        'geometry': {
            'tol_pt': 1.0e-9,
            'tol_class': 1.0e-9
        },
        'group': {
            'element_cap': 200000
        },
        'counting': {
            'radius': 5,
            'count_radius': 5,
            'candidate_radius': 3,
            'stabilization_margin': 2.0,
            'base_point': {
                'max_attempts': 10,
                'jitter': 1.0e-3
            }
        },
        'surgery': {
            'max_steps': 16
        },
        'length_functions': {
            'zero_tol': 1.0e-9,
            'filling_families': {
                'punctured_torus': ['a', 'b', 'ab']
            }
        },
        'runtime': {
            'threads': 1,
            'output_format': 'json'
        },
        'logging': {
            'level': 'INFO',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'file': 'currentkit.log',
            'console': True,
            'file_logging': False
        }
    }


@pytest.fixture
def config_yaml_file(sample_config, tmp_path) -> Path:
    """Create a temporary config.yaml file for testing."""
    config_file = tmp_path / "config.yaml"
    with open(config_file, 'w') as f:
        yaml.dump(sample_config, f)
    return config_file


@pytest.fixture
def minimal_config() -> Dict[str, Any]:
    """Provide minimal configuration for testing defaults."""
    return {
        'group': {
            'element_cap': 1000
        }
    }


@pytest.fixture
def minimal_config_file(minimal_config, tmp_path) -> Path:
    """Create a temporary config file holding only the minimal configuration."""
    config_file = tmp_path / "minimal.yaml"
    with open(config_file, 'w') as f:
        yaml.dump(minimal_config, f)
    return config_file


@pytest.fixture
def invalid_yaml_file(tmp_path) -> Path:
    """Create a temporary invalid YAML file for testing error handling."""
    config_file = tmp_path / "invalid.yaml"
    with open(config_file, 'w') as f:
        f.write("invalid: yaml: content: [incomplete")
    return config_file


@pytest.fixture
def temp_log_file(tmp_path) -> Path:
    """Create a temporary log file path for testing."""
    return tmp_path / "test.log"


@pytest.fixture(autouse=True)
def reset_config():
    """Forget the configuration singleton around each test."""
    ConfigLoader.reset()
    yield
    ConfigLoader.reset()


@pytest.fixture(autouse=True)
def reset_logging():
    """Reset logging configuration before each test."""
    names = ['tests.test_logging_config', 'currentkit']

    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    for name in names:
        logger = logging.getLogger(name)
        for handler in logger.handlers[:]:
            handler.close()
            logger.removeHandler(handler)
        logger.setLevel(logging.NOTSET)
        logger.propagate = True

    yield

    for handler in root_logger.handlers[:]:
        handler.close()
        root_logger.removeHandler(handler)

    for name in names:
        logger = logging.getLogger(name)
        for handler in logger.handlers[:]:
            handler.close()
            logger.removeHandler(handler)
        logger.setLevel(logging.NOTSET)
        logger.propagate = True


@pytest.fixture(scope="session")
def torus():
    """The once-punctured torus."""
    return builtin("punctured_torus")


@pytest.fixture(scope="session")
def pants():
    """The thrice-punctured sphere."""
    return builtin("sphere3")


@pytest.fixture(scope="session")
def genus2():
    """The closed genus-2 surface from the regular octagon."""
    return builtin("genus2_octagon")


@pytest.fixture
def custom_presentation() -> Dict[str, Any]:
    """Punctured torus written as a custom JSON presentation."""
    return {
        'name': 'custom_torus',
        'generators': ['a', 'b'],
        'matrices': {'a': [[1, 1], [1, 2]], 'b': [[1, -1], [-1, 2]]},
        'peripherals': ['abAB'],
        'genus': 1,
        'punctures': 1
    }


# Pytest configuration hooks
def pytest_configure(config):
    """Configure pytest with custom settings."""
    config.addinivalue_line(
        "markers", "unit: mark test as a unit test"
    )
    config.addinivalue_line(
        "markers", "integration: mark test as an integration test"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow (>1s)"
    )
    config.addinivalue_line(
        "markers", "requires_config: mark test as requiring config.yaml"
    )
