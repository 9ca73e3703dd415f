"""
Logging Configuration for CurrentKit

Structured logging with console and optional file handlers. Console output
goes to stderr so that JSON reports on stdout stay machine-readable.

Author: Harsh
"""

import logging
import sys
from typing import Any, Dict, Optional, TextIO


def setup_logging(
    name: str,
    level: str = "INFO",
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    log_file: Optional[str] = None,
    console: bool = True,
    file_logging: bool = False,
    stream: Optional[TextIO] = None
) -> logging.Logger:
    """
    Configure logging for a CurrentKit logger.

    Prevents duplicate handlers when called multiple times for the same logger.

    Args:
        name: Logger name (usually "currentkit" or __name__)
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_format: Format string for log messages
        log_file: Path to log file (if file_logging is True)
        console: Enable console logging
        file_logging: Enable file logging
        stream: Console stream, stderr by default

    Returns:
        Configured logger instance

    Example:
        >>> logger = setup_logging("currentkit", level="DEBUG")
        >>> logger.debug("Ball on sphere3: 17 elements through length 2")
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(numeric_level)
    formatter = logging.Formatter(log_format)

    if console:
        console_handler = logging.StreamHandler(stream or sys.stderr)
        console_handler.setLevel(numeric_level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if file_logging:
        file_path = log_file or "currentkit.log"
        try:
            file_handler = logging.FileHandler(file_path)
            file_handler.setLevel(numeric_level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except (IOError, OSError) as e:
            logger.warning(f"Could not create log file {file_path}: {str(e)}")

    # Prevent propagation to root logger to avoid duplicate logs
    logger.propagate = False

    return logger


def setup_from_config(settings: Dict[str, Any], level: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger from the `logging` section of config.yaml.

    Args:
        settings: Dictionary with level, format, file, console, file_logging
        level: Optional level overriding the configured one

    Returns:
        The "currentkit" logger
    """
    return setup_logging(
        "currentkit",
        level=level or settings.get("level", "INFO"),
        log_format=settings.get("format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
        log_file=settings.get("file"),
        console=settings.get("console", True),
        file_logging=settings.get("file_logging", False),
    )
