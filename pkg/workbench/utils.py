"""
Utility functions and logging setup for the BV spectral-triple workbench.

This module provides:
- Logging configuration for the "BVWorkbench" logger
- Input file checks for model configs (.json) and gauge-fixing fermions (.txt)
- Deterministic JSON writing for reports and exports
- Tensor-word formatting shared by the Hochschild pair reports
"""

import json
import logging
import os
from typing import Iterable, Mapping, Optional, Sequence

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
CONFIG_EXTENSIONS = (".json",)
FERMION_EXTENSIONS = (".txt",)


def setup_logging(log_level: str = "INFO") -> logging.Logger:
    """
    Configure and return the workbench logger.

    Args:
        log_level: One of LOG_LEVELS, case-insensitive

    Returns:
        Configured logger instance

    Raises:
        ValueError: if the level is not a known logging level
    """
    level = str(log_level).upper()
    if level not in LOG_LEVELS:
        raise ValueError(f"unknown log level '{log_level}'; expected one of {', '.join(LOG_LEVELS)}")
    logger = logging.getLogger("BVWorkbench")
    logger.setLevel(getattr(logging, level))

    # Avoid duplicate handlers
    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.DEBUG)
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        logger.addHandler(console_handler)

    return logger


def ensure_directory_exists(directory_path: str) -> None:
    """Create an output directory (and parents) if missing."""
    os.makedirs(directory_path, exist_ok=True)


def validate_file_extension(filename: str, allowed_extensions: Sequence[str] = CONFIG_EXTENSIONS) -> bool:
    """
    Check an input path against the extensions the workbench reads.

    Args:
        filename: Path of a model config or fermion file
        allowed_extensions: CONFIG_EXTENSIONS or FERMION_EXTENSIONS

    Returns:
        True if the extension (case-insensitive) is allowed
    """
    _, ext = os.path.splitext(str(filename))
    return ext.lower() in {e.lower() for e in allowed_extensions}


def write_json(path: str, payload, metadata: Optional[Mapping[str, object]] = None) -> None:
    """
    Write a JSON document with sorted keys and two-space indent.

    Metadata keys (config hash, mode) are merged at the top level; a payload
    key of the same name wins.
    """
    if metadata:
        payload = {**metadata, **payload}
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
    logger.info(f"Wrote {path}")


def format_word_for_display(word: Iterable) -> str:
    """Render a tensor word of generators as 'a ⊗ b ⊗ c', or '1' when empty."""
    letters = [str(letter) for letter in word]
    return " ⊗ ".join(letters) if letters else "1"


# Initialize logger
logger = setup_logging()
