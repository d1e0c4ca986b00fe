"""Tests for logging setup, input file checks and JSON writing."""

import json
import logging

import pytest

from utils import (
    CONFIG_EXTENSIONS,
    FERMION_EXTENSIONS,
    format_word_for_display,
    setup_logging,
    validate_file_extension,
    write_json,
)


def test_setup_logging_levels():
    logger = setup_logging("debug")
    assert logger.name == "BVWorkbench"
    assert logger.level == logging.DEBUG
    assert len(setup_logging("INFO").handlers) == 1
    with pytest.raises(ValueError):
        setup_logging("verbose")


def test_config_and_fermion_extensions():
    assert validate_file_extension("configs/n2_quadratic.json", CONFIG_EXTENSIONS)
    assert validate_file_extension("MODEL.JSON")
    assert not validate_file_extension("configs/psi_n3.txt", CONFIG_EXTENSIONS)
    assert validate_file_extension("configs/psi_n3.txt", FERMION_EXTENSIONS)
    assert not validate_file_extension("psi.json", FERMION_EXTENSIONS)
    assert not validate_file_extension("psi", FERMION_EXTENSIONS)


def test_write_json_is_sorted_and_stamped(tmp_path):
    path = tmp_path / "report.json"
    write_json(str(path), {"b": 1, "a": [2]}, {"mode": "radical", "config_hash": "ff"})
    text = path.read_text()
    assert json.loads(text) == {"a": [2], "b": 1, "config_hash": "ff", "mode": "radical"}
    assert text.index('"a"') < text.index('"b"') < text.index('"config_hash"')
    write_json(str(path), {"mode": "float"}, {"mode": "exact"})
    assert json.loads(path.read_text()) == {"mode": "float"}


def test_format_word_for_display():
    assert format_word_for_display([]) == "1"
    assert format_word_for_display(["x1", "C2"]) == "x1 ⊗ C2"
