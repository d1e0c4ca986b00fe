"""
Pydantic schemas for model configuration and verification reports.

This module defines:
- ModelConfig: the JSON configuration of one U(n) model
- Report envelopes written by the command-line front end
- load_config / config_hash helpers
"""

import hashlib
import json
import os
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from utils import CONFIG_EXTENSIONS, FERMION_EXTENSIONS, validate_file_extension

Coefficient = Union[int, str]


class ConfigError(ValueError):
    """Invalid or incomplete model configuration."""


class ModeName(str, Enum):
    EXACT = "exact"
    RADICAL = "radical"
    FLOAT = "float"


class TruncationWindowConfig(BaseModel):
    """Ghost-degree window and polynomial-degree cutoff."""

    ghost_min: int = Field(-2, description="Lowest ghost degree reported")
    ghost_max: int = Field(2, description="Highest ghost degree reported")
    poly_max: int = Field(3, ge=0, description="Polynomial-degree cutoff D")

    @model_validator(mode="after")
    def validate_order(self):
        """Ensure the window is nonempty."""
        if self.ghost_min > self.ghost_max:
            raise ValueError("ghost_min must not exceed ghost_max")
        return self


class FermionSource(BaseModel):
    """Where the gauge-fixing fermion comes from."""

    source: str = Field("none", description="none, inline or file")
    expression: Optional[str] = Field(None, description="Inline expression, e.g. 'B1*x1 + B2*x2 + B3*x3'")
    path: Optional[str] = Field(None, description="Text file holding the expression")

    @field_validator("source")
    @classmethod
    def validate_source(cls, v):
        if v not in ("none", "inline", "file"):
            raise ValueError("gauge_fixing.source must be none, inline or file")
        return v

    @model_validator(mode="after")
    def validate_payload(self):
        if self.source == "inline" and not self.expression:
            raise ValueError("inline gauge fixing needs an expression")
        if self.source == "file" and not self.path:
            raise ValueError("file gauge fixing needs a path")
        return self

    def text(self, base_dir: str = ".") -> Optional[str]:
        """Expression text, or None when no fermion is configured."""
        if self.source == "inline":
            return self.expression
        if self.source == "file":
            path = self.path if os.path.isabs(self.path) else os.path.join(base_dir, self.path)
            if not validate_file_extension(path, FERMION_EXTENSIONS):
                raise ConfigError(f"Gauge-fixing fermion must be a .txt file: {path}")
            try:
                with open(path) as handle:
                    return handle.read()
            except OSError as exc:
                raise ConfigError(f"Cannot read gauge-fixing fermion from {path}: {exc}") from exc
        return None


class ModelConfig(BaseModel):
    """Configuration of one U(n) finite spectral triple and its BV pipeline."""

    n: int = Field(..., ge=2, description="Matrix size of the algebra M_n(C)")
    d0: Optional[List[List[Coefficient]]] = Field(None, description="n x n initial Dirac operator entries")
    f: Optional[Union[List[Coefficient], str]] = Field(
        None, description="Spectral function: coefficient list c_0.. or expression in t")
    casimir: Optional[Dict[int, List[Coefficient]]] = Field(
        None, description="Map k -> coefficients of g_k(x_{n^2}) in the Casimir action")
    initial_action: Optional[str] = Field(None, description="Explicit S_0 expression in x1..x_{n^2}")
    window: TruncationWindowConfig = Field(default_factory=TruncationWindowConfig)
    gauge_fixing: FermionSource = Field(default_factory=FermionSource)
    mode: ModeName = Field(ModeName.EXACT, description="Rank arithmetic: exact, radical or float")
    extension_bound: int = Field(64, ge=2, description="Largest radical extension degree before float fallback")
    output_dir: str = Field("reports", description="Directory for reports and exports")

    model_config = ConfigDict(json_schema_extra={
        "example": {
            "n": 2,
            "d0": [[0, 0], [0, 0]],
            "f": "t^2",
            "window": {"ghost_min": -2, "ghost_max": 2, "poly_max": 3},
            "gauge_fixing": {"source": "inline", "expression": "B1*x1 + B2*x2 + B3*x3"},
            "mode": "exact",
        }
    })

    @field_validator("d0")
    @classmethod
    def validate_d0(cls, v, info):
        """Ensure D_0 is square of size n."""
        n = info.data.get("n")
        if v is not None and n is not None:
            if len(v) != n or any(len(row) != n for row in v):
                raise ValueError(f"d0 must be a {n}x{n} matrix")
        return v

    @model_validator(mode="after")
    def validate_action_source(self):
        """At most one way of specifying S_0."""
        given = [name for name in ("f", "casimir", "initial_action") if getattr(self, name) is not None]
        if len(given) > 1:
            raise ValueError(f"Give only one of f, casimir, initial_action (got {', '.join(given)})")
        return self

    def has_action(self) -> bool:
        return any(getattr(self, name) is not None for name in ("f", "casimir", "initial_action"))

    def require_action(self) -> None:
        if not self.has_action():
            raise ConfigError("This command needs one of f, casimir or initial_action in the config")


def load_config(path: str) -> ModelConfig:
    """
    Read and validate a JSON model configuration.

    Args:
        path: Path to a .json file

    Returns:
        Validated ModelConfig

    Raises:
        ConfigError: On a missing file, bad JSON or failed validation
    """
    if not validate_file_extension(path, CONFIG_EXTENSIONS):
        raise ConfigError(f"Configuration must be a .json file: {path}")
    try:
        with open(path) as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"Cannot read configuration {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid JSON in {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return ModelConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration {path}: {exc}") from exc


def config_hash(config: ModelConfig) -> str:
    """SHA-256 of the canonical JSON dump."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class SuiteResult(BaseModel):
    """Outcome of one verification suite."""

    name: str = Field(..., description="Suite name")
    passed: bool = Field(..., description="True when every residual vanished")
    residuals: Dict[str, str] = Field(default_factory=dict, description="Residual label -> exact value")
    notes: List[str] = Field(default_factory=list, description="Fallbacks and remarks")

    model_config = ConfigDict(json_schema_extra={
        "example": {"name": "cme", "passed": True, "residuals": {"cme_residual": "0"}, "notes": []}
    })


class CheckReport(BaseModel):
    """Report written by --check."""

    config_hash: str
    mode: str
    suites: List[SuiteResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    def to_payload(self) -> Dict[str, Any]:
        payload = self.model_dump(mode="json")
        payload["passed"] = self.passed
        return payload


class CohomologyEnvelope(BaseModel):
    """Report written by --cohomology."""

    config_hash: str
    mode: str
    sections: Dict[str, Dict[str, Any]] = Field(default_factory=dict, description="Complex name -> report")
    conjugacy: Dict[str, Any] = Field(default_factory=dict, description="BV vs Hochschild comparison")
    d_squared: Dict[str, Dict[str, int]] = Field(default_factory=dict, description="Nonzero entries of d^2")
