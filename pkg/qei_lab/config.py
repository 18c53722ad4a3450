"""
Configuration management using Pydantic Settings.
"""
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from qei_lab.errors import ConfigError


class Settings(BaseSettings):
    """Process-wide settings with environment variable support (prefix QEI_)."""

    model_config = SettingsConfigDict(
        env_prefix="QEI_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = Field(default="QEI Lab")

    # Logging
    log_level: str = Field(default="INFO")
    log_file: str = Field(default="logs/qei_lab.log")

    # Workers
    threads: int = Field(default=4, ge=1)

    # sinh-Gordon minimal solution quadrature
    fmin_epsabs: float = Field(default=1e-14, gt=0)
    fmin_epsrel: float = Field(default=1e-12, gt=0)
    fmin_limit: int = Field(default=500, ge=50)
    fmin_tail_cutoff: float = Field(default=1e-16, gt=0, description="Envelope level where the tail is truncated")
    fmin_max_error: float = Field(default=1e-10, gt=0, description="Largest accepted quadrature error estimate")

    # Large-rapidity extrapolation
    asymptotic_theta_start: float = Field(default=10.0, gt=0)
    asymptotic_max_doublings: int = Field(default=6, ge=2)
    asymptotic_tolerance: float = Field(default=1e-8, gt=0)

    # Spectral solver
    residual_factor: float = Field(default=1e-10, gt=0, description="Residual bound relative to the inf-norm of M")

    # Experiment defaults
    default_mass: float = Field(default=1.0, gt=0)
    default_sigma: float = Field(default=0.1, gt=0)
    default_polynomial: List[float] = Field(default=[1.0])
    default_cells: int = Field(default=500, ge=1)
    default_cutoff: float = Field(default=7.0, gt=0)
    default_quadrature_order: int = Field(default=4, ge=1)

    # Classification
    default_margin: float = Field(default=0.02, ge=0)
    default_probe_min: float = Field(default=10.0, gt=0)
    default_probe_max: float = Field(default=30.0, gt=0)


# Global settings instance
settings = Settings()


class ExperimentConfig(BaseModel):
    """Flat experiment description shared by all subcommands."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    model: str = Field(..., description="free | ising | sinh-gordon")
    mass: float = Field(..., gt=0, description="Particle mass mu")
    coupling: Optional[float] = Field(
        default=None, validate_default=True, description="sinh-Gordon coupling B in (0, 2)"
    )
    fmin_normalization: str = Field(default="hamiltonian", description="hamiltonian | asymptotic")
    polynomial: List[float] = Field(default_factory=lambda: list(settings.default_polynomial))
    sigma: float = Field(default_factory=lambda: settings.default_sigma, gt=0)
    R: float = Field(default_factory=lambda: settings.default_cutoff, gt=0)
    N: int = Field(default_factory=lambda: settings.default_cells, ge=1)
    q: int = Field(default_factory=lambda: settings.default_quadrature_order, ge=1)

    # scan-cutoff
    R_list: List[float] = Field(default_factory=lambda: [4.0, 6.0, 8.0, 10.0])
    h: Optional[float] = Field(default=None, gt=0, description="Fixed cell width for cutoff scans")

    # scan-coupling
    B_list: List[float] = Field(default_factory=lambda: [round(0.1 * k, 1) for k in range(1, 20)])

    # classify
    probe_min: float = Field(default_factory=lambda: settings.default_probe_min, gt=0)
    probe_max: float = Field(default_factory=lambda: settings.default_probe_max, gt=0)
    margin: float = Field(default_factory=lambda: settings.default_margin, ge=0)
    witness_range: Tuple[float, float] = Field(default=(0.0, 20.0))

    # kernel-dump
    dump_theta_min: float = Field(default=-2.0)
    dump_theta_max: float = Field(default=2.0)
    dump_points: int = Field(default=10, ge=1)
    dump_component: Tuple[int, int] = Field(default=(0, 0))

    # output
    output: str = Field(default="results")
    format: str = Field(default="csv")

    @field_validator("model")
    @classmethod
    def _known_model(cls, value: str) -> str:
        value = value.strip().lower()
        if value not in ("free", "ising", "sinh-gordon"):
            raise ValueError("expected one of 'free', 'ising', 'sinh-gordon'")
        return value

    @field_validator("format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in ("csv", "json"):
            raise ValueError("expected 'csv' or 'json'")
        return value

    @field_validator("fmin_normalization")
    @classmethod
    def _known_normalization(cls, value: str) -> str:
        if value not in ("hamiltonian", "asymptotic"):
            raise ValueError("expected 'hamiltonian' or 'asymptotic'")
        return value

    @field_validator("R_list")
    @classmethod
    def _increasing_cutoffs(cls, value: List[float]) -> List[float]:
        if any(r <= 0 for r in value):
            raise ValueError("cutoffs must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("cutoffs must be strictly increasing")
        return value

    @field_validator("B_list")
    @classmethod
    def _couplings_in_range(cls, value: List[float]) -> List[float]:
        if any(not 0.0 < b < 2.0 for b in value):
            raise ValueError("every coupling must lie in the open interval (0, 2)")
        return value

    @field_validator("dump_component")
    @classmethod
    def _tensor_index(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if any(i not in (0, 1) for i in value):
            raise ValueError("tensor indices must be 0 or 1")
        return value

    @field_validator("coupling")
    @classmethod
    def _coupling_matches_model(cls, value: Optional[float], info: ValidationInfo) -> Optional[float]:
        model = info.data.get("model")
        if model == "sinh-gordon":
            if value is None:
                raise ValueError("coupling is required for the sinh-gordon model")
            if not 0.0 < value < 2.0:
                raise ValueError("coupling must lie in the open interval (0, 2)")
        elif value is not None and model is not None:
            raise ValueError(f"coupling is only allowed for sinh-gordon, not {model}")
        return value

    @field_validator("polynomial")
    @classmethod
    def _normalized_polynomial(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one coefficient is required")
        if not all(math.isfinite(c) for c in value):
            raise ValueError("coefficients must be finite")
        if abs(sum(value) - 1.0) > 1e-12:
            raise ValueError(f"P(1) must equal 1, got {sum(value)!r}")
        return value

    @field_validator("probe_max")
    @classmethod
    def _probe_range(cls, value: float, info: ValidationInfo) -> float:
        if "probe_min" in info.data and value <= info.data["probe_min"]:
            raise ValueError("probe_max must exceed probe_min")
        return value

    @field_validator("witness_range")
    @classmethod
    def _witness_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if value[1] <= value[0]:
            raise ValueError("witness_range must be an increasing pair")
        return value

    @field_validator("dump_theta_max")
    @classmethod
    def _dump_range(cls, value: float, info: ValidationInfo) -> float:
        if "dump_theta_min" in info.data and value <= info.data["dump_theta_min"]:
            raise ValueError("dump_theta_max must exceed dump_theta_min")
        return value


def default_config_data() -> Dict[str, Any]:
    """Base values used when no config file is given."""
    return {"model": "free", "mass": settings.default_mass}


def _key_line(text: str, key: str) -> Optional[int]:
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def _format_validation_error(exc: ValidationError, source: str, text: Optional[str]) -> str:
    messages = []
    for error in exc.errors():
        field = ".".join(str(part) for part in error["loc"]) or "config"
        line = _key_line(text, str(error["loc"][0])) if text and error["loc"] else None
        where = f"{source}:{line}" if line else source
        messages.append(f"{where}: {field}: {error['msg']}")
    return "; ".join(messages)


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Build an ExperimentConfig from a flat JSON file and flag overrides.

    Flags win over file values. Without a file, defaults come from settings.

    Raises:
        ConfigError: unreadable file, malformed JSON or invalid fields
    """
    text = None
    source = "<flags>"
    if path:
        source = str(path)
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"{source}: cannot read config: {e}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{source}:{e.lineno}: malformed JSON: {e.msg}")
        if not isinstance(data, dict):
            raise ConfigError(f"{source}:1: config must be a JSON object")
    else:
        data = default_config_data()

    data.update({k: v for k, v in (overrides or {}).items() if v is not None})

    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e, source, text))
