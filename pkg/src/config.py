"""
Config Module.

Handles run configuration: a `key = value` file, environment defaults and
command-line overrides, validated into a RunConfig.
"""
import os
from typing import Any, Dict, Literal, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src import __version__
from src.corrections import SchemeParams
from src.errors import ConfigError, SchemeError
from src.schemes import resolve_scheme


class RunConfig(BaseModel):
    """
    Fully resolved run configuration.

    After validation alpha, beta and iota hold the values implied by the
    named scheme.
    """
    model_config = ConfigDict(extra="forbid")

    scheme: Literal["dg", "qdg", "sd", "osfr", "gjfr"] = "dg"
    p: int = Field(4, ge=1, le=10)
    alpha: Optional[float] = Field(None, gt=-1)
    beta: Optional[float] = Field(None, gt=-1)
    iota: Optional[float] = None
    c: Optional[float] = None
    point_rule: Literal["gauss-legendre", "gauss-jacobi", "gauss-lobatto"] = "gauss-legendre"

    # von Neumann
    theta: float = Field(1.0, ge=0.0, le=1.0)
    rk: Literal["euler", "rk33", "rk44", "ls-rk45"] = "rk44"
    k: Optional[float] = Field(None, gt=0)
    periods: float = Field(1000.0, gt=0)
    n_k: int = Field(256, ge=8)
    sweep: Literal["diagonal", "alpha", "beta"] = "diagonal"
    error_modes: Literal["primary", "all"] = "primary"

    # solver / turbulence
    equation: Literal["advection", "burgers"] = "advection"
    elements: int = Field(16, ge=1)
    dof: int = Field(1200, ge=1)
    mu: float = Field(2e-4, ge=0)
    u_mean: float = 75.0
    cfl: float = Field(0.057, gt=0)
    t_end: float = Field(0.1, ge=0)
    dt: Optional[float] = Field(None, gt=0)
    ensemble: int = Field(100, ge=1)
    seed: int = Field(0, ge=0)

    # output
    out: str = "output"
    jobs: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _resolve(self) -> "RunConfig":
        try:
            params = resolve_scheme(self.scheme, self.p, self.alpha, self.beta, self.iota, self.c)
        except SchemeError as e:
            raise ValueError(str(e.args[0])) from e
        self.alpha, self.beta, self.iota = params.alpha, params.beta, params.iota
        return self

    @property
    def params(self) -> SchemeParams:
        """Resolved scheme parameters."""
        return SchemeParams(self.p, self.alpha, self.beta, self.iota)

    def manifest_text(self) -> str:
        """Every set field as `key = value`, readable by parse_config."""
        lines = [f"# gjfr-lab {__version__}"]
        for key, value in self.model_dump().items():
            if value is None:
                continue
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        return "\n".join(lines) + "\n"


ENV_KEYS = {"GJFR_OUT": "out", "GJFR_JOBS": "jobs"}


def _normalise(values: Dict[str, Any]) -> Dict[str, Any]:
    return {str(k).strip().lower().replace("-", "_"): v for k, v in values.items()}


def parse_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Builds a RunConfig from defaults, environment, file and flags.

    Args:
        path: Optional `key = value` config file.
        overrides: Flag values; None entries are ignored.

    Returns:
        RunConfig
    """
    load_dotenv()
    merged: Dict[str, Any] = {}
    for env_key, field in ENV_KEYS.items():
        if os.getenv(env_key):
            merged[field] = os.getenv(env_key)

    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        file_values = _normalise(dotenv_values(path, encoding="utf-8"))
        unknown = sorted(set(file_values) - set(RunConfig.model_fields))
        if unknown:
            raise ConfigError(f"unknown config key(s) in {path}: {', '.join(unknown)}")
        for key, value in file_values.items():
            if value is None or value == "":
                raise ConfigError(f"config key '{key}' has no value")
            merged[key] = value

    for key, value in _normalise(overrides or {}).items():
        if value is not None:
            merged[key] = value

    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = []
        for err in e.errors():
            key = ".".join(str(part) for part in err["loc"]) or "scheme"
            problems.append(f"{key}: {err['msg']}")
        raise ConfigError("; ".join(problems)) from None
