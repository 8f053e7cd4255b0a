import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import toml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from sreda.errors import ConfigError
from sreda.utils import get_app_data_dir


class TelemetryConfig(BaseModel):
    """Telemetry configuration for OpenTelemetry tracing."""

    enabled: bool = False
    service_name: str = "sreda"
    export_to_file: bool = True
    trace_file: Optional[str] = None
    otlp_endpoint: Optional[str] = None

    # File rotation settings
    rotation_enabled: bool = True
    rotation_max_size_mb: int = 10


class AppSettings(BaseSettings):
    """Process-level settings, also read from SREDA_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="SREDA_", env_nested_delimiter="__")

    # Upper bound on seed workers; defaults to the CPU count
    threads: Optional[int] = Field(default=None, ge=1)

    # Path to log file (uses platform defaults if not specified)
    log_file: Optional[Path] = None

    telemetry: TelemetryConfig = TelemetryConfig()


class ProblemConfig(BaseModel):
    """Which problem instance to generate (or load) for an experiment."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["quadratic", "finite-sum", "file"] = Field(
        default="quadratic",
        description="quadratic: Gaussian noise; finite-sum: n components; file: load a saved instance",
    )
    d1: int = Field(default=5, ge=1, description="Dimension of x")
    d2: int = Field(default=5, ge=1, description="Dimension of y")
    kappa: float = Field(default=5.0, ge=1.0, description="Target condition number ell / mu")
    sigma: float = Field(default=0.5, ge=0.0, description="Total gradient-noise standard deviation")
    n: Optional[int] = Field(default=None, ge=1, description="Component count (finite-sum)")
    spread: float = Field(default=0.5, ge=0.0, description="Component perturbation scale")
    seed: int = Field(default=0, ge=0, description="Problem seed, shared by every run seed")
    x0_scale: float = Field(default=1.0, ge=0.0, description="Scale of the random starting x0")
    path: Optional[Path] = Field(default=None, description="problem.json to load (kind = file)")

    @model_validator(mode="after")
    def _check_kind(self) -> "ProblemConfig":
        if self.kind == "finite-sum" and self.n is None:
            raise ValueError("finite-sum problems need n")
        if self.kind == "file" and self.path is None:
            raise ValueError("file problems need path")
        return self


class ExperimentConfig(BaseModel):
    """One experiment: a problem, algorithms, targets and seeds."""

    model_config = ConfigDict(extra="forbid")

    problem: ProblemConfig = ProblemConfig()
    algorithm: str = Field(default="sreda", description="Solver used by `run`")
    algorithms: List[str] = Field(
        default_factory=lambda: ["sreda", "sgda"], description="Solvers compared by `sweep`"
    )
    epsilon: float = Field(default=0.2, gt=0, description="Target stationarity for `run`")
    epsilons: List[float] = Field(
        default_factory=lambda: [0.4, 0.2, 0.1], description="Targets swept by `sweep`"
    )
    delta_f: Optional[float] = Field(
        default=None, gt=0, description="Initial gap override; computed exactly when omitted"
    )
    overrides: Dict[str, Any] = Field(
        default_factory=dict, description="Replacement values for derived parameters"
    )
    seeds: List[int] = Field(
        default_factory=lambda: list(range(10)), min_length=1, description="Run seeds"
    )
    iteration_cap: Optional[int] = Field(
        default=None, ge=0, description="Hard limit on outer iterations"
    )
    inner_cap: Optional[int] = Field(
        default=10_000, ge=0, description="Limit on SGDmax inner ascent steps"
    )
    diagnostics: bool = Field(default=True, description="Record exact gradient diagnostics")
    out: Path = Field(default=Path("results"), description="Output directory")

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, seeds: List[int]) -> List[int]:
        if any(seed < 0 or seed > 2**64 - 1 for seed in seeds):
            raise ValueError("seeds must be unsigned 64-bit integers")
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        return seeds

    @field_validator("epsilons")
    @classmethod
    def _check_epsilons(cls, epsilons: List[float]) -> List[float]:
        if any(not eps > 0 for eps in epsilons):
            raise ValueError("epsilons must be positive")
        return epsilons

    @field_validator("algorithm", "algorithms")
    @classmethod
    def _check_algorithms(cls, value):
        from sreda.solvers import SOLVER_REGISTRY

        names = [value] if isinstance(value, str) else value
        available = SOLVER_REGISTRY.list_solvers()
        unknown = [name for name in names if name not in available]
        if unknown:
            raise ValueError(f"unknown solver(s) {unknown}; available: {available}")
        return value


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Deep merge two dictionaries, with override taking precedence."""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def _read_document(path: Path) -> Dict[str, Any]:
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        if path.suffix == ".toml":
            return toml.load(path)
        if path.suffix == ".json":
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
    except (toml.TomlDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e
    raise ConfigError(f"Unsupported config format '{path.suffix}' (use .toml or .json)")


def _validated(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config:\n{e}") from e


def load_experiment_config(config_file: Optional[Path] = None) -> ExperimentConfig:
    """Load an experiment file (TOML or JSON) deep-merged over the defaults.

    Raises:
        ConfigError: If the file is missing, unparsable or invalid
    """
    defaults = ExperimentConfig().model_dump()
    if config_file is None:
        return _validated(defaults)
    data = _read_document(Path(config_file))
    logger.debug(f"Loaded experiment config from {config_file}")
    return _validated(_deep_merge(defaults, data))


def with_cli_overrides(
    config: ExperimentConfig,
    out: Optional[Path] = None,
    seeds: Optional[List[int]] = None,
    cap: Optional[int] = None,
    no_diagnostics: bool = False,
) -> ExperimentConfig:
    """Apply command-line flags on top of a loaded config and revalidate."""
    updates: Dict[str, Any] = {}
    if out is not None:
        updates["out"] = out
    if seeds is not None:
        updates["seeds"] = seeds
    if cap is not None:
        updates["iteration_cap"] = cap
    if no_diagnostics:
        updates["diagnostics"] = False
    if not updates:
        return config
    return _validated({**config.model_dump(), **updates})


def parse_seed_list(text: str) -> List[int]:
    """Parse ``--seeds 1,2,3``.

    Raises:
        ConfigError: If the list is empty or holds a non-integer
    """
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if not parts:
        raise ConfigError("--seeds needs at least one seed")
    try:
        return [int(part) for part in parts]
    except ValueError as e:
        raise ConfigError(f"Invalid seed list '{text}': {e}") from e


def load_app_settings(settings_file: Path | None = None) -> AppSettings:
    """Loads process settings from a TOML file, falling back to environment variables.

    If no settings_file is provided, searches in order:
    1. ./sreda.toml (current directory)
    2. <app data dir>/settings.toml (user config)
    """
    if settings_file is None:
        for location in (Path("sreda.toml"), get_app_data_dir() / "settings.toml"):
            if location.is_file():
                settings_file = location
                break

    if settings_file and Path(settings_file).is_file():
        try:
            data = toml.load(settings_file)
        except toml.TomlDecodeError as e:
            raise ConfigError(f"Cannot parse {settings_file}: {e}") from e
        try:
            return AppSettings(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid settings in {settings_file}:\n{e}") from e
    return AppSettings()
