"""
Run configuration documents.

A run is described by a TOML or JSON document (format chosen by file
extension) validated into a RunConfig. Unknown keys are rejected and the
embedding is checked with validate_embedding before anything is computed.
The validated config, defaults included, is echoed into output metadata
and parses back to an identical RunConfig.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..algebra.afcore import SCAN_CASES, EmbeddingSpec, validate_embedding
from ..exceptions import ConfigError
from ..processing.minimizer import MinimizerOptions
from ..processing.scan import PathSpec

logger = logging.getLogger(__name__)

U64_MAX = 2 ** 64 - 1


class OptimizerConfig(BaseModel):
    """Local optimizer and multistart settings."""

    model_config = ConfigDict(extra="forbid")

    restarts: int = Field(default=8, ge=1, description="Starts per point, warm start included")
    max_iter: int = Field(default=2000, ge=1, description="L-BFGS-B iteration cap per start")
    gtol: float = Field(default=1e-9, gt=0, description="Projected-gradient stopping tolerance")
    ftol: float = Field(default=1e-15, gt=0, description="Relative decrease stopping tolerance")
    converge_tol: float = Field(default=1e-6, gt=0, description="max|grad| below which a minimum counts as converged")
    init_scale: float = Field(default=1.5, gt=0, description="Random starts are uniform in [-init_scale, init_scale]")


class PathConfig(BaseModel):
    """One lambda path."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["diagonal", "anti-diagonal", "grid", "segment"] = "diagonal"
    start: List[float] = Field(default_factory=lambda: [-1.0])
    end: List[float] = Field(default_factory=lambda: [3.0])
    samples: int = Field(default=161, ge=2)
    c: Optional[float] = None
    name: str = ""

    @model_validator(mode="after")
    def check_shape(self) -> "PathConfig":
        self.to_path_spec()
        return self

    def to_path_spec(self) -> PathSpec:
        return PathSpec(
            kind=self.kind,
            start=tuple(self.start),
            end=tuple(self.end),
            samples=self.samples,
            c=self.c,
            name=self.name or self.kind,
        )


class MassesConfig(BaseModel):
    """lambda points evaluated by the masses subcommand."""

    model_config = ConfigDict(extra="forbid")

    points: List[List[float]] = Field(default_factory=list)


class K0Config(BaseModel):
    """Dimension vectors pushed forward by the k0 subcommand."""

    model_config = ConfigDict(extra="forbid")

    vectors: List[List[int]] = Field(default_factory=list)


class RunConfig(BaseModel):
    """Validated run configuration."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(default="custom", description="Case label used in summaries")
    source: List[int] = Field(description="Block sizes n_i of the source algebra")
    target: List[int] = Field(description="Block sizes m_j of the target algebra")
    mult: List[List[int]] = Field(description="Multiplicity matrix alpha_ji, one row per target block")
    paths: List[PathConfig] = Field(default_factory=lambda: [PathConfig()])
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    seed: int = Field(default=0, description="Single 64-bit seed for all randomness")
    threads: int = Field(default=1, ge=1, description="Threads for concurrent restarts")
    output_dir: str = Field(default="output", description="Directory receiving output files")
    discontinuity_threshold: float = Field(default=0.05, gt=0)
    resolution: float = Field(default=1e-3, gt=0, description="Bisection width for discontinuities")
    masses: MassesConfig = Field(default_factory=MassesConfig)
    k0: K0Config = Field(default_factory=K0Config)

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v <= U64_MAX:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @model_validator(mode="after")
    def check_embedding(self) -> "RunConfig":
        self.embedding()
        return self

    def embedding(self) -> EmbeddingSpec:
        return validate_embedding(self.source, self.target, self.mult)

    def path_specs(self) -> List[PathSpec]:
        return [path.to_path_spec() for path in self.paths]

    def minimizer_options(self) -> MinimizerOptions:
        return MinimizerOptions(seed=self.seed, threads=self.threads, **self.optimizer.model_dump())

    def echo(self) -> dict:
        """JSON-ready form of the full config, defaults filled."""
        return self.model_dump(mode="json")

    def with_overrides(self, **updates) -> "RunConfig":
        """Re-validated copy with top-level fields replaced (None values ignored)."""
        data = self.echo()
        data.update({key: value for key, value in updates.items() if value is not None})
        return build_config(data)


PRESETS: Dict[str, dict] = {
    name: {"name": name, "source": list(source), "target": list(target), "mult": [list(row) for row in mult]}
    for name, (source, target, mult) in SCAN_CASES.items()
}


def _describe(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<config>"
        message = item["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, "):]
        lines.append(f"{location}: {message}")
    return "; ".join(lines)


def build_config(data: dict) -> RunConfig:
    """
    Validate a parsed document.

    Raises:
        ConfigError: naming every offending key
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as error:
        raise ConfigError(f"Invalid configuration: {_describe(error)}") from error


def parse_config_text(text: str, fmt: str = "toml") -> RunConfig:
    """Parse a TOML or JSON document into a RunConfig."""
    try:
        if fmt == "toml":
            data = tomllib.loads(text)
        elif fmt == "json":
            data = json.loads(text)
        else:
            raise ConfigError(f"Unsupported config format {fmt!r}; use toml or json")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as error:
        raise ConfigError(f"Malformed {fmt} document: {error}") from error
    if not isinstance(data, dict):
        raise ConfigError("A configuration document must be a table/object at top level")
    return build_config(data)


def parse_config(path: Path) -> RunConfig:
    """
    Read and validate a configuration file; the extension selects TOML or JSON.

    Raises:
        ConfigError: unknown extension, malformed document or schema violation
    """
    path = Path(path)
    formats = {".toml": "toml", ".json": "json"}
    if path.suffix.lower() not in formats:
        raise ConfigError(f"Cannot infer config format from {path.name}; use .toml or .json")
    logger.info(f"Loading run configuration from {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), formats[path.suffix.lower()])


def preset_config(name: str) -> RunConfig:
    """Built-in config for one of the four scan cases, diagonal path on [-1, 3]."""
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    return build_config(dict(PRESETS[name]))
