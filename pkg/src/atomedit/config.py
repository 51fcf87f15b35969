"""Pipeline configuration: TOML file, then command-line overrides."""

from __future__ import annotations

import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .extract.align import AlignConfig
from .ingest.dump import DEFAULT_MAX_SNAPSHOTS, IngestConfig


class ConfigError(ValueError):
    pass


# only path-valued settings may come from the environment
ENV_PATHS = {
    "input": "ATOMEDIT_INPUT",
    "out": "ATOMEDIT_OUT",
    "abbrev_list_path": "ATOMEDIT_ABBREV_LIST",
}


@dataclass
class PipelineConfig:
    language: str = "en"
    input: str | None = None
    input_format: str = "auto"
    out: str | None = None
    window_k: int = 5
    min_bleu: float = 0.1
    bleu_max_order: int = 4
    shard_size: int = 100_000
    max_snapshots: int = DEFAULT_MAX_SNAPSHOTS
    abbrev_list_path: str | None = None
    seed: int = 0
    jobs: int | None = None

    def validate(self) -> None:
        if not self.language:
            raise ConfigError("language must be set")
        if self.input_format not in ("auto", "xml", "dir"):
            raise ConfigError(f"input_format must be auto, xml or dir, not {self.input_format!r}")
        if self.window_k < 0:
            raise ConfigError("window_k must be >= 0")
        if not 0.0 <= self.min_bleu <= 1.0:
            raise ConfigError("min_bleu must lie in [0, 1]")
        if self.bleu_max_order < 1:
            raise ConfigError("bleu_max_order must be >= 1")
        if self.shard_size < 1:
            raise ConfigError("shard_size must be >= 1")
        if self.max_snapshots < 1:
            raise ConfigError("max_snapshots must be >= 1")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def align(self) -> AlignConfig:
        return AlignConfig(self.window_k, self.bleu_max_order, self.min_bleu)

    @property
    def ingest(self) -> IngestConfig:
        return IngestConfig(
            max_snapshots=self.max_snapshots,
            language=self.language,
            abbrev_list_path=self.abbrev_list_path,
            source_format=self.input_format,
        )

    @property
    def effective_jobs(self) -> int:
        return self.jobs or os.cpu_count() or 1

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def load_config(
    path: str | os.PathLike[str] | None = None,
    overrides: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> PipelineConfig:
    """Defaults, then environment paths, then the TOML file, then ``overrides``.

    ``None`` values in ``overrides`` mean "not given". Unknown keys are errors.
    """
    env = os.environ if env is None else env
    known = {f.name: f for f in fields(PipelineConfig)}
    values: dict[str, Any] = {}
    for key, var in ENV_PATHS.items():
        if env.get(var):
            values[key] = env[var]
    if path is not None:
        with open(path, "rb") as f:
            try:
                data = tomllib.load(f)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        if "extract" in data and isinstance(data["extract"], dict):
            data = {**{k: v for k, v in data.items() if k != "extract"}, **data["extract"]}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
        values.update(data)
    for key, value in (overrides or {}).items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            values[key] = value
    cfg = PipelineConfig()
    for key, value in values.items():
        default = getattr(cfg, key)
        if isinstance(default, bool) or (isinstance(default, int) and not isinstance(value, int)):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key} must be an integer")
        if isinstance(default, float) and not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number")
        setattr(cfg, key, float(value) if isinstance(default, float) else value)
    for key in ("input", "out", "abbrev_list_path"):
        v = getattr(cfg, key)
        if v is not None:
            setattr(cfg, key, str(Path(v)))
    cfg.validate()
    return cfg
