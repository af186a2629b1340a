"""Pipeline configuration: defaults, flat ``key = value`` files, and overrides."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from sentilex.scorer import NormalizationMode
from sentilex.textcat import TokenizerKind

ENV_VAR = "SENTILEX_CONFIG"
PATH_FIELDS = ("dictionary", "corpus", "seeds", "gold", "out")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    dictionary: Path | None = None
    corpus: Path | None = None
    seeds: Path | None = None
    gold: Path | None = None
    out: Path = Path("out")
    seed_filter_threshold: float = 0.4
    split_threshold: float = 0.3
    expansion_radius: int = 1
    tokenizer: TokenizerKind = TokenizerKind.WORD
    gamma: float = 1.0
    regularization_c: float = 1.0
    max_epochs: int = 200
    normalization_mode: NormalizationMode = NormalizationMode.LINEAR_CLAMP
    rng_seed: int = 0
    pin_core: bool = False
    tfidf: bool = False
    folds: int = 4
    grid: str = "token:0,token:1,word:0,word:1"

    def __post_init__(self) -> None:
        for name in ("seed_filter_threshold", "split_threshold"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if self.expansion_radius < 0:
            raise ConfigError("expansion_radius must be >= 0")
        if self.gamma not in (0, 1):
            raise ConfigError("gamma must be 0 or 1")
        if self.regularization_c <= 0 or self.max_epochs <= 0:
            raise ConfigError("regularization_c and max_epochs must be positive")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        grid_configs(self.grid)

    def replace(self, **changes: Any) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)


def grid_configs(text: str) -> list[tuple[TokenizerKind, float]]:
    """Parse ``token:0,word:1`` into (tokenizer, gamma) pairs."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        kind, _, gamma = item.partition(":")
        try:
            pair = (TokenizerKind(kind.strip()), float(gamma))
        except ValueError:
            raise ConfigError(f"bad grid entry {item!r}; expected tokenizer:gamma such as word:1") from None
        if pair[1] not in (0, 1):
            raise ConfigError(f"bad grid gamma in {item!r}")
        if pair not in out:
            out.append(pair)
    if not out:
        raise ConfigError("grid is empty")
    return out


_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    kind = _TYPES[name]
    text = raw.strip()
    try:
        if name in PATH_FIELDS:
            return Path(text)
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "bool":
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "TokenizerKind":
            return TokenizerKind(text)
        if kind == "NormalizationMode":
            return NormalizationMode(text)
    except ValueError:
        raise ConfigError(f"invalid value for {name}: {raw!r}") from None
    return text


def read_config_file(path: str | os.PathLike[str]) -> dict[str, Any]:
    """Parse ``key = value`` lines; relative paths resolve against the file's directory."""
    path = Path(path)
    base = path.parent
    values: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            if key not in _TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            coerced = _coerce(key, value)
            if key in PATH_FIELDS and not coerced.is_absolute():
                coerced = base / coerced
            values[key] = coerced
    return values


def resolve_config(
    config_path: str | os.PathLike[str] | None = None,
    overrides: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> PipelineConfig:
    """Defaults, then the config file (or ``$SENTILEX_CONFIG``), then ``overrides``.

    ``None`` overrides are ignored so unset command-line flags fall through.
    """
    environ = os.environ if environ is None else environ
    if config_path is None and environ.get(ENV_VAR):
        config_path = environ[ENV_VAR]
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _TYPES:
            raise ConfigError(f"unknown setting {key!r}")
        values[key] = _coerce(key, value)
    return PipelineConfig(**values)
