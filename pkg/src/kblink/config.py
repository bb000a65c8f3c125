"""Linker configuration and its layered resolution.

Precedence, lowest to highest: built-in defaults, key=value config file,
per-request overrides, command-line flags.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional


class Algorithm(str, enum.Enum):
    HITS = "hits"
    PAGERANK = "pagerank"


@dataclass(frozen=True)
class LinkerConfig:
    sigma: float = 0.87
    depth: int = 2
    algorithm: Algorithm = Algorithm.HITS
    use_popularity: bool = True
    use_acronyms: bool = True
    use_context_search: bool = True
    use_coreference: bool = True
    candidate_cap: int = 100
    hits_iterations: int = 20
    pagerank_iterations: int = 50
    pagerank_alpha: float = 0.15
    # raw hits fetched per candidate slot before the popularity sort
    retrieval_factor: int = 5
    language: str = "en"
    emergent_namespace: str = "http://kblink.invalid/emergent/"

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError("sigma must lie in [0, 1]")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.candidate_cap < 1:
            raise ValueError("candidate_cap must be >= 1")
        if self.hits_iterations < 1 or self.pagerank_iterations < 1:
            raise ValueError("iteration counts must be >= 1")
        if not 0.0 < self.pagerank_alpha < 1.0:
            raise ValueError("pagerank_alpha must lie in (0, 1)")
        if self.retrieval_factor < 1:
            raise ValueError("retrieval_factor must be >= 1")

    @property
    def retrieval_limit(self) -> int:
        if self.use_popularity:
            return self.candidate_cap * self.retrieval_factor
        return self.candidate_cap

    def with_overrides(self, overrides: Optional[Mapping[str, Any]]) -> "LinkerConfig":
        if not overrides:
            return self
        return replace(self, **coerce_overrides(overrides))

    @classmethod
    def from_file(cls, path) -> "LinkerConfig":
        return cls().with_overrides(read_config_file(path))


FIELD_TYPES = {f.name: f.type for f in fields(LinkerConfig)}

# short names used by the command-line flags
ALIASES = {
    "popularity": "use_popularity",
    "acronyms": "use_acronyms",
    "context": "use_context_search",
    "context_search": "use_context_search",
    "coref": "use_coreference",
    "coreference": "use_coreference",
}

_CAMEL = re.compile(r"(?<=[a-z0-9])([A-Z])")


def canonical_key(key: str) -> str:
    key = _CAMEL.sub(r"_\1", key.strip()).lower().replace("-", "_")
    key = ALIASES.get(key, key)
    if key not in FIELD_TYPES:
        raise KeyError(f"unknown linker config key: {key!r}")
    return key


def _coerce(name: str, value: Any) -> Any:
    kind = FIELD_TYPES[name]
    if kind in ("bool", bool):
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: not a boolean: {value!r}")
    if kind in ("int", int):
        if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
            raise ValueError(f"{name}: not an integer: {value!r}")
        return int(value)
    if kind in ("float", float):
        if isinstance(value, bool):
            raise ValueError(f"{name}: not a number: {value!r}")
        return float(value)
    if kind in ("Algorithm", Algorithm):
        return Algorithm(str(value).strip().lower())
    return str(value)


def coerce_overrides(overrides: Mapping[str, Any]) -> Dict[str, Any]:
    out = {}
    for key, value in overrides.items():
        name = canonical_key(key)
        out[name] = _coerce(name, value)
    return out


def read_config_file(path) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return values


def resolve_config(
    file_values: Optional[Mapping[str, Any]] = None,
    request_overrides: Optional[Mapping[str, Any]] = None,
    cli_values: Optional[Mapping[str, Any]] = None,
    base: Optional[LinkerConfig] = None,
) -> LinkerConfig:
    merged: Dict[str, Any] = {}
    for layer in (file_values, request_overrides, cli_values):
        if layer:
            merged.update(coerce_overrides(layer))
    return replace(base or LinkerConfig(), **merged)
