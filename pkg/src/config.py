"""
Toolkit configuration: defaults, YAML file and command-line overrides.
"""
import logging
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .common import DEFAULT_MATCH_TOL, DEFAULT_TOL, InvalidArgumentError

logger = logging.getLogger("config")

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class ToolkitConfig:
    tol: float = DEFAULT_TOL
    match_tol: float = DEFAULT_MATCH_TOL
    kmax: int = 6
    mmax: int = 3
    max_candidates: int = 200000
    exhaustive_limit: int = 12
    root_max_iter: int = 500
    exact: bool = False
    log_level: str = "WARNING"

    def __post_init__(self):
        for name in ("tol", "match_tol"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
                raise InvalidArgumentError(f"{name} must be a nonnegative number, got {value!r}")
        for name in ("kmax", "mmax", "max_candidates", "exhaustive_limit", "root_max_iter"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidArgumentError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.exact, bool):
            raise InvalidArgumentError(f"exact must be true or false, got {self.exact!r}")
        if str(self.log_level).upper() not in _LOG_LEVELS:
            raise InvalidArgumentError(f"Unknown log level: {self.log_level!r}")
        object.__setattr__(self, 'log_level', str(self.log_level).upper())

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ToolkitConfig':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidArgumentError(f"Unknown configuration keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_yaml(cls, path: str) -> 'ToolkitConfig':
        """Load a YAML mapping; missing keys keep their defaults."""
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise InvalidArgumentError(f"Cannot read config {path}: {e}")
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise InvalidArgumentError(f"Config {path} is not valid YAML: {e}")
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise InvalidArgumentError(f"Config {path} must be a mapping")
        logger.debug(f"Loaded config from {path}: {data}")
        return cls.from_dict(data)

    def merged(self, overrides: Dict[str, Optional[Any]]) -> 'ToolkitConfig':
        """Apply overrides, skipping those left as None."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self
