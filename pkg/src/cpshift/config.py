"""Experiment configuration files."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

from .chain import ChainSystem
from .errors import ConfigError
from .translation import RetryPolicy


@dataclass(frozen=True)
class ExperimentConfig:
    system: Dict[str, Any] = field(default_factory=lambda: {"type": "cantor"})
    seed: int = 1
    depth: int = 12
    resolution: int = 1
    retry: Dict[str, int] = field(default_factory=lambda: {"extend_by": 8, "max_retries": 6})
    trajectories: int = 8
    checkpoints: List[int] = field(default_factory=lambda: [250, 500, 1000, 2000])
    functional: str = "occupied:2"
    output: str = "out"
    samples: int = 100_000
    max_shift: int = 27
    quad_level: int = 1

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown key")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path, seed: Optional[int] = None) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"not valid JSON: {exc}") from None
        if seed is not None and isinstance(data, dict):
            data["seed"] = seed
        return cls.from_dict(data)

    def validate(self) -> None:
        self.chain_system()
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        for key in ("depth", "resolution", "trajectories", "samples", "max_shift", "quad_level"):
            v = getattr(self, key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(key, "must be a positive integer")
        if self.quad_level > self.resolution:
            raise ConfigError("quad_level", "must not exceed resolution")
        if not isinstance(self.retry, dict) or set(self.retry) - {"extend_by", "max_retries"}:
            raise ConfigError("retry", "expects an object with extend_by and max_retries")
        for key, v in self.retry.items():
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(key, "must be a positive integer")
        if not isinstance(self.checkpoints, list) or not self.checkpoints:
            raise ConfigError("checkpoints", "must be a nonempty list")
        if any(not isinstance(m, int) or isinstance(m, bool) or m < 1 for m in self.checkpoints):
            raise ConfigError("checkpoints", "entries must be positive integers")
        from .ergodic import functional

        try:
            functional(self.functional)
        except ValueError as exc:
            raise ConfigError("functional", str(exc)) from None

    def chain_system(self) -> ChainSystem:
        return ChainSystem.from_spec(self.system)

    def retry_policy(self) -> RetryPolicy:
        return RetryPolicy(**self.retry)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()
