"""Serializable run configuration; a run is a pure function of its config."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError

COMMANDS = (
    "sample",
    "density",
    "nnsd",
    "sigma2",
    "delta3",
    "moments",
    "blocks",
    "crossmoments",
    "decohere",
)

CLASSICAL_KINDS = ("goe", "gue", "gse")
EMBEDDED_KINDS = ("fegoe", "begoe")


@dataclass
class RunConfig:
    """Everything a run depends on.  The seed is mandatory by design."""

    command: str
    seed: int
    member_count: int = 100
    worker_count: int = 1
    output_dir: str = "out"
    ensemble: dict = field(default_factory=dict)
    statistic: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if self.seed is None:
            raise ConfigError("seed is mandatory; wall-clock defaults are not allowed")
        self.seed = int(self.seed)
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if self.member_count < 1:
            raise ConfigError(f"member_count must be >= 1, got {self.member_count}")
        if self.worker_count < 1:
            raise ConfigError(f"worker_count must be >= 1, got {self.worker_count}")

    def to_mapping(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_mapping(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "command" not in mapping:
            raise ConfigError("config needs a command")
        if "seed" not in mapping:
            raise ConfigError("config needs a seed")
        return cls(**mapping)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_mapping(data)

    def config_hash(self) -> str:
        """Hash of the result-determining fields.

        Worker count and output directory are execution details: two runs
        differing only there must produce byte-identical artifacts.
        """
        payload = self.to_mapping()
        payload.pop("worker_count")
        payload.pop("output_dir")
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunManifest:
    """Record of one completed run: config echo, streams, timings, artifacts."""

    config: dict
    config_hash: str
    tool_version: str
    stream_ids: list
    wall_seconds: float
    artifacts: dict

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2)
