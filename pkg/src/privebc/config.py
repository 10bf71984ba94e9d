"""Run configuration shared by the CLI commands."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from privebc.mechanisms import BudgetTriple
from privebc.protocol import NoiseCalibration


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = ""
    # graph source: a file, or a generator
    edges: str | None = None
    format: str = "plain"
    gen: str | None = None
    n: int | None = None
    p: float | None = None
    m: int | None = None
    graph_seed: int = 0
    # protocol
    ego: str | None = None
    parties: list[int] = field(default_factory=lambda: [3])
    partition_seed: int = 0
    epsilon: list[float] = field(default_factory=lambda: [1.0])
    split: list[float] = field(default_factory=lambda: [1 / 3, 1 / 3, 1 / 3])
    seed: int = 0
    noiseless: bool = False
    pseudocode_scales: bool = False
    reciprocal: str = "ego-offset"
    sampler: str = "normalized"
    precision: str = "double"
    workers: int = 1
    # sweep
    egos: int = 60
    min_degree: int = 2
    timing: bool = False
    # outputs
    out: str | None = None
    summary: str | None = None
    transcript: str | None = None
    mapping: str | None = None
    # bound
    gamma: float | None = None
    alpha: float | None = None
    ego_size: float | None = None
    universe: int | None = None
    t: float | None = None
    quality: int | None = None
    derived: dict = field(default_factory=dict)

    @classmethod
    def fields(cls) -> set[str]:
        return {f.name for f in dataclasses.fields(cls)}

    def validate(self) -> None:
        if self.edges and self.gen:
            raise ConfigError("--edges and --gen are mutually exclusive")
        if any(e <= 0 for e in self.epsilon):
            raise ConfigError("total epsilon must be positive")
        if len(self.split) != 3 or any(f <= 0 for f in self.split) or abs(sum(self.split) - 1) > 1e-9:
            raise ConfigError(f"--split needs three positive fractions summing to 1, got {self.split}")
        if any(k < 1 for k in self.parties):
            raise ConfigError("party counts must be >= 1")

    def budget(self, eps: float) -> BudgetTriple:
        return BudgetTriple.split(eps, tuple(self.split))

    def calibration(self) -> NoiseCalibration:
        kw = dict(noiseless=self.noiseless, reciprocal=self.reciprocal,
                  sampler=self.sampler, precision=self.precision)
        return NoiseCalibration.pseudocode(**kw) if self.pseudocode_scales else NoiseCalibration(**kw)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


def load_config_file(path) -> dict:
    """Read a JSON object whose keys are :class:`RunConfig` field names."""
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - RunConfig.fields()
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data
