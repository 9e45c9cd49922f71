"""Run configuration: one flat JSON document per run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .models import ModelSpec
from .montecarlo import MIN_BASE_SAMPLES
from .regularization import DEFAULT_ALPHAS
from .rng import SeedSpec, U64_MAX
from .sweep import DEFAULT_P_GRID, AlphaPolicy, SweepConfig


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class SweepOptions:
    p_grid: tuple = DEFAULT_P_GRID
    alpha_policy: str = AlphaPolicy.LCURVE.value
    fixed_alpha: float | None = None
    alpha_grid: tuple = tuple(DEFAULT_ALPHAS)
    improvement_threshold: float = 0.0

    def build(self, n: int, master_seed: int) -> SweepConfig:
        return SweepConfig(n=n, seed=SeedSpec(master_seed, "sweep"), p_grid=self.p_grid,
                           alpha_policy=AlphaPolicy(self.alpha_policy), fixed_alpha=self.fixed_alpha,
                           alpha_grid=self.alpha_grid, improvement_threshold=self.improvement_threshold)

    def to_dict(self) -> dict:
        return {"p_grid": list(self.p_grid), "alpha_policy": self.alpha_policy, "fixed_alpha": self.fixed_alpha,
                "alpha_grid": list(self.alpha_grid), "improvement_threshold": self.improvement_threshold}


@dataclass(frozen=True)
class McOptions:
    N: int
    n_bootstrap: int = 200
    n_sigma: float = 3.0

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < MIN_BASE_SAMPLES:
            raise ConfigError(f"mc.N must be an integer >= {MIN_BASE_SAMPLES}, got {self.N!r}")
        if self.n_bootstrap < 2 or self.n_sigma <= 0:
            raise ConfigError("mc.n_bootstrap must be >= 2 and mc.n_sigma positive")


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec | None
    m: int
    s: int
    n: int
    output_dir: str
    master_seed: int = 0
    sweep: SweepOptions = field(default_factory=SweepOptions)
    mc: McOptions | None = None
    train_csv: str | None = None
    validation_csv: str | None = None

    def __post_init__(self):
        for name in ("m", "s", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.master_seed, bool) or not isinstance(self.master_seed, int) \
                or not 0 <= self.master_seed <= U64_MAX:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        if not self.output_dir:
            raise ConfigError("output_dir is required")
        try:
            self.sweep.build(self.n, self.master_seed)
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}") from exc

    @property
    def sweep_config(self) -> SweepConfig:
        return self.sweep.build(self.n, self.master_seed)

    def to_dict(self) -> dict:
        return {
            "model": None if self.model is None else self.model.to_dict(),
            "m": self.m, "s": self.s, "n": self.n,
            "output_dir": self.output_dir,
            "master_seed": self.master_seed,
            "sweep": self.sweep.to_dict(),
            "mc": None if self.mc is None else {"N": self.mc.N, "n_bootstrap": self.mc.n_bootstrap,
                                                "n_sigma": self.mc.n_sigma},
            "train_csv": self.train_csv,
            "validation_csv": self.validation_csv,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {"model", "m", "s", "n", "output_dir", "master_seed", "sweep", "mc", "train_csv", "validation_csv"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        missing = {"m", "s", "n", "output_dir"} - set(data)
        if missing:
            raise ConfigError(f"missing configuration keys: {sorted(missing)}")
        try:
            model = None if data.get("model") is None else ModelSpec.from_dict(data["model"])
            sweep = data.get("sweep") or {}
            for key in ("p_grid", "alpha_grid"):
                if key in sweep:
                    sweep[key] = tuple(float(v) for v in sweep[key])
            mc = data.get("mc")
            return cls(model=model, m=data["m"], s=data["s"], n=data["n"], output_dir=str(data["output_dir"]),
                       master_seed=data.get("master_seed", 0), sweep=SweepOptions(**sweep),
                       mc=None if mc is None else McOptions(**mc),
                       train_csv=data.get("train_csv"), validation_csv=data.get("validation_csv"))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_json(Path(path).read_text())
