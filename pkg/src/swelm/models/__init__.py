"""Benchmark models on [0, 1]^d behind one adapter interface."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields

import numpy as np

from ..errors import DimensionError
from ..rng import SeedSpec
from .analytic import eval_gfunction, eval_interaction, gfunction_indices, interaction_indices
from .linear_ode import LinearOdeParams, build_orthogonal, eval_linear_ode
from .oscillator import OscillatorParams, eval_genetic_oscillator, mean_repressor


class ModelName(enum.Enum):
    INTERACTION = "Interaction"
    GFUNCTION = "GFunction"
    LINEAR_ODE = "LinearOde"
    GENETIC_OSCILLATOR = "GeneticOscillator"


class TruthSource(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    MONTE_CARLO = "MonteCarloReference"


@dataclass(frozen=True, eq=False)
class GroundTruth:
    first_order: np.ndarray
    total: np.ndarray
    source: TruthSource = TruthSource.CLOSED_FORM


@dataclass(frozen=True, eq=False)
class ModelSpec:
    name: ModelName
    d: int
    params: object = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "name", ModelName(self.name))
        p = self.params
        expected = {
            ModelName.INTERACTION: None,
            ModelName.GFUNCTION: len(p["a"]) if isinstance(p, dict) and "a" in p else None,
            ModelName.LINEAR_ODE: p.size if isinstance(p, LinearOdeParams) else None,
            ModelName.GENETIC_OSCILLATOR: 16,
        }[self.name]
        if self.d < 1 or (expected is not None and self.d != expected):
            raise DimensionError(f"{self.name.value} model cannot have d = {self.d}")

    def to_dict(self) -> dict:
        out = {"name": self.name.value, "d": self.d}
        if self.name is ModelName.INTERACTION:
            out["params"] = {"delta": self.params["delta"]}
        elif self.name is ModelName.GFUNCTION:
            out["params"] = {"a": list(self.params["a"])}
        elif self.name is ModelName.LINEAR_ODE:
            p = self.params
            out["params"] = {"size": p.size, "q_seed": p.q_seed.to_dict(), "t_final": p.t_final,
                             "output_index": p.output_index, "perturbation": p.perturbation}
        else:
            p = self.params
            out["params"] = {f.name: (list(getattr(p, f.name)) if isinstance(getattr(p, f.name), tuple)
                                      else getattr(p, f.name)) for f in fields(p)}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        name = ModelName(data["name"])
        params = dict(data.get("params", {}))
        if name is ModelName.INTERACTION:
            return interaction(int(data["d"]), float(params.get("delta", 0.0)))
        if name is ModelName.GFUNCTION:
            return gfunction(params["a"])
        if name is ModelName.LINEAR_ODE:
            if "q_seed" in params:
                params["q_seed"] = SeedSpec.from_dict(params["q_seed"])
            return linear_ode(LinearOdeParams(**params))
        for key in ("nominal_rates", "initial_state"):
            if key in params:
                params[key] = tuple(float(v) for v in params[key])
        return genetic_oscillator(OscillatorParams(**params))


def interaction(d: int, delta: float) -> ModelSpec:
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return ModelSpec(ModelName.INTERACTION, d, {"delta": float(delta)})


def gfunction(a) -> ModelSpec:
    a = tuple(float(v) for v in a)
    if any(v <= -1 for v in a):
        raise ValueError("g-function coefficients must exceed -1")
    return ModelSpec(ModelName.GFUNCTION, len(a), {"a": a})


BENCHMARK_G_COEFFICIENTS = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 500.0)


def linear_ode(params: LinearOdeParams | None = None) -> ModelSpec:
    params = LinearOdeParams() if params is None else params
    return ModelSpec(ModelName.LINEAR_ODE, params.size, params)


def genetic_oscillator(params: OscillatorParams | None = None) -> ModelSpec:
    return ModelSpec(ModelName.GENETIC_OSCILLATOR, 16, OscillatorParams() if params is None else params)


class ModelFunction:
    """Evaluate a model on a d-vector (returns float) or an (m, d) batch (returns array).

    Holds only immutable precomputations, so one instance may be shared.
    """

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        self.d = spec.d
        name, p = spec.name, spec.params
        if name is ModelName.INTERACTION:
            delta = p["delta"]
            self._batch = lambda X: eval_interaction(X, delta)
        elif name is ModelName.GFUNCTION:
            a = np.asarray(p["a"])
            self._batch = lambda X: eval_gfunction(X, a)
        elif name is ModelName.LINEAR_ODE:
            self._batch = lambda X: eval_linear_ode(X, p)
        else:
            self._batch = lambda X: mean_repressor(p, X)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        if X.shape[1] != self.d:
            raise DimensionError(f"{self.spec.name.value} expects {self.d} inputs, got {X.shape[1]}")
        y = np.asarray(self._batch(X), dtype=float)
        return float(y[0]) if single else y


def model_as_function(spec: ModelSpec) -> ModelFunction:
    return ModelFunction(spec)


def ground_truth(spec: ModelSpec) -> GroundTruth:
    if spec.name is ModelName.INTERACTION:
        return interaction_ground_truth(spec.d, spec.params["delta"])
    if spec.name is ModelName.GFUNCTION:
        return gfunction_ground_truth(spec.params["a"])
    raise ValueError(f"no closed form for the {spec.name.value} model")


def interaction_ground_truth(d: int, delta: float) -> GroundTruth:
    return GroundTruth(*interaction_indices(d, delta))


def gfunction_ground_truth(a) -> GroundTruth:
    return GroundTruth(*gfunction_indices(a))


__all__ = [
    "GroundTruth", "LinearOdeParams", "ModelFunction", "ModelName", "ModelSpec", "OscillatorParams",
    "BENCHMARK_G_COEFFICIENTS", "TruthSource", "build_orthogonal", "eval_gfunction", "eval_interaction",
    "eval_genetic_oscillator", "eval_linear_ode", "gfunction", "gfunction_ground_truth", "genetic_oscillator", "ground_truth",
    "interaction", "interaction_ground_truth", "linear_ode", "model_as_function",
]
