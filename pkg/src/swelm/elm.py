"""Exponential-activation extreme learning machine: features, ridge solve, prediction."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ExtrapolationWarning, NumericalError
from .rng import SeedSpec, sample_gaussian_matrix

FEATURE_LIMIT = 1e300
_LOG_FEATURE_LIMIT = np.log(FEATURE_LIMIT)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HiddenLayer:
    weights: np.ndarray
    biases: np.ndarray
    sparsity_p: float = 0.0
    activation: str = "exp"

    def __post_init__(self):
        w, b = _frozen(self.weights), _frozen(self.biases)
        if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
            raise DimensionError(f"weights {w.shape} and biases {b.shape} are inconsistent")
        if not 0.0 <= self.sparsity_p < 1.0:
            raise ValueError("sparsity_p must lie in [0, 1)")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise NumericalError("hidden layer contains non-finite values")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def d(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True, eq=False)
class Dataset:
    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        x, y = _frozen(self.inputs), _frozen(self.outputs)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise DimensionError(f"inputs {x.shape} and outputs {y.shape} do not pair up")
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("dataset inputs must lie in the unit cube")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "outputs", y)

    @property
    def m(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]


@dataclass(frozen=True)
class TrainingStats:
    residual_norm: float
    solution_norm: float
    train_size: int


@dataclass(frozen=True, eq=False)
class TrainedSurrogate:
    layer: HiddenLayer
    output_weights: np.ndarray
    reg_alpha: float
    training_stats: TrainingStats
    seed_metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        beta = _frozen(self.output_weights)
        if beta.shape != (self.layer.n,):
            raise DimensionError("output weights must have one entry per neuron")
        object.__setattr__(self, "output_weights", beta)

    @property
    def d(self) -> int:
        return self.layer.d

    def __call__(self, inputs) -> np.ndarray:
        """Evaluate on an m x d batch (or a single d-vector)."""
        x = np.asarray(inputs, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if np.any(x < 0.0) or np.any(x > 1.0):
            warnings.warn("evaluating surrogate outside [0, 1]^d", ExtrapolationWarning, stacklevel=2)
        out = design_matrix(self.layer, x, check_domain=False) @ self.output_weights
        return out[0] if single else out

    def to_json(self) -> str:
        return json.dumps(surrogate_to_dict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "TrainedSurrogate":
        return surrogate_from_dict(json.loads(text))


def draw_base_layer(n: int, d: int, seed: SeedSpec) -> HiddenLayer:
    """Dense layer with standard-normal weights and biases."""
    w = sample_gaussian_matrix(n, d, seed.child("weights"))
    b = sample_gaussian_matrix(n, 1, seed.child("biases"))[:, 0]
    return HiddenLayer(w, b)


def design_matrix(layer: HiddenLayer, inputs, check_domain: bool = True) -> np.ndarray:
    x = np.asarray(inputs, dtype=float)
    if x.ndim != 2 or x.shape[1] != layer.d:
        raise DimensionError(f"expected inputs with {layer.d} columns, got shape {x.shape}")
    if check_domain and (np.any(x < 0.0) or np.any(x > 1.0)):
        warnings.warn("design matrix requested outside [0, 1]^d", ExtrapolationWarning, stacklevel=2)
    z = x @ layer.weights.T + layer.biases
    if not np.all(np.isfinite(z)) or z.max(initial=-np.inf) > _LOG_FEATURE_LIMIT:
        raise NumericalError("hidden feature exceeds 1e300; weights are too large for exp activation")
    return np.exp(z)


class RidgeFactors:
    """Thin SVD of a design matrix, reused for every ridge parameter."""

    def __init__(self, H, y):
        H = np.asarray(H, dtype=float)
        y = np.asarray(y, dtype=float)
        if H.ndim != 2 or y.shape != (H.shape[0],):
            raise DimensionError(f"matrix {H.shape} and right-hand side {y.shape} do not match")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(y))):
            raise NumericalError("non-finite values in least squares data")
        self.m, self.n = H.shape
        self.U, self.s, self.Vt = np.linalg.svd(H, full_matrices=False)
        self.coef = self.U.T @ y
        # part of y outside range(H); fixed for all alphas
        self.residual_floor = float(np.linalg.norm(y - self.U @ self.coef))
        self.y_norm = float(np.linalg.norm(y))

    @property
    def rank(self) -> int:
        if self.s.size == 0:
            return 0
        tol = max(self.m, self.n) * np.finfo(float).eps * self.s[0]
        return int(np.sum(self.s > tol))

    def filter_factors(self, alpha: float) -> np.ndarray:
        s2 = self.s**2
        return s2 / (s2 + alpha)

    def solve(self, alpha: float) -> np.ndarray:
        if alpha < 0:
            raise ValueError("ridge parameter must be nonnegative")
        if alpha == 0:
            if self.rank < self.n:
                raise NumericalError("plain least squares needs a full column rank design matrix")
            return self.Vt.T @ (self.coef / self.s)
        return self.Vt.T @ (self.s / (self.s**2 + alpha) * self.coef)

    def residual_norm(self, alpha: float) -> float:
        shrink = alpha / (self.s**2 + alpha) if alpha > 0 else np.zeros_like(self.s)
        return float(np.hypot(np.linalg.norm(shrink * self.coef), self.residual_floor))

    def solution_norm(self, alpha: float) -> float:
        return float(np.linalg.norm(self.s / (self.s**2 + alpha) * self.coef))


def ridge_train(layer: HiddenLayer, data: Dataset, alpha: float, factors: RidgeFactors | None = None,
                seed_metadata: dict | None = None) -> TrainedSurrogate:
    """Minimize ``0.5 |H beta - y|^2 + 0.5 alpha |beta|^2`` through the SVD of H."""
    if data.d != layer.d:
        raise DimensionError(f"dataset has {data.d} inputs, layer expects {layer.d}")
    if not np.all(np.isfinite(data.outputs)):
        raise NumericalError("training outputs contain non-finite values")
    if factors is None:
        factors = RidgeFactors(design_matrix(layer, data.inputs), data.outputs)
    beta = factors.solve(alpha)
    if not np.all(np.isfinite(beta)):
        raise NumericalError("ridge solution is not finite")
    stats = TrainingStats(factors.residual_norm(alpha), float(np.linalg.norm(beta)), data.m)
    return TrainedSurrogate(layer, beta, float(alpha), stats, dict(seed_metadata or {}))


def predict(surrogate: TrainedSurrogate, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (surrogate.d,):
        raise DimensionError(f"expected a point with {surrogate.d} coordinates, got shape {x.shape}")
    return float(surrogate(x))


def relative_error(surrogate: TrainedSurrogate, validation: Dataset) -> float:
    if validation.m == 0:
        raise ValueError("validation set is empty")
    y = validation.outputs
    denom = np.linalg.norm(y)
    if denom == 0:
        raise ZeroDivisionError("validation outputs are all zero; relative error undefined")
    return float(np.linalg.norm(surrogate(validation.inputs) - y) / denom)


def surrogate_to_dict(s: TrainedSurrogate) -> dict:
    # json writes floats with repr(), which round-trips doubles exactly
    return {
        "d": s.layer.d,
        "n": s.layer.n,
        "activation": s.layer.activation,
        "sparsity_p": s.layer.sparsity_p,
        "alpha": s.reg_alpha,
        "weights": s.layer.weights.ravel().tolist(),
        "biases": s.layer.biases.tolist(),
        "beta": s.output_weights.tolist(),
        "training_stats": {
            "residual_norm": s.training_stats.residual_norm,
            "solution_norm": s.training_stats.solution_norm,
            "train_size": s.training_stats.train_size,
        },
        "seed": s.seed_metadata,
    }


def surrogate_from_dict(data: dict) -> TrainedSurrogate:
    d, n = int(data["d"]), int(data["n"])
    w = np.asarray(data["weights"], dtype=float).reshape(n, d)
    layer = HiddenLayer(w, np.asarray(data["biases"], dtype=float), float(data["sparsity_p"]),
                        data.get("activation", "exp"))
    st = data["training_stats"]
    stats = TrainingStats(float(st["residual_norm"]), float(st["solution_norm"]), int(st["train_size"]))
    return TrainedSurrogate(layer, np.asarray(data["beta"], dtype=float), float(data["alpha"]), stats,
                            dict(data.get("seed", {})))
