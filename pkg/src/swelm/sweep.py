"""Sparse-weight ELM selection: sweep the mask probability, keep the best validated surrogate."""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .elm import (Dataset, HiddenLayer, RidgeFactors, TrainedSurrogate, design_matrix, draw_base_layer,
                  relative_error, ridge_train, surrogate_to_dict)
from .errors import SelectionWarning, SwelmError
from .regularization import DEFAULT_ALPHAS, compute_alpha_path, select_alpha_gcv, select_alpha_lcurve
from .rng import SeedSpec, sample_bernoulli_mask
from .sobol import SobolReport, sobol_report

log = logging.getLogger(__name__)

DEFAULT_P_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)


class AlphaPolicy(enum.Enum):
    LCURVE = "lcurve"
    GCV = "gcv"
    FIXED = "fixed"


@dataclass(frozen=True)
class SweepConfig:
    n: int
    seed: SeedSpec
    p_grid: tuple = DEFAULT_P_GRID
    alpha_policy: AlphaPolicy = AlphaPolicy.LCURVE
    fixed_alpha: float | None = None
    alpha_grid: tuple = tuple(DEFAULT_ALPHAS)
    improvement_threshold: float = 0.0

    def __post_init__(self):
        grid = tuple(float(p) for p in self.p_grid)
        if not grid or grid[0] != 0.0:
            raise ValueError("p_grid must start with exactly 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("p_grid must be strictly increasing")
        if grid[-1] >= 1.0:
            raise ValueError("sparsification probabilities must be < 1")
        object.__setattr__(self, "p_grid", grid)
        object.__setattr__(self, "alpha_policy", AlphaPolicy(self.alpha_policy))
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        if self.alpha_policy is AlphaPolicy.FIXED and not (self.fixed_alpha and self.fixed_alpha > 0):
            raise ValueError("fixed alpha policy needs a positive fixed_alpha")
        if self.n < 1:
            raise ValueError("need at least one neuron")
        if not 0.0 <= self.improvement_threshold < 1.0:
            raise ValueError("improvement_threshold must lie in [0, 1)")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed.to_dict(),
            "p_grid": list(self.p_grid),
            "alpha_policy": self.alpha_policy.value,
            "fixed_alpha": self.fixed_alpha,
            "alpha_grid": list(self.alpha_grid),
            "improvement_threshold": self.improvement_threshold,
        }


def mask_seed(seed: SeedSpec, p: float) -> SeedSpec:
    # one stream per p, so extending the grid never changes existing candidates
    return seed.child(f"mask-p{float(p)!r}")


def sparsify(base: HiddenLayer, p: float, seed: SeedSpec) -> HiddenLayer:
    if p == 0.0:
        return HiddenLayer(base.weights, base.biases, 0.0)
    B = sample_bernoulli_mask(base.n, base.d, p, mask_seed(seed, p))
    return HiddenLayer(B * base.weights, base.biases, p)


@dataclass
class Candidate:
    p: float
    alpha: float | None
    error: float | None
    surrogate: TrainedSurrogate | None
    alpha_at_edge: bool = False
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class SweepResult:
    config: SweepConfig
    candidates: list
    selected_p: float
    selected_report: SobolReport
    train: Dataset = field(repr=False, default=None)

    @property
    def selected(self) -> Candidate:
        return self.candidate(self.selected_p)

    def candidate(self, p: float) -> Candidate:
        for c in self.candidates:
            if c.p == p:
                return c
        raise KeyError(f"p={p!r} was not part of the sweep")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "alpha", "E_surr"])
        for c in self.candidates:
            fmt = lambda v: "nan" if v is None else f"{v:.17g}"  # noqa: E731
            w.writerow([f"{c.p:.17g}", fmt(c.alpha), fmt(c.error)])
        return buf.getvalue()

    def to_dict(self, include_surrogates: bool = False) -> dict:
        rows = []
        for c in self.candidates:
            row = {"p": c.p, "alpha": c.alpha, "E_surr": c.error, "alpha_at_edge": c.alpha_at_edge,
                   "mask_seed": mask_seed(self.config.seed, c.p).to_dict() if c.p else None,
                   "failure": c.failure}
            if include_surrogates and c.surrogate is not None:
                row["surrogate"] = surrogate_to_dict(c.surrogate)
            rows.append(row)
        return {
            "config": self.config.to_dict(),
            "base_seeds": {"weights": self.config.seed.child("weights").to_dict(),
                           "biases": self.config.seed.child("biases").to_dict()},
            "candidates": rows,
            "selected_p": self.selected_p,
        }

    def to_json(self, include_surrogates: bool = False) -> str:
        return json.dumps(self.to_dict(include_surrogates), indent=1, sort_keys=True)


def choose_alpha(factors: RidgeFactors, config: SweepConfig) -> tuple[float, bool]:
    if config.alpha_policy is AlphaPolicy.FIXED:
        return float(config.fixed_alpha), False
    path = compute_alpha_path(None, None, config.alpha_grid, factors=factors)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelectionWarning)
        if config.alpha_policy is AlphaPolicy.LCURVE:
            alpha = select_alpha_lcurve(path)
        else:
            alpha = select_alpha_gcv(path)
    grid = config.alpha_grid
    return alpha, alpha in (grid[0], grid[-1], grid[1], grid[-2])


def train_candidate(base: HiddenLayer, p: float, train: Dataset, validation: Dataset,
                    config: SweepConfig) -> Candidate:
    layer = sparsify(base, p, config.seed)
    factors = RidgeFactors(design_matrix(layer, train.inputs), train.outputs)
    alpha, edge = choose_alpha(factors, config)
    meta = {"base": config.seed.to_dict(), "p": p}
    if p:
        meta["mask"] = mask_seed(config.seed, p).to_dict()
    surrogate = ridge_train(layer, train, alpha, factors=factors, seed_metadata=meta)
    return Candidate(p, alpha, relative_error(surrogate, validation), surrogate, edge)


def run_sweep(train: Dataset, validation: Dataset, config: SweepConfig) -> SweepResult:
    if train.d != validation.d:
        raise ValueError("training and validation sets have different input dimensions")
    if validation.m == 0:
        raise ValueError("validation set is empty")
    if train.m < config.n:
        warnings.warn(f"training size {train.m} is below the neuron count {config.n}", stacklevel=2)
    base = draw_base_layer(config.n, train.d, config.seed)
    candidates = []
    for p in config.p_grid:
        try:
            cand = train_candidate(base, p, train, validation, config)
        except (SwelmError, ArithmeticError, np.linalg.LinAlgError, ZeroDivisionError) as exc:
            log.warning("sweep candidate p=%s failed: %s", p, exc)
            cand = Candidate(p, None, None, None, failure=f"{type(exc).__name__}: {exc}")
        candidates.append(cand)
        log.debug("p=%s alpha=%s E_surr=%s", p, cand.alpha, cand.error)
    good = [c for c in candidates if c.ok]
    if not good:
        raise SwelmError("every sweep candidate failed: " + "; ".join(c.failure for c in candidates))
    best = min(good, key=lambda c: (c.error, c.p))
    dense = candidates[0]
    if (config.improvement_threshold > 0 and dense.ok and best is not dense
            and best.error > (1.0 - config.improvement_threshold) * dense.error):
        best = dense
    return SweepResult(config, candidates, best.p, sobol_report(best.surrogate), train)


def replay(result: SweepResult, p: float, train: Dataset | None = None) -> TrainedSurrogate:
    """Rebuild one candidate from its recorded seeds and ridge parameter."""
    cand = result.candidate(p)
    if not cand.ok:
        raise SwelmError(f"candidate p={p!r} failed during the sweep: {cand.failure}")
    train = result.train if train is None else train
    if train is None:
        raise ValueError("replay needs the training set")
    base = draw_base_layer(result.config.n, train.d, result.config.seed)
    layer = sparsify(base, p, result.config.seed)
    return ridge_train(layer, train, cand.alpha, seed_metadata=cand.surrogate.seed_metadata)
