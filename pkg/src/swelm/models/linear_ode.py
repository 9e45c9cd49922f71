"""Linear ODE x' = -A x with A = Q diag(lambda) Q^T and uncertain eigenvalues."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import SeedSpec, sample_gaussian_matrix


def build_orthogonal(seed: SeedSpec, size: int) -> np.ndarray:
    """Q factor of a standard-normal matrix, signs fixed so that diag(R) >= 0."""
    P = sample_gaussian_matrix(size, size, seed)
    Q, R = np.linalg.qr(P)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * signs


@dataclass(frozen=True, eq=False)
class LinearOdeParams:
    size: int = 50
    q_seed: SeedSpec = SeedSpec(0, "orthogonal")
    t_final: float = 10.0
    output_index: int = -1
    perturbation: float = 0.05
    Q: np.ndarray | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be positive")
        Q = build_orthogonal(self.q_seed, self.size) if self.Q is None else np.array(self.Q, dtype=float)
        if Q.shape != (self.size, self.size):
            raise ValueError("Q must be size x size")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        # row of Q for the output, times Q^T x0 with x0 = ones
        weights = Q[self.output_index] * (Q.T @ np.ones(self.size))
        weights.setflags(write=False)
        object.__setattr__(self, "_modal_weights", weights)

    def eigenvalues(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.arange(1, self.size + 1)
        return (1.0 / k) * (1.0 + self.perturbation * (2.0 * x - 1.0))


def eval_linear_ode(x, params: LinearOdeParams):
    """Output component of Q exp(-t Lambda(x)) Q^T x0, for a point or an (m, size) batch."""
    lam = params.eigenvalues(x)
    return np.exp(-params.t_final * lam) @ params._modal_weights
