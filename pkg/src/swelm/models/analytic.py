"""Benchmarks with closed-form Sobol' indices: the interaction family and the g-function."""

from __future__ import annotations

import numpy as np


def eval_interaction(x, delta: float):
    """sum_i x_i + delta * prod_j (1 + x_j); accepts a point or an (m, d) batch."""
    x = np.asarray(x, dtype=float)
    return x.sum(axis=-1) + delta * np.prod(1.0 + x, axis=-1)


def interaction_variances(d: int, delta: float) -> tuple[float, float, float]:
    """(var f, var E[f | x_k], var E[f | x_{-k}]) for the interaction benchmark."""
    if d < 1:
        raise ValueError("d must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    total = d * delta / 9 * 1.5**d + delta**2 * ((7 / 3) ** d - 2.25**d) + d / 12
    main = delta**2 / 27 * 2.25**d + delta / 9 * 1.5**d + 1 / 12
    complement = ((d - 1) * delta / 9 * 1.5**d + delta**2 * (27 / 28 * (7 / 3) ** d - 2.25**d)
                  + (d - 1) / 12)
    return total, main, complement


def interaction_indices(d: int, delta: float) -> tuple[np.ndarray, np.ndarray]:
    total, main, complement = interaction_variances(d, delta)
    s = np.full(d, main / total)
    st = np.full(d, 1.0 - complement / total)
    return s, st


def _check_a(a):
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("need at least one g-function coefficient")
    if np.any(a <= -1.0):
        raise ValueError("g-function coefficients must exceed -1")
    return a


def eval_gfunction(x, a):
    a = _check_a(a)
    x = np.asarray(x, dtype=float)
    return np.prod((np.abs(4.0 * x - 2.0) + a) / (1.0 + a), axis=-1)


def gfunction_indices(a) -> tuple[np.ndarray, np.ndarray]:
    a = _check_a(a)
    partial = (1.0 / 3.0) / (1.0 + a) ** 2
    logs = np.log1p(partial)
    # expm1 of a log-sum avoids cancellation in prod(1 + V_i) - 1 when every V_i is tiny
    total_var = np.expm1(logs.sum())
    s = partial / total_var
    others = np.exp(logs.sum() - logs)
    return s, s * others
