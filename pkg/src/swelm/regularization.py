"""Ridge parameter selection over a log-spaced grid: L-curve corner and GCV."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .elm import RidgeFactors
from .errors import NumericalError, SelectionWarning

DEFAULT_ALPHAS = np.logspace(-8, 1, 25)


@dataclass(frozen=True, eq=False)
class AlphaPath:
    alphas: np.ndarray
    residual_norms: np.ndarray
    solution_norms: np.ndarray
    gcv_scores: np.ndarray

    def __len__(self):
        return len(self.alphas)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "residual_norm", "solution_norm", "gcv"])
        for row in zip(self.alphas, self.residual_norms, self.solution_norms, self.gcv_scores):
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


def _check_grid(alphas) -> np.ndarray:
    a = np.asarray(alphas, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("empty alpha grid")
    if not np.all(np.isfinite(a)):
        raise NumericalError("non-finite alpha")
    if np.any(a <= 0):
        raise ValueError("alphas must be positive")
    if np.any(np.diff(a) <= 0):
        raise ValueError("alphas must be strictly increasing")
    return a


def compute_alpha_path(H, y, alphas, factors: RidgeFactors | None = None) -> AlphaPath:
    a = _check_grid(alphas)
    if factors is None:
        factors = RidgeFactors(H, y)
    m = factors.m
    res = np.array([factors.residual_norm(al) for al in a])
    sol = np.array([factors.solution_norm(al) for al in a])
    dof = np.array([factors.filter_factors(al).sum() for al in a])
    denom = (m - dof) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        gcv = np.where(denom > 0, m * res**2 / denom, np.inf)
    return AlphaPath(a, res, sol, gcv)


def menger_curvature(path: AlphaPath) -> np.ndarray:
    """Signed curvature at interior grid points of (log residual, log solution norm).

    Positive values mark the convex corner of the L.  Endpoints get NaN.
    """
    with np.errstate(divide="ignore"):
        x = np.log(path.residual_norms)
        y = np.log(path.solution_norms)
    kappa = np.full(len(x), np.nan)
    for i in range(1, len(x) - 1):
        ax, ay = x[i] - x[i - 1], y[i] - y[i - 1]
        bx, by = x[i + 1] - x[i], y[i + 1] - y[i]
        cx, cy = x[i + 1] - x[i - 1], y[i + 1] - y[i - 1]
        lengths = np.hypot(ax, ay) * np.hypot(bx, by) * np.hypot(cx, cy)
        if np.isfinite(lengths) and lengths > 0:
            kappa[i] = 2.0 * (ax * by - ay * bx) / lengths
    return kappa


def _argmax_prefer_large(values: np.ndarray) -> int:
    best = np.nanmax(values)
    return int(np.flatnonzero(values == best)[-1])


def select_alpha_lcurve(path: AlphaPath) -> float:
    if len(path) < 3:
        raise ValueError("L-curve corner needs at least 3 grid points")
    kappa = menger_curvature(path)
    if not np.any(np.isfinite(kappa)):
        warnings.warn("degenerate L-curve; returning the largest alpha", SelectionWarning, stacklevel=2)
        return float(path.alphas[-1])
    k = _argmax_prefer_large(kappa)
    if kappa[k] <= 0:
        warnings.warn("L-curve has no convex corner on this grid", SelectionWarning, stacklevel=2)
    return float(path.alphas[k])


def select_alpha_gcv(path: AlphaPath) -> float:
    if len(path) < 1:
        raise ValueError("empty path")
    scores = np.asarray(path.gcv_scores, dtype=float)
    best = np.min(scores)
    k = int(np.flatnonzero(scores == best)[-1])
    if len(path) > 1 and k in (0, len(path) - 1):
        warnings.warn("GCV minimum on a grid endpoint", SelectionWarning, stacklevel=2)
    return float(path.alphas[k])
