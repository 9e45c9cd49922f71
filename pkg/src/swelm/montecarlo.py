"""Pick-freeze Monte Carlo estimates of first-order and total Sobol' indices.

First order uses the Saltelli (2010) estimator, total the Jansen estimator,
both normalised by the sample variance of the pooled f(A), f(B) values.
Standard errors come from a bootstrap over the N base rows, resampling every
derived evaluation with its row so that the pairing is preserved.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError
from .rng import SeedSpec

MIN_BASE_SAMPLES = 100


@dataclass(frozen=True, eq=False)
class PickFreezeEstimate:
    first_order: np.ndarray
    total: np.ndarray
    first_order_se: np.ndarray
    total_se: np.ndarray
    n_base: int
    evaluations_used: int

    @property
    def d(self) -> int:
        return len(self.first_order)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "S_k", "S_k_tot", "S_k_stderr", "S_k_tot_stderr"])
        for k in range(self.d):
            w.writerow([k + 1] + [f"{v[k]:.17g}" for v in
                                  (self.first_order, self.total, self.first_order_se, self.total_se)])
        return buf.getvalue()


def _evaluate(f, X):
    y = np.asarray(f(X), dtype=float).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise DimensionError(f"function returned {y.shape[0]} values for {X.shape[0]} points")
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NumericalError(f"non-finite model output {y[i]!r} at x = {X[i].tolist()}")
    return y


def _indices(fA, fB, fAB):
    pooled = np.concatenate([fA, fB], axis=-1)
    var = np.var(pooled, axis=-1)
    # centring keeps the product estimator's noise from scaling with |mean| / std
    mu = np.mean(pooled, axis=-1, keepdims=True)
    first = np.mean((fB - mu) * (fAB - fA), axis=-1) / var
    total = 0.5 * np.mean((fA - fAB) ** 2, axis=-1) / var
    return first, total


def estimate_sobol_mc(f, d: int, N: int, seed: SeedSpec, n_bootstrap: int = 200) -> PickFreezeEstimate:
    """Estimate indices of ``f`` (maps an (N, d) array to N outputs) from N (d + 2) evaluations."""
    if N < MIN_BASE_SAMPLES:
        raise ValueError(f"need at least {MIN_BASE_SAMPLES} base samples, got {N}")
    A = seed.child("A").generator().random((N, d))
    B = seed.child("B").generator().random((N, d))
    fA, fB = _evaluate(f, A), _evaluate(f, B)
    fAB = np.empty((d, N))
    for k in range(d):
        AB = A.copy()
        AB[:, k] = B[:, k]
        fAB[k] = _evaluate(f, AB)
    if np.var(np.concatenate([fA, fB])) == 0:
        raise NumericalError("function is constant on the sample; indices undefined")
    first, total = _indices(fA, fB, fAB)

    rng = seed.child("bootstrap").generator()
    boot_first = np.empty((n_bootstrap, d))
    boot_total = np.empty((n_bootstrap, d))
    for r in range(n_bootstrap):
        idx = rng.integers(0, N, N)
        a, b = fA[idx], fB[idx]
        boot_first[r], boot_total[r] = _indices(a[None, :], b[None, :], fAB[:, idx])
    return PickFreezeEstimate(first, total, boot_first.std(axis=0, ddof=1), boot_total.std(axis=0, ddof=1),
                              N, N * (d + 2))


@dataclass(frozen=True, eq=False)
class Comparison:
    analytic_first: np.ndarray
    analytic_total: np.ndarray
    mc: PickFreezeEstimate
    first_order_diff: np.ndarray
    total_diff: np.ndarray
    first_order_flags: np.ndarray
    total_flags: np.ndarray
    n_sigma: float

    @property
    def any_flag(self) -> bool:
        return bool(self.first_order_flags.any() or self.total_flags.any())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "S_analytic", "S_mc", "S_stderr", "S_flag",
                    "S_tot_analytic", "S_tot_mc", "S_tot_stderr", "S_tot_flag"])
        g = lambda v: f"{v:.17g}"  # noqa: E731
        for k in range(len(self.first_order_diff)):
            w.writerow([k + 1, g(self.analytic_first[k]), g(self.mc.first_order[k]), g(self.mc.first_order_se[k]),
                        int(self.first_order_flags[k]), g(self.analytic_total[k]), g(self.mc.total[k]),
                        g(self.mc.total_se[k]), int(self.total_flags[k])])
        return buf.getvalue()


def compare_reports(analytic, mc: PickFreezeEstimate, n_sigma: float = 3.0) -> Comparison:
    """Flag indices where the analytic value sits more than ``n_sigma`` bootstrap errors from MC."""
    s = np.asarray(analytic.first_order, dtype=float)
    st = np.asarray(analytic.total, dtype=float)
    if s.shape != mc.first_order.shape or st.shape != mc.total.shape:
        raise DimensionError("analytic and Monte Carlo reports have different dimensions")
    d1 = np.abs(s - mc.first_order)
    d2 = np.abs(st - mc.total)
    return Comparison(s, st, mc, d1, d2, d1 > n_sigma * mc.first_order_se, d2 > n_sigma * mc.total_se, n_sigma)
