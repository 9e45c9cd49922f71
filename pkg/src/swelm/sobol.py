"""Closed-form moments and Sobol' indices of an exponential-activation ELM on [0, 1]^d.

All quantities reduce to quadratic forms ``sum_{j,i} a_j a_i M_{ji}`` with
``a_j = beta_j exp(b_j) prod_l eps(w_jl)`` and ``M`` built from the pairwise
log-ratios ``log eps(w_jl + w_il) - log eps(w_jl) - log eps(w_il)``.  Working
with log-ratios and ``expm1`` keeps the centred terms accurate when weights are
zero or nearly so, which is the normal case after sparsification.

Index sets passed to the public functions are 0-based.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .elm import TrainedSurrogate
from .errors import NumericalError

_SERIES_CUTOFF = 1e-4
_LOG_SERIES_CUTOFF = 0.1
CLAMP_RELATIVE = 1e-10
MAX_SUBSET = 20


def epsilon(t):
    """(e^t - 1) / t, equal to 1 at t = 0; the mean of exp(t x) for x ~ U(0, 1)."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, t)
    out = np.where(small, 1.0 + t / 2.0 * (1.0 + t / 3.0 * (1.0 + t / 4.0)), np.expm1(safe) / safe)
    return out[()] if out.ndim == 0 else out


def log_epsilon(t):
    """log(eps(t)) = t/2 + log(sinh(t/2) / (t/2)), accurate near 0 and for large |t|."""
    t = np.asarray(t, dtype=float)
    x = 0.5 * np.abs(t)
    out = np.empty_like(x)
    small = x < _LOG_SERIES_CUTOFF
    big = x > 20.0
    mid = ~(small | big)
    xs = x[small] ** 2
    # log(sinh x / x) = x^2/6 - x^4/180 + x^6/2835 - x^8/37800 + x^10/467775 - ...
    out[small] = xs * (1 / 6 - xs * (1 / 180 - xs * (1 / 2835 - xs * (1 / 37800 - xs / 467775))))
    out[mid] = np.log(np.sinh(x[mid]) / x[mid])
    xb = x[big]
    out[big] = xb - math.log(2.0) + np.log1p(-np.exp(-2.0 * xb)) - np.log(xb)
    out += 0.5 * t
    return out[()] if out.ndim == 0 else out


class _PairTerms:
    """Shared pieces of the double sums for one surrogate."""

    def __init__(self, surrogate: TrainedSurrogate):
        layer = surrogate.layer
        if layer.activation != "exp":
            raise ValueError(f"closed-form indices need the exp activation, got {layer.activation!r}")
        self.W = layer.weights
        self.n, self.d = self.W.shape
        self.log_eps = log_epsilon(self.W)
        # sums over inputs run in an order fixed by column content, so permuting
        # the inputs permutes the indices bit for bit
        self._rank = np.empty(self.d, dtype=np.int64)
        self._rank[np.lexsort(self.W[::-1])] = np.arange(self.d)
        beta = surrogate.output_weights
        log_mag = layer.biases + self.log_eps[:, np.argsort(self._rank)].sum(axis=1)
        self.a = beta * np.exp(log_mag)
        if not np.all(np.isfinite(self.a)):
            raise NumericalError("neuron moments overflow")

    def log_ratio(self, k: int) -> np.ndarray:
        w = self.W[:, k]
        le = self.log_eps[:, k]
        return log_epsilon(w[:, None] + w[None, :]) - le[:, None] - le[None, :]

    def log_ratio_sum(self, cols) -> np.ndarray:
        total = np.zeros((self.n, self.n))
        for k in sorted(cols, key=lambda c: self._rank[c]):
            total += self.log_ratio(k)
        return total

    def quad(self, M: np.ndarray, a: np.ndarray | None = None) -> float:
        a = self.a if a is None else a
        return math.fsum(a * (M @ a))


@dataclass
class SobolReport:
    mean: float
    variance: float
    first_order: np.ndarray
    total: np.ndarray
    subset_entries: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.first_order)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "S_k", "S_k_tot"])
        for k, (s, st) in enumerate(zip(self.first_order, self.total), start=1):
            w.writerow([k, f"{s:.17g}", f"{st:.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "first_order": [float(v) for v in self.first_order],
            "total": [float(v) for v in self.total],
            "subsets": [
                {"u": [int(i) for i in u], "S_u": float(s), "S_u_tot": float(st)}
                for u, s, st in self.subset_entries
            ],
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def analytic_mean(surrogate: TrainedSurrogate) -> float:
    return math.fsum(_PairTerms(surrogate).a)


def _variance(terms: _PairTerms, L: np.ndarray):
    raw = terms.quad(np.expm1(L))
    abs_a = np.abs(terms.a)
    scale = terms.quad(np.exp(L) + 1.0, abs_a)
    clamped = False
    if raw < 0:
        if raw < -CLAMP_RELATIVE * scale:
            raise NumericalError(f"variance formula returned {raw:.3e} (scale {scale:.3e})")
        raw, clamped = 0.0, True
    return raw, {"variance_scale": scale, "variance_clamped": clamped}


def analytic_variance(surrogate: TrainedSurrogate) -> float:
    terms = _PairTerms(surrogate)
    var, _ = _variance(terms, terms.log_ratio_sum(range(terms.d)))
    return var


def _require_variance(var: float):
    if var <= 0:
        raise NumericalError("constant surrogate: variance is zero, Sobol' indices undefined")


def sobol_report(surrogate: TrainedSurrogate, subsets=()) -> SobolReport:
    """Mean, variance, first-order and total indices (plus any requested subsets)."""
    terms = _PairTerms(surrogate)
    d = terms.d
    L = terms.log_ratio_sum(range(d))
    var, diag = _variance(terms, L)
    _require_variance(var)
    partial = np.empty(d)
    closed_complement = np.empty(d)
    for k in range(d):
        lr = terms.log_ratio(k)
        partial[k] = terms.quad(np.expm1(lr))
        closed_complement[k] = terms.quad(np.expm1(L - lr))
    diag["first_order_numerators"] = partial.tolist()
    diag["total_numerators"] = (var - closed_complement).tolist()
    report = SobolReport(
        mean=math.fsum(terms.a),
        variance=var,
        first_order=partial / var,
        total=1.0 - closed_complement / var,
        diagnostics=diag,
    )
    for u in subsets:
        s, st = _subset(terms, var, u)
        report.subset_entries.append((tuple(sorted(u)), s, st))
    return report


def first_order_indices(surrogate: TrainedSurrogate) -> np.ndarray:
    return sobol_report(surrogate).first_order


def total_indices(surrogate: TrainedSurrogate) -> np.ndarray:
    return sobol_report(surrogate).total


def _check_subset(u, d):
    u = sorted(set(int(i) for i in u))
    if not u:
        raise ValueError("index set must be nonempty")
    if u[0] < 0 or u[-1] >= d:
        raise ValueError(f"index set {u} not contained in 0..{d - 1}")
    if len(u) > MAX_SUBSET:
        raise ValueError(f"index sets larger than {MAX_SUBSET} are not supported")
    return u


def _subset(terms: _PairTerms, var: float, u):
    u = _check_subset(u, terms.d)
    # sum over v, v' subsets of u with sign (-1)^(|v|+|v'|) collapses to prod_{l in u} (R_l - 1)
    M = np.ones((terms.n, terms.n))
    for k in u:
        M *= np.expm1(terms.log_ratio(k))
    rest = [k for k in range(terms.d) if k not in u]
    s_u = terms.quad(M) / var
    s_tot = 1.0 - terms.quad(np.expm1(terms.log_ratio_sum(rest))) / var
    return s_u, s_tot


def subset_index(surrogate: TrainedSurrogate, u) -> tuple[float, float]:
    """ANOVA index S_u of the pure interaction term and total index S_u^tot."""
    terms = _PairTerms(surrogate)
    var, _ = _variance(terms, terms.log_ratio_sum(range(terms.d)))
    _require_variance(var)
    return _subset(terms, var, u)


def closed_index(surrogate: TrainedSurrogate, u) -> float:
    """var(E[f | x_u]) / var(f)."""
    terms = _PairTerms(surrogate)
    var, _ = _variance(terms, terms.log_ratio_sum(range(terms.d)))
    _require_variance(var)
    u = _check_subset(u, terms.d)
    return terms.quad(np.expm1(terms.log_ratio_sum(u))) / var


def all_subsets(d: int, max_order: int):
    for r in range(1, max_order + 1):
        yield from combinations(range(d), r)
