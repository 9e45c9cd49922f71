"""Genetic oscillator reaction-rate equations (9 species, 16 mass-action reactions).

Species order: P_a, P_r, mRNA_a, mRNA_r, A, R, C, P_a-A, P_r-A.
Rate order follows the reaction table: alpha_A, alpha_R, beta_A, beta_R,
gamma_C, gamma_A, theta_A, gamma_R, theta_R, delta_A, delta_R, delta_MA,
delta_MR, delta_A', alpha_a, alpha_r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from ..errors import NumericalError
from . import stiff

SPECIES = ("P_a", "P_r", "mRNA_a", "mRNA_r", "A", "R", "C", "P_a-A", "P_r-A")
RATE_NAMES = ("alpha_A", "alpha_R", "beta_A", "beta_R", "gamma_C", "gamma_A", "theta_A", "gamma_R",
              "theta_R", "delta_A", "delta_R", "delta_MA", "delta_MR", "delta_A'", "alpha_a", "alpha_r")
NOMINAL_RATES = (50.0, 0.01, 50.0, 5.0, 20.0, 1.0, 50.0, 1.0, 1.0, 1.0, 0.2, 10.0, 0.5, 1.0, 10.0, 5000.0)
R_INDEX = 5

# P_a = P_r = 1, everything else absent
DEFAULT_INITIAL_STATE = (1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@nb.njit(cache=True)
def rhs(y, k):
    Pa, Pr, mA, mR, A, R, C, PaA, PrA = y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7], y[8]
    v0 = k[0] * Pa
    v1 = k[1] * Pr
    v2 = k[2] * mA
    v3 = k[3] * mR
    v4 = k[4] * A * R
    v5 = k[5] * Pa * A
    v6 = k[6] * PaA
    v7 = k[7] * Pr * A
    v8 = k[8] * PrA
    v9 = k[9] * A
    v10 = k[10] * R
    v11 = k[11] * mA
    v12 = k[12] * mR
    v13 = k[13] * C
    v14 = k[14] * k[0] * PaA
    v15 = k[15] * k[1] * PrA
    out = np.empty(9)
    out[0] = -v5 + v6
    out[1] = -v7 + v8
    out[2] = v0 - v11 + v14
    out[3] = v1 - v12 + v15
    out[4] = v2 - v4 - v5 + v6 - v7 + v8 - v9
    out[5] = v3 - v4 - v10 + v13
    out[6] = v4 - v13
    out[7] = v5 - v6
    out[8] = v7 - v8
    return out


@nb.njit(cache=True)
def jacobian(y, k):
    Pa, Pr, A, R = y[0], y[1], y[4], y[5]
    J = np.zeros((9, 9))
    J[0, 0] = -k[5] * A
    J[0, 4] = -k[5] * Pa
    J[0, 7] = k[6]
    J[1, 1] = -k[7] * A
    J[1, 4] = -k[7] * Pr
    J[1, 8] = k[8]
    J[2, 0] = k[0]
    J[2, 2] = -k[11]
    J[2, 7] = k[14] * k[0]
    J[3, 1] = k[1]
    J[3, 3] = -k[12]
    J[3, 8] = k[15] * k[1]
    J[4, 0] = -k[5] * A
    J[4, 1] = -k[7] * A
    J[4, 2] = k[2]
    J[4, 4] = -k[4] * R - k[5] * Pa - k[7] * Pr - k[9]
    J[4, 5] = -k[4] * A
    J[4, 7] = k[6]
    J[4, 8] = k[8]
    J[5, 3] = k[3]
    J[5, 4] = -k[4] * R
    J[5, 5] = -k[4] * A - k[10]
    J[5, 6] = k[13]
    J[6, 4] = k[4] * R
    J[6, 5] = k[4] * A
    J[6, 6] = -k[13]
    J[7, 0] = k[5] * A
    J[7, 4] = k[5] * Pa
    J[7, 7] = -k[6]
    J[8, 1] = k[7] * A
    J[8, 4] = k[7] * Pr
    J[8, 8] = -k[8]
    return J


@nb.njit(cache=True)
def _trapezoid(t, v):
    s = 0.0
    for i in range(t.shape[0] - 1):
        s += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1])
    return s


@nb.njit
def _batch_qoi(rates, y0, t_out, rtol, atol, h0, max_steps):
    m = rates.shape[0]
    T = t_out[t_out.shape[0] - 1]
    out = np.empty(m)
    status = np.zeros(m, dtype=np.int64)
    for i in range(m):
        states, st, _ = stiff.tr_bdf2(rhs, jacobian, y0, rates[i], t_out, rtol, atol, h0, max_steps, -atol)
        status[i] = st
        out[i] = _trapezoid(t_out, states[:, R_INDEX]) / T
    return out, status


@dataclass(frozen=True)
class OscillatorParams:
    nominal_rates: tuple = NOMINAL_RATES
    perturbation: float = 0.05
    horizon: float = 200.0
    n_grid: int = 2000
    initial_state: tuple = DEFAULT_INITIAL_STATE
    rtol: float = 1e-6
    atol: float = 1e-9
    max_steps: int = 200_000
    initial_step: float = 1e-4

    def __post_init__(self):
        if len(self.nominal_rates) != 16:
            raise ValueError("the oscillator has 16 rate parameters")
        if len(self.initial_state) != 9:
            raise ValueError("the oscillator has 9 species")
        if self.horizon <= 0 or self.n_grid < 2:
            raise ValueError("need a positive horizon and at least 2 output points")

    def rates(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        nominal = np.asarray(self.nominal_rates, dtype=float)
        return nominal * (1.0 - self.perturbation + 2.0 * self.perturbation * x)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_grid)


_STATUS = {stiff.STEP_UNDERFLOW: "step size underflow", stiff.MAX_STEPS: "step budget exhausted",
           stiff.NEWTON_FAILURE: "Newton iteration failed"}


def trajectory(params: OscillatorParams, rates, t_out=None):
    """States at the output grid for one rate vector (diagnostics and tests)."""
    t = params.grid() if t_out is None else np.asarray(t_out, dtype=float)
    states, status, steps = stiff.tr_bdf2(rhs, jacobian, np.asarray(params.initial_state, dtype=float),
                                          np.asarray(rates, dtype=float), t, params.rtol, params.atol,
                                          params.initial_step, params.max_steps, -params.atol)
    if status != stiff.OK:
        raise NumericalError(f"oscillator integration failed ({_STATUS[status]}) after {steps} steps")
    return t, states


def mean_repressor(params: OscillatorParams, X) -> np.ndarray:
    """Time average of R over [0, horizon] for each row of X in [0, 1]^16."""
    rates = params.rates(X)
    y0 = np.asarray(params.initial_state, dtype=float)
    values, status = _batch_qoi(rates, y0, params.grid(), params.rtol, params.atol, params.initial_step,
                                params.max_steps)
    bad = np.flatnonzero(status)
    if bad.size:
        i = int(bad[0])
        raise NumericalError(f"oscillator integration failed ({_STATUS[int(status[i])]}) "
                             f"at x = {np.atleast_2d(X)[i].tolist()}")
    return values


def eval_genetic_oscillator(x, params: OscillatorParams) -> float:
    return float(mean_repressor(params, np.asarray(x, dtype=float)[None, :])[0])
