import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swelm.errors import SelectionWarning
from swelm.regularization import (DEFAULT_ALPHAS, AlphaPath, compute_alpha_path, menger_curvature,
                                  select_alpha_gcv, select_alpha_lcurve)


def test_default_grid():
    assert len(DEFAULT_ALPHAS) == 25
    assert DEFAULT_ALPHAS[0] == pytest.approx(1e-8) and DEFAULT_ALPHAS[-1] == pytest.approx(10.0)


def test_identity_path():
    path = compute_alpha_path(np.eye(2), np.ones(2), [1.0])
    assert len(path) == 1
    assert path.residual_norms[0] == pytest.approx(np.sqrt(2) / 2, rel=1e-15)
    assert path.solution_norms[0] == pytest.approx(np.sqrt(2) / 2, rel=1e-15)
    # m = 2, dof = 1: 2 * 0.5 / 1
    assert path.gcv_scores[0] == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("grid", [[1.0, 1.0], [2.0, 1.0], [0.0, 1.0], [-1.0, 1.0], []])
def test_bad_grids(grid):
    with pytest.raises(ValueError):
        compute_alpha_path(np.eye(2), np.ones(2), grid)


def test_gcv_against_direct_formula():
    rng = np.random.default_rng(0)
    H, y = rng.random((30, 6)), rng.random(30)
    alphas = [1e-4, 1e-2, 1.0]
    path = compute_alpha_path(H, y, alphas)
    for a, score in zip(alphas, path.gcv_scores):
        influence = H @ np.linalg.solve(H.T @ H + a * np.eye(6), H.T)
        r = y - influence @ y
        assert score == pytest.approx(30 * (r @ r) / (30 - np.trace(influence)) ** 2, rel=1e-9)


def _right_angle(k, size=9):
    # residual constant then increasing; solution norm decreasing then constant: corner at k
    x = np.concatenate([np.zeros(k), np.arange(size - k, dtype=float)])
    y = np.concatenate([np.arange(k, 0, -1, dtype=float), np.zeros(size - k)])
    return AlphaPath(np.logspace(-4, 0, size), np.exp(x), np.exp(y), np.ones(size))


@pytest.mark.parametrize("k", [2, 4, 6])
def test_lcurve_finds_right_angle(k):
    assert select_alpha_lcurve(_right_angle(k)) == _right_angle(k).alphas[k]


def test_lcurve_needs_three_points():
    with pytest.raises(ValueError):
        select_alpha_lcurve(compute_alpha_path(np.eye(2), np.ones(2), [1.0, 2.0]))


def test_lcurve_degenerate_path_warns():
    path = AlphaPath(np.array([1.0, 2.0, 3.0]), np.ones(3), np.ones(3), np.ones(3))
    with pytest.warns(SelectionWarning):
        assert select_alpha_lcurve(path) == 3.0


def test_lcurve_noisy_gaussian_system_is_interior():
    rng = np.random.default_rng(42)
    H = rng.standard_normal((50, 20))
    y = H @ rng.standard_normal(20) + 1e-2 * rng.standard_normal(50)
    path = compute_alpha_path(H, y, DEFAULT_ALPHAS)
    alpha = select_alpha_lcurve(path)
    assert DEFAULT_ALPHAS[0] < alpha < DEFAULT_ALPHAS[-1]
    # exhaustive scan: the chosen point is the curvature maximum and it is positive
    kappa = menger_curvature(path)
    assert kappa[list(DEFAULT_ALPHAS).index(alpha)] == np.nanmax(kappa) > 0


def test_gcv_single_point():
    path = compute_alpha_path(np.eye(3), np.arange(3.0), [0.5])
    assert select_alpha_gcv(path) == 0.5


def test_gcv_argmin():
    path = AlphaPath(np.array([1.0, 2.0, 3.0]), np.ones(3), np.ones(3), np.array([3.0, 1.0, 2.0]))
    assert select_alpha_gcv(path) == 2.0


def test_gcv_ties_prefer_large_alpha():
    path = AlphaPath(np.array([1.0, 2.0, 3.0, 4.0]), np.ones(4), np.ones(4), np.array([3.0, 1.0, 1.0, 2.0]))
    assert select_alpha_gcv(path) == 3.0


def test_gcv_noiseless_system_picks_smallest():
    rng = np.random.default_rng(3)
    H = rng.standard_normal((40, 10))
    y = H @ rng.standard_normal(10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelectionWarning)
        assert select_alpha_gcv(compute_alpha_path(H, y, DEFAULT_ALPHAS)) == DEFAULT_ALPHAS[0]


def test_csv_columns():
    text = compute_alpha_path(np.eye(2), np.ones(2), [0.1, 1.0]).to_csv().splitlines()
    assert text[0] == "alpha,residual_norm,solution_norm,gcv"
    assert len(text) == 3


problems = st.tuples(st.integers(0, 2**32), st.integers(2, 12), st.integers(1, 10)).filter(lambda t: t[1] >= t[2])


@given(problems)
def test_path_monotonicity(problem):
    seed, m, n = problem
    rng = np.random.default_rng(seed)
    path = compute_alpha_path(rng.standard_normal((m, n)), rng.standard_normal(m), DEFAULT_ALPHAS)
    r, s = path.residual_norms, path.solution_norms
    assert np.all(np.diff(r) >= -1e-10 * r[1:])
    assert np.all(np.diff(s) <= 1e-10 * s[:-1])


@given(problems, st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3))
def test_gcv_scale_equivariant(problem, c):
    seed, m, n = problem
    rng = np.random.default_rng(seed)
    H, y = rng.standard_normal((m + 2, n)), rng.standard_normal(m + 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelectionWarning)
        a1 = select_alpha_gcv(compute_alpha_path(H, y, DEFAULT_ALPHAS))
        a2 = select_alpha_gcv(compute_alpha_path(H, c * y, DEFAULT_ALPHAS))
    assert a1 == a2


@given(problems)
def test_selection_stays_on_grid(problem):
    seed, m, n = problem
    rng = np.random.default_rng(seed)
    path = compute_alpha_path(rng.standard_normal((m, n)), rng.standard_normal(m), DEFAULT_ALPHAS)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelectionWarning)
        assert select_alpha_lcurve(path) in DEFAULT_ALPHAS
        assert select_alpha_gcv(path) in DEFAULT_ALPHAS
