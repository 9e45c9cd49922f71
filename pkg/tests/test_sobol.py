import math
from itertools import combinations

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swelm.errors import NumericalError
from swelm.sobol import (MAX_SUBSET, analytic_mean, analytic_variance, closed_index, epsilon, first_order_indices,
                         log_epsilon, sobol_report, subset_index, total_indices)

from oracles import make_surrogate, quadrature_anova, random_surrogate, tensor_values

E = math.e
EPS1, EPS2 = E - 1, (E**2 - 1) / 2


# --- epsilon -------------------------------------------------------------------

def test_epsilon_values():
    assert epsilon(0.0) == 1.0
    assert epsilon(1.0) == pytest.approx(E - 1, rel=1e-15)
    assert epsilon(-1.0) == pytest.approx(1 - 1 / E, rel=1e-15)


@pytest.mark.parametrize("t", [1e-300, -1e-17, 1e-12, 3e-5, -9e-5, 1e-4, 2e-4, 0.02, -0.3, 5.0, -40.0, 300.0])
def test_epsilon_relative_accuracy(t):
    with mpmath.workdps(50):
        exact = float(mpmath.expm1(mpmath.mpf(t)) / mpmath.mpf(t))
        log_exact = float(mpmath.log(mpmath.expm1(mpmath.mpf(t)) / mpmath.mpf(t)))
    assert epsilon(t) == pytest.approx(exact, rel=4e-16)
    assert log_epsilon(t) == pytest.approx(log_exact, rel=1e-14, abs=1e-300)


def test_epsilon_vectorised():
    t = np.array([0.0, 1.0, -1.0])
    np.testing.assert_allclose(epsilon(t), [1.0, E - 1, 1 - 1 / E], rtol=1e-15)


# --- mean / variance -----------------------------------------------------------

def test_mean_examples():
    assert analytic_mean(make_surrogate(np.zeros((1, 3)), [0.0], [1.0])) == 1.0
    assert analytic_mean(make_surrogate([[1.0]], [0.0], [1.0])) == pytest.approx(E - 1, rel=1e-15)
    two = make_surrogate([[1.0], [-1.0]], [0.0, 0.0], [1.0, 1.0])
    assert analytic_mean(two) == pytest.approx(2 * math.sinh(1.0), rel=1e-15)


def test_variance_examples():
    assert analytic_variance(make_surrogate(np.zeros((2, 2)), [0.1, 0.2], [1.0, -3.0])) == 0.0
    assert analytic_variance(make_surrogate([[1.0]], [0.0], [1.0])) == pytest.approx(EPS2 - EPS1**2, rel=1e-14)
    v = analytic_variance(make_surrogate([[1.0, 1.0]], [0.0], [1.0]))
    assert v == pytest.approx(EPS2**2 - EPS1**4, rel=1e-14)
    assert v == pytest.approx(1.4877978386794, rel=1e-12)


def test_constant_surrogate_has_no_indices():
    with pytest.raises(NumericalError, match="constant surrogate"):
        first_order_indices(make_surrogate(np.zeros((1, 2)), [0.0], [1.0]))
    with pytest.raises(NumericalError):
        total_indices(make_surrogate(np.zeros((1, 2)), [0.0], [1.0]))


def test_wrong_activation_rejected():
    from swelm.elm import HiddenLayer, TrainedSurrogate, TrainingStats

    layer = HiddenLayer(np.ones((1, 1)), np.zeros(1), activation="sigmoid")
    sur = TrainedSurrogate(layer, np.ones(1), 1.0, TrainingStats(0, 0, 0))
    with pytest.raises(ValueError):
        analytic_mean(sur)


def test_cancelling_neurons_clamp_to_zero():
    # two identical neurons with opposite output weights: exact variance 0, rounding may go negative
    W = np.array([[3.0, -2.0], [3.0, -2.0]])
    rep_var = analytic_variance(make_surrogate(W, [0.5, 0.5], [1.0, -1.0]))
    assert rep_var == 0.0


# --- indices -------------------------------------------------------------------

def test_single_input_dependence():
    s = make_surrogate([[1.0, 0.0]], [0.0], [1.0])
    np.testing.assert_allclose(first_order_indices(s), [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(total_indices(s), [1.0, 0.0], atol=1e-15)


def test_two_factor_exponential():
    s = make_surrogate([[1.0, 1.0]], [0.0], [1.0])
    rep = sobol_report(s)
    exact_s = (EPS2 - EPS1**2) * EPS1**2 / (EPS2**2 - EPS1**4)
    np.testing.assert_allclose(rep.first_order, [exact_s] * 2, rtol=1e-13)
    np.testing.assert_allclose(rep.first_order, [0.48031277040736] * 2, rtol=1e-12)
    np.testing.assert_allclose(rep.total, 1 - rep.first_order, rtol=1e-13)


def test_full_set_pure_interaction_and_closed_index():
    s = make_surrogate([[1.0, 1.0]], [0.0], [1.0])
    s12, s12_tot = subset_index(s, [0, 1])
    # the pure interaction part is what remains after both main effects
    s1, s2 = first_order_indices(s)
    assert s12 == pytest.approx(1.0 - s1 - s2, abs=1e-13)
    assert s12_tot == pytest.approx(1.0, abs=1e-12)
    assert closed_index(s, [0, 1]) == pytest.approx(1.0, abs=1e-12)


def test_subset_index_oracle_by_quadrature():
    rng = np.random.default_rng(9)
    s = make_surrogate(rng.standard_normal((5, 3)), rng.standard_normal(5), rng.uniform(-1, 1, 5))
    F, w = tensor_values(s, 3, 32)
    var = np.einsum("ijk,i,j,k->", (F - np.einsum("ijk,i,j,k->", F, w, w, w)) ** 2, w, w, w)
    # ANOVA term f_{01} = E[f|x0,x1] - E[f|x0] - E[f|x1] + f0
    g01 = np.einsum("ijk,k->ij", F, w)
    g0, g1 = g01 @ w, w @ g01
    f0 = w @ g0
    f01 = g01 - g0[:, None] - g1[None, :] + f0
    s01 = np.einsum("ij,i,j->", f01**2, w, w) / var
    assert subset_index(s, [0, 1])[0] == pytest.approx(s01, abs=1e-10)


def test_subset_size_limit():
    s = make_surrogate(np.ones((1, MAX_SUBSET + 1)) * 0.1, [0.0], [1.0])
    with pytest.raises(ValueError):
        subset_index(s, range(MAX_SUBSET + 1))
    with pytest.raises(ValueError):
        subset_index(s, [])
    with pytest.raises(ValueError):
        subset_index(s, [MAX_SUBSET + 1])


def test_report_exports():
    rep = sobol_report(make_surrogate([[1.0, 0.5]], [0.0], [1.0]), subsets=[(0, 1)])
    lines = rep.to_csv().splitlines()
    assert lines[0] == "k,S_k,S_k_tot" and len(lines) == 3
    doc = rep.to_dict()
    assert {"mean", "variance", "first_order", "total", "subsets", "diagnostics"} <= set(doc)
    assert "first_order_numerators" in doc["diagnostics"]
    assert doc["subsets"][0]["u"] == [0, 1]


def test_large_layer_is_fast():
    import time

    rng = np.random.default_rng(0)
    s = make_surrogate(rng.standard_normal((1000, 16)) * 0.5, rng.standard_normal(1000), rng.uniform(-1, 1, 1000))
    t0 = time.perf_counter()
    sobol_report(s)
    assert time.perf_counter() - t0 < 10.0


# --- oracle equivalence ----------------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_matches_quadrature(seed):
    s = random_surrogate(np.random.default_rng(1000 + seed))
    ref = quadrature_anova(s, s.d)
    rep = sobol_report(s)
    assert rep.mean == pytest.approx(ref["mean"], rel=1e-9)
    assert rep.variance == pytest.approx(ref["variance"], rel=1e-9)
    np.testing.assert_allclose(rep.first_order, ref["first_order"], atol=1e-8)
    np.testing.assert_allclose(rep.total, ref["total"], atol=1e-8)


# --- properties ------------------------------------------------------------------

surrogates = st.integers(0, 2**32).map(lambda seed: random_surrogate(np.random.default_rng(seed), 10, 6))


@given(surrogates)
def test_index_bounds(s):
    rep = sobol_report(s)
    tol = 1e-8
    assert np.all(rep.first_order >= -tol)
    assert np.all(rep.first_order <= rep.total + 1e-10)
    assert np.all(rep.total <= 1 + tol)
    assert rep.first_order.sum() <= 1 + tol
    assert rep.total.sum() >= 1 - tol


@given(st.integers(0, 2**32), st.integers(1, 6), st.integers(1, 10))
def test_additive_layer(seed, d, n):
    rng = np.random.default_rng(seed)
    W = np.zeros((n, d))
    W[np.arange(n), rng.integers(0, d, n)] = rng.standard_normal(n)
    s = make_surrogate(W, rng.standard_normal(n), rng.uniform(-1, 1, n))
    if analytic_variance(s) <= 1e-12:
        return
    rep = sobol_report(s)
    assert rep.first_order.sum() == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(rep.total, rep.first_order, atol=1e-10)


@given(surrogates, st.floats(-1e6, 1e6).filter(lambda c: abs(c) > 1e-6))
def test_beta_scaling_invariance(s, c):
    scaled = make_surrogate(s.layer.weights, s.layer.biases, c * s.output_weights)
    a, b = sobol_report(s), sobol_report(scaled)
    np.testing.assert_allclose(b.first_order, a.first_order, atol=1e-12)
    np.testing.assert_allclose(b.total, a.total, atol=1e-12)
    assert b.variance == pytest.approx(c * c * a.variance, rel=1e-12)


@given(surrogates, st.randoms(use_true_random=False))
def test_permutation_equivariance(s, rnd):
    perm = list(range(s.d))
    rnd.shuffle(perm)
    permuted = make_surrogate(s.layer.weights[:, perm], s.layer.biases, s.output_weights)
    a, b = sobol_report(s), sobol_report(permuted)
    assert np.array_equal(b.first_order, a.first_order[perm])
    assert np.array_equal(b.total, a.total[perm])
    assert (b.mean, b.variance) == (a.mean, a.variance)


@given(surrogates, st.data())
def test_duplicated_neuron(s, data):
    j = data.draw(st.integers(0, s.layer.n - 1))
    W = np.vstack([s.layer.weights, s.layer.weights[j]])
    b = np.append(s.layer.biases, s.layer.biases[j])
    beta = np.append(s.output_weights, 0.5 * s.output_weights[j])
    beta[j] *= 0.5
    a, c = sobol_report(s), sobol_report(make_surrogate(W, b, beta))
    np.testing.assert_allclose(c.first_order, a.first_order, atol=1e-12)
    np.testing.assert_allclose(c.total, a.total, atol=1e-12)


@given(surrogates)
def test_singleton_subsets_match_per_variable(s):
    rep = sobol_report(s)
    for k in range(s.d):
        sk, sk_tot = subset_index(s, [k])
        assert sk == pytest.approx(rep.first_order[k], abs=1e-12)
        assert sk_tot == pytest.approx(rep.total[k], abs=1e-12)
    assert subset_index(s, range(s.d))[1] == pytest.approx(1.0, abs=1e-12)


@given(surrogates)
def test_pure_terms_sum_to_one(s):
    total = sum(subset_index(s, u)[0] for r in range(1, s.d + 1) for u in combinations(range(s.d), r))
    assert total == pytest.approx(1.0, abs=1e-9)
