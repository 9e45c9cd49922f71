import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swelm.elm import Dataset, draw_base_layer, ridge_train
from swelm.errors import SwelmError
from swelm.experiment import make_datasets, sweep_model
from swelm.models import interaction
from swelm.rng import SeedSpec
from swelm.sobol import sobol_report
from swelm.sweep import (DEFAULT_P_GRID, AlphaPolicy, SweepConfig, mask_seed, replay, run_sweep, sparsify,
                         train_candidate)


def _data(seed=0, m=120, s=40, d=4, delta=0.5):
    return make_datasets(interaction(d, delta), m, s, seed)


def _config(**kw):
    base = dict(n=30, seed=SeedSpec(1, "sweep"), p_grid=(0.0, 0.3, 0.6))
    base.update(kw)
    return SweepConfig(**base)


def test_default_grid():
    assert DEFAULT_P_GRID[0] == 0.0 and DEFAULT_P_GRID[-1] == 0.95 and len(DEFAULT_P_GRID) == 11


@pytest.mark.parametrize("grid", [(0.1, 0.2), (0.0, 0.5, 0.5), (0.0, 1.0), ()])
def test_config_rejects_bad_grid(grid):
    with pytest.raises(ValueError):
        _config(p_grid=grid)


def test_fixed_policy_needs_alpha():
    with pytest.raises(ValueError):
        _config(alpha_policy=AlphaPolicy.FIXED)


def test_dense_only_sweep_is_standard_elm():
    train, val = _data()
    cfg = _config(p_grid=(0.0,), alpha_policy=AlphaPolicy.FIXED, fixed_alpha=1e-3)
    res = run_sweep(train, val, cfg)
    direct = ridge_train(draw_base_layer(cfg.n, train.d, cfg.seed), train, 1e-3)
    assert np.array_equal(res.selected.surrogate.output_weights, direct.output_weights)
    ref = sobol_report(direct)
    assert np.array_equal(res.selected_report.first_order, ref.first_order)
    assert len(res.to_csv().splitlines()) == 2


def test_shared_base_and_unmasked_bias():
    train, val = _data()
    cfg = _config()
    res = run_sweep(train, val, cfg)
    base = draw_base_layer(cfg.n, train.d, cfg.seed)
    for c in res.candidates:
        W = c.surrogate.layer.weights
        assert np.all((W == 0) | (W == base.weights))
        assert np.array_equal(c.surrogate.layer.biases, base.biases)
        assert c.surrogate.layer.sparsity_p == c.p


def test_selection_is_argmin_with_small_p_ties():
    train, val = _data()
    res = run_sweep(train, val, _config())
    errors = [c.error for c in res.candidates]
    assert res.selected.error == min(errors)
    assert res.selected_p == min(c.p for c in res.candidates if c.error == min(errors))
    assert np.array_equal(res.selected_report.total, sobol_report(res.selected.surrogate).total)


def test_adding_grid_points_keeps_existing_candidates():
    train, val = _data()
    small = run_sweep(train, val, _config(p_grid=(0.0, 0.6)))
    large = run_sweep(train, val, _config(p_grid=(0.0, 0.3, 0.6, 0.9)))
    for p in (0.0, 0.6):
        assert np.array_equal(small.candidate(p).surrogate.layer.weights, large.candidate(p).surrogate.layer.weights)
        assert small.candidate(p).error == large.candidate(p).error


def test_replay_is_bit_exact():
    train, val = _data()
    res = run_sweep(train, val, _config())
    again = replay(res, res.selected_p)
    assert np.array_equal(again.output_weights, res.selected.surrogate.output_weights)
    rep = sobol_report(again)
    assert np.array_equal(rep.first_order, res.selected_report.first_order)
    assert np.array_equal(rep.total, res.selected_report.total)
    dense = replay(res, 0.0)
    direct = ridge_train(draw_base_layer(30, train.d, SeedSpec(1, "sweep")), train, res.candidate(0.0).alpha)
    assert np.array_equal(dense.output_weights, direct.output_weights)
    with pytest.raises(KeyError):
        replay(res, 0.31)


def test_serialisation_is_deterministic():
    train, val = _data()
    a = run_sweep(train, val, _config()).to_json()
    b = run_sweep(train, val, _config()).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["candidates"][1]["mask_seed"] == mask_seed(SeedSpec(1, "sweep"), 0.3).to_dict()
    assert run_sweep(train, val, _config()).to_csv().splitlines()[0] == "p,alpha,E_surr"


def test_failing_candidate_is_marked_and_excluded(monkeypatch):
    import swelm.sweep as sweep_mod

    real = sweep_mod.train_candidate

    def flaky(base, p, *args):
        if p == 0.3:
            raise SwelmError("synthetic failure")
        return real(base, p, *args)

    monkeypatch.setattr(sweep_mod, "train_candidate", flaky)
    train, val = _data()
    res = run_sweep(train, val, _config())
    bad = res.candidate(0.3)
    assert not bad.ok and "synthetic" in bad.failure
    assert res.selected_p != 0.3
    assert "nan" in res.to_csv()


def test_all_candidates_failing_raises(monkeypatch):
    import swelm.sweep as sweep_mod

    def broken(*args):
        raise SwelmError("nope")

    monkeypatch.setattr(sweep_mod, "train_candidate", broken)
    train, val = _data()
    with pytest.raises(SwelmError):
        run_sweep(train, val, _config())


def test_small_training_set_warns():
    train, val = _data(m=20)
    with pytest.warns(UserWarning, match="below the neuron count"):
        run_sweep(train, val, _config())


def test_improvement_threshold_falls_back_to_dense():
    grid = {"p_grid": (0.0, 0.5, 0.9)}
    plain = sweep_model(interaction(8, 1e-8), 300, 50, 100, 0, **grid)
    assert plain.selected_p == 0.9
    ratio = plain.selected.error / plain.candidate(0.0).error
    kept = sweep_model(interaction(8, 1e-8), 300, 50, 100, 0, improvement_threshold=0.5 * (1 - ratio), **grid)
    assert kept.selected_p == 0.9
    strict = sweep_model(interaction(8, 1e-8), 300, 50, 100, 0, improvement_threshold=1 - 0.5 * ratio, **grid)
    assert strict.selected_p == 0.0


@pytest.mark.parametrize("policy", [AlphaPolicy.LCURVE, AlphaPolicy.GCV])
def test_alpha_comes_from_the_grid(policy):
    train, val = _data()
    cfg = _config(alpha_policy=policy)
    for c in run_sweep(train, val, cfg).candidates:
        assert c.alpha in cfg.alpha_grid


def test_interaction_sweep_gains_from_sparsity():
    # the full-size recipe lives in the acceptance suite; this is a quick smoke version
    res = sweep_model(interaction(15, 1e-8), 900, 100, 300, 0)
    assert res.selected.error <= 0.1 * res.candidate(0.0).error


@settings(max_examples=15)
@given(st.integers(0, 2**32), st.floats(0.05, 0.95))
def test_masking_only_zeroes(seed, p):
    base = draw_base_layer(10, 4, SeedSpec(seed, "b"))
    W = sparsify(base, p, SeedSpec(seed, "b")).weights
    assert np.all((W == 0) | (W == base.weights))
