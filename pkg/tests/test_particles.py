import types

import numpy as np
import pytest

from mvtrack.particles import (DegenerateFrameWarning, MotionConfig,
                               box_from_state, candidate_residuals,
                               likelihood, make_states, normalize_weights,
                               propagate, resample, select_best)
from mvtrack.solver import Problem


def test_motion_config_rejects_negative_std():
    with pytest.raises(ValueError):
        MotionConfig(std_x=-1.0)


def test_make_states_and_box_roundtrip():
    states = make_states(5, (10.0, 20.0, 30.0, 40.0))
    assert states.shape == (5, 4)
    box = box_from_state(states[0], (30.0, 40.0))
    assert np.allclose(box, (10.0, 20.0, 30.0, 40.0))


def test_propagate_zero_noise_is_identity():
    states = make_states(4, (10, 10, 20, 20))
    cfg = MotionConfig(std_x=0, std_y=0, std_s=0, std_r=0)
    out = propagate(states, cfg, np.random.default_rng(0), (100, 100))
    assert np.array_equal(out, states)


def test_propagate_deterministic_under_seed():
    states = make_states(50, (30, 30, 20, 20))
    cfg = MotionConfig()
    a = propagate(states, cfg, np.random.default_rng(7), (320, 240))
    b = propagate(states, cfg, np.random.default_rng(7), (320, 240))
    assert np.array_equal(a, b)


def test_propagate_statistical_drift():
    n = 100_000
    states = make_states(n, (980, 980, 40, 40))
    cfg = MotionConfig(std_x=4.0, std_y=4.0, std_s=0.02, std_r=0.005)
    out = propagate(states, cfg, np.random.default_rng(123), (2000, 2000))
    for col, std in [(0, 4.0), (1, 4.0), (2, 0.02), (3, 0.005)]:
        drift = abs(out[:, col].mean() - states[0, col])
        assert drift < 3.0 * std / np.sqrt(n)


def test_propagate_clamps():
    states = make_states(1000, (2, 2, 10, 10))
    cfg = MotionConfig(std_x=50, std_y=50, std_s=5.0, std_r=5.0)
    out = propagate(states, cfg, np.random.default_rng(5), (50, 40))
    assert out[:, 0].min() >= 0 and out[:, 0].max() <= 49
    assert out[:, 1].min() >= 0 and out[:, 1].max() <= 39
    assert out[:, 2].min() >= 0.5 and out[:, 2].max() <= 2.0
    assert out[:, 3].min() >= 0.5 and out[:, 3].max() <= 2.0


def _toy_problem(seed=0, n=3):
    rng = np.random.default_rng(seed)
    views = []
    for d in (4, 5):
        D = rng.normal(size=(d, 2))
        X = rng.normal(size=(d, n))
        views.append((X, D))
    return Problem(views=tuple(views))


def test_likelihood_exact_reconstruction_is_one():
    rng = np.random.default_rng(1)
    D = rng.normal(size=(4, 2))
    Ctrue = rng.uniform(0, 1, size=(2, 3))
    X = D @ Ctrue
    p = Problem(views=((X, D),))
    sol = types.SimpleNamespace(C=Ctrue)
    w = likelihood(sol, p, alpha=30.0)
    assert np.allclose(w, 1.0)


def test_likelihood_formula_value():
    # one candidate with total squared residual 0.1 at alpha=30
    D = np.array([[1.0]])
    X = np.array([[1.0 + np.sqrt(0.1)]])
    p = Problem(views=((X, D),))
    sol = types.SimpleNamespace(C=np.array([[1.0]]))
    w = likelihood(sol, p, 30.0)
    assert np.isclose(w[0], np.exp(-3.0), atol=1e-12)
    assert np.isclose(w[0], 0.049787, atol=1e-6)


def test_likelihood_monotone_in_residual():
    p = _toy_problem(2, n=5)
    rng = np.random.default_rng(3)
    C = rng.uniform(0, 1, size=(2, 10))
    sol = types.SimpleNamespace(C=C)
    res = candidate_residuals(p, C)
    w = likelihood(sol, p, 30.0)
    order_res = np.argsort(res)
    order_w = np.argsort(w)[::-1]
    assert np.array_equal(order_res, order_w)


def test_likelihood_shape_mismatch():
    p = _toy_problem(4)
    sol = types.SimpleNamespace(C=np.zeros((2, 5)))
    with pytest.raises(ValueError):
        likelihood(sol, p, 30.0)


def test_select_best_examples():
    states = make_states(3, (0, 0, 10, 10))
    idx, box, degenerate = select_best(states, [0.1, 0.9, 0.3], (10, 10))
    assert idx == 2 and not degenerate
    idx, _, _ = select_best(states, [0.4, 0.4, 0.4], (10, 10))
    assert idx == 1
    idx_scaled, _, _ = select_best(states, [0.2, 1.8, 0.6], (10, 10))
    assert idx_scaled == 2


def test_select_best_zero_weight_fallback():
    states = make_states(3, (0, 0, 10, 10))
    with pytest.warns(DegenerateFrameWarning):
        idx, _, degenerate = select_best(states, [0.0, 0.0, 0.0], (10, 10),
                                         residuals=[3.0, 1.0, 2.0])
    assert idx == 2 and degenerate
    with pytest.raises(ValueError):
        select_best(states, [0.0, 0.0, 0.0], (10, 10))


def test_normalize_weights():
    w = normalize_weights([1.0, 2.0, 5.0])
    assert abs(w.sum() - 1.0) < 1e-12
    with pytest.raises(ValueError):
        normalize_weights([0.0, 0.0])


def test_resample_degenerate_weight():
    states = make_states(4, (0, 0, 10, 10))
    states[:, 0] = [1, 2, 3, 4]
    out, w = resample(states, [0.0, 1.0, 0.0, 0.0], np.random.default_rng(0))
    assert np.all(out[:, 0] == 2)
    assert np.allclose(w, 0.25)


def test_resample_deterministic():
    states = make_states(10, (5, 5, 4, 4))
    states[:, 0] = np.arange(10)
    weights = np.random.default_rng(1).uniform(0.1, 1.0, 10)
    a, _ = resample(states, weights, np.random.default_rng(42))
    b, _ = resample(states, weights, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_resample_zero_sum_keeps_states():
    states = make_states(3, (0, 0, 10, 10))
    with pytest.warns(DegenerateFrameWarning):
        out, w = resample(states, [0.0, 0.0, 0.0], np.random.default_rng(0))
    assert np.array_equal(out, states)
    assert np.allclose(w, 1.0 / 3.0)


def test_resample_multiplicity_matches_weights():
    n = 4
    weights = np.array([0.5, 0.3, 0.15, 0.05])
    states = make_states(n, (0, 0, 10, 10))
    states[:, 0] = np.arange(n)
    rng = np.random.default_rng(9)
    counts = np.zeros(n)
    trials = 10_000
    for _ in range(trials):
        out, _ = resample(states, weights, rng)
        for i in range(n):
            counts[i] += np.sum(out[:, 0] == i)
    fractions = counts / (n * trials)
    assert np.all(np.abs(fractions - weights) < 0.02)
