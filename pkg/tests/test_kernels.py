"""Backend parity and stream-derivation tests for the numerical kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from dpminimax import derived_rng, spawn_keys
from dpminimax._kernels import (
    HAVE_NUMBA,
    _dpsgml_trials_numpy,
    _pair_assignments_numpy,
    _races_winners_numpy,
    backend,
    dpsgml_trials,
    pair_assignments,
    races_winners,
)

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend inactive")


def test_backend_reports_known_name():
    assert backend() in ("numba", "numpy")


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, DPMINIMAX_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from dpminimax._kernels import backend; print(backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


# -------------------------------------------------------------- race winners


def _races_reference(clocks, probs):
    trials, k = clocks.shape
    out = np.empty((trials, probs.shape[0]), dtype=np.int64)
    for t in range(trials):
        for i in range(probs.shape[0]):
            best, best_val = -1, np.inf
            for j in range(k):
                if probs[i, j] > 0.0:
                    val = clocks[t, j] / probs[i, j]
                    if val < best_val:
                        best, best_val = j, val
            out[t, i] = best
    return out


def _random_race_inputs(rng, trials=64):
    k = int(rng.integers(2, 7))
    n_marg = int(rng.integers(2, 5))
    clocks = rng.exponential(1.0, size=(trials, k))
    probs = rng.random((n_marg, k))
    probs[rng.random((n_marg, k)) < 0.3] = 0.0
    probs[:, 0] += 0.05
    probs /= probs.sum(axis=1, keepdims=True)
    return clocks, probs


def test_races_winners_matches_reference():
    rng = derived_rng(201)
    for _ in range(10):
        clocks, probs = _random_race_inputs(rng)
        expected = _races_reference(clocks, probs)
        assert np.array_equal(races_winners(clocks, probs), expected)
        assert np.array_equal(_races_winners_numpy(clocks, probs), expected)


@needs_numba
def test_races_winners_backends_agree_exactly():
    rng = derived_rng(203)
    for _ in range(10):
        clocks, probs = _random_race_inputs(rng)
        assert np.array_equal(races_winners(clocks, probs), _races_winners_numpy(clocks, probs))


def test_races_winners_skips_zero_probability_atoms():
    clocks = np.array([[0.01, 5.0]])
    probs = np.array([[0.0, 1.0]])
    assert races_winners(clocks, probs)[0, 0] == 1


# --------------------------------------------------------- pair assignments


def _pair_reference(u, agree_prob, common_cdf, pos_cdf, neg_cdf):
    out = np.empty((u.shape[0], 2), dtype=np.int64)
    for t in range(u.shape[0]):
        if u[t, 0] < agree_prob:
            idx = min(int(np.searchsorted(common_cdf, u[t, 1], side="right")), len(common_cdf) - 1)
            out[t] = idx, idx
        elif len(pos_cdf) > 0:
            x = min(int(np.searchsorted(pos_cdf, u[t, 1], side="right")), len(pos_cdf) - 1)
            y = min(int(np.searchsorted(neg_cdf, u[t, 2], side="right")), len(neg_cdf) - 1)
            out[t] = x, y
        else:
            out[t] = 0, 0
    return out


def _random_pair_inputs(rng, trials=256):
    u = rng.random((trials, 3))
    agree_prob = float(rng.random())
    common = np.sort(rng.random(int(rng.integers(1, 5))))
    common /= common[-1]
    pos = np.sort(rng.random(int(rng.integers(1, 4))))
    pos /= pos[-1]
    neg = np.sort(rng.random(len(pos)))
    neg /= neg[-1]
    return u, agree_prob, common, pos, neg


def test_pair_assignments_matches_reference():
    rng = derived_rng(205)
    for _ in range(10):
        args = _random_pair_inputs(rng)
        expected = _pair_reference(*args)
        assert np.array_equal(pair_assignments(*args), expected)
        assert np.array_equal(_pair_assignments_numpy(*args), expected)


@needs_numba
def test_pair_assignments_backends_agree_exactly():
    rng = derived_rng(207)
    for _ in range(10):
        args = _random_pair_inputs(rng)
        assert np.array_equal(pair_assignments(*args), _pair_assignments_numpy(*args))


def test_pair_assignments_empty_residual_degenerates_to_common():
    u = np.array([[0.99, 0.4, 0.6]])
    out = pair_assignments(u, 0.5, np.array([0.5, 1.0]), np.array([]), np.array([]))
    assert np.array_equal(out, [[0, 0]])


# ------------------------------------------------------------ DP-SGML steps


def _random_dpsgml_inputs(rng, trials=4, n=12, d=3, K=6, m=5):
    data = rng.standard_normal((trials, n, d))
    theta0 = 0.1 * rng.standard_normal((trials, d))
    batch_idx = rng.integers(0, n, size=(trials, K, m))
    step_noise = rng.standard_normal((trials, K, d))
    center = np.zeros(d)
    return data, theta0, batch_idx, step_noise, 1.5, 1.0, 0.25, 0.3, center, 2.0


def test_dpsgml_trials_single_step_hand_check():
    data = np.array([[[1.0, -1.0], [3.0, 1.0]]])
    theta0 = np.array([[0.5, 0.5]])
    batch_idx = np.array([[[0, 1]]])
    step_noise = np.zeros((1, 1, 2))
    out = dpsgml_trials(data, theta0, batch_idx, step_noise, 1.0, 100.0, 0.5, 0.0, np.zeros(2), 10.0)
    grads = np.array([[0.5, -1.5], [2.5, 0.5]])
    expected = theta0[0] + 0.5 * grads.mean(axis=0)
    assert np.allclose(out[0], expected, atol=1e-12)


def test_dpsgml_trials_clipping_and_projection():
    data = np.array([[[10.0, 0.0]]])
    theta0 = np.array([[0.0, 0.0]])
    batch_idx = np.array([[[0]]])
    step_noise = np.zeros((1, 1, 2))
    out = dpsgml_trials(data, theta0, batch_idx, step_noise, 1.0, 2.0, 1.0, 0.0, np.zeros(2), 1.5)
    # gradient (10, 0) clips to (2, 0); the step lands at (2, 0) and projects
    assert np.allclose(out[0], [1.5, 0.0], atol=1e-12)


@needs_numba
def test_dpsgml_trials_backends_agree():
    rng = derived_rng(209)
    for _ in range(5):
        args = _random_dpsgml_inputs(rng)
        assert np.allclose(dpsgml_trials(*args), _dpsgml_trials_numpy(*args), rtol=1e-10, atol=1e-12)


# ------------------------------------------------------------- stream tags


def test_derived_rng_is_deterministic():
    a = derived_rng(7, 1, 2).standard_normal(5)
    b = derived_rng(7, 1, 2).standard_normal(5)
    assert np.array_equal(a, b)


def test_derived_rng_tags_separate_streams():
    base = derived_rng(7).standard_normal(5)
    tagged = derived_rng(7, 0).standard_normal(5)
    other = derived_rng(7, 1).standard_normal(5)
    assert not np.array_equal(base, tagged)
    assert not np.array_equal(tagged, other)


def test_derived_rng_rejects_negative_tags():
    with pytest.raises(ValueError):
        derived_rng(3, -1)


def test_spawn_keys_enumerate_trial_streams():
    keys = spawn_keys(5, 3, 9)
    assert keys == [(5, 9, 0), (5, 9, 1), (5, 9, 2)]
    direct = derived_rng(5, 9, 1).standard_normal(4)
    via_key = derived_rng(*keys[1]).standard_normal(4)
    assert np.array_equal(direct, via_key)
