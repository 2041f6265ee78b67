"""Tests for coupling samplers and the minimum-disagreement LP."""

import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from dpminimax import (
    DegenerateMarginal,
    DiscreteDistribution,
    DomainError,
    TooLarge,
    estimate_disagreement,
    exponential_races,
    maximal_pair,
    min_disagreement_lp,
    product_lift,
    shared_uniform_bernoulli,
    tv,
)
from conftest import empirical_marginal_l1, random_distribution

TRIALS = 20_000


def example2_marginals():
    half = np.array([0.5, 0.5])
    return [
        DiscreteDistribution((-1, 0), half),
        DiscreteDistribution((0, 1), half),
        DiscreteDistribution((1, -1), half),
    ]


def linprog_min_disagreement(marginals):
    """Independent LP oracle on the coupling polytope via scipy."""
    supports = [m.support() for m in marginals]
    combos = list(itertools.product(*(atoms for atoms, _ in supports)))
    N = len(marginals)
    cost = [
        sum(1.0 for i in range(N) for j in range(i + 1, N) if combo[i] != combo[j])
        for combo in combos
    ]
    rows, rhs = [], []
    for i, (atoms, weights) in enumerate(supports):
        for atom, w in zip(atoms, weights):
            rows.append([1.0 if combo[i] == atom else 0.0 for combo in combos])
            rhs.append(float(w))
    res = linprog(cost, A_eq=np.array(rows), b_eq=np.array(rhs), bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


# ------------------------------------------------------------ maximal pair


def test_maximal_pair_marginals_and_disagreement():
    rng = np.random.default_rng(101)
    for case in range(10):
        p = random_distribution(rng)
        q = random_distribution(rng)
        sampler = maximal_pair(p, q)
        draws = sampler.sample(TRIALS, seed=case)
        assert draws.shape == (TRIALS, 2)
        assert empirical_marginal_l1(draws[:, 0], p) <= 0.02
        assert empirical_marginal_l1(draws[:, 1], q) <= 0.02
        matrix = estimate_disagreement(sampler, TRIALS, seed=case)
        gap = abs(matrix.estimates[0, 1] - tv(p, q))
        assert gap <= 4.0 * max(matrix.stderr[0, 1], 1e-4)


def test_maximal_pair_identical_marginals_never_disagree():
    p = DiscreteDistribution.from_weights([0.3, 0.7])
    draws = maximal_pair(p, p).sample(5_000, seed=0)
    assert np.all(draws[:, 0] == draws[:, 1])


def test_maximal_pair_disjoint_supports_always_disagree():
    p = DiscreteDistribution((0, 1), np.array([0.5, 0.5]))
    q = DiscreteDistribution((2, 3), np.array([0.4, 0.6]))
    draws = maximal_pair(p, q).sample(5_000, seed=1)
    assert np.all(draws[:, 0] != draws[:, 1])
    assert empirical_marginal_l1(draws[:, 1], q) <= 0.03


# ------------------------------------------------------------ shared uniform


def test_shared_uniform_pairwise_disagreement_is_parameter_gap():
    ps = (0.2, 0.5, 0.9)
    expected = {(0, 1): 0.3, (0, 2): 0.7, (1, 2): 0.4}
    sampler = shared_uniform_bernoulli(ps)
    matrix = estimate_disagreement(sampler, TRIALS, seed=7)
    for (i, j), gap in expected.items():
        tol = 4.0 * max(matrix.stderr[i, j], 1e-4)
        assert abs(matrix.estimates[i, j] - gap) <= tol


def test_shared_uniform_marginals():
    ps = (0.2, 0.5, 0.9)
    sampler = shared_uniform_bernoulli(ps)
    draws = sampler.sample(TRIALS, seed=3)
    for i, p in enumerate(ps):
        freq = float(draws[:, i].mean())
        assert abs(freq - p) <= 4.0 * math.sqrt(p * (1 - p) / TRIALS)


def test_shared_uniform_validation():
    with pytest.raises(DomainError):
        shared_uniform_bernoulli([0.5])
    with pytest.raises(DegenerateMarginal):
        shared_uniform_bernoulli([0.5, 1.2])


# ------------------------------------------------------- exponential races


def test_races_marginals_are_exact():
    rng = np.random.default_rng(103)
    for case in range(8):
        marginals = [random_distribution(rng) for _ in range(3)]
        draws = exponential_races(marginals).sample(TRIALS, seed=case)
        for i, m in enumerate(marginals):
            assert empirical_marginal_l1(draws[:, i], m) <= 0.025


def test_races_disagreement_within_bound():
    rng = np.random.default_rng(107)
    for case in range(8):
        marginals = [random_distribution(rng) for _ in range(3)]
        sampler = exponential_races(marginals)
        matrix = estimate_disagreement(sampler, TRIALS, seed=100 + case)
        for i in range(3):
            for j in range(i + 1, 3):
                t = tv(marginals[i], marginals[j])
                bound = 2.0 * t / (1.0 + t)
                assert matrix.estimates[i, j] <= bound + 3.0 * matrix.stderr[i, j] + 1e-9


def test_races_needs_two_marginals():
    with pytest.raises(DomainError):
        exponential_races([DiscreteDistribution.from_weights([1.0])])


# ------------------------------------------------------------- product lift


def test_product_lift_shapes_and_expected_hamming():
    p = DiscreteDistribution.bernoulli(0.3)
    q = DiscreteDistribution.bernoulli(0.5)
    base = maximal_pair(p, q)
    n = 10
    lifted = product_lift(base, n)
    draws = lifted.sample(TRIALS, seed=5)
    assert draws.shape == (TRIALS, 2, n)
    hamming = np.count_nonzero(draws[:, 0, :] != draws[:, 1, :], axis=1)
    delta = tv(p, q)
    expected = n * delta
    stderr = math.sqrt(n * delta * (1 - delta) / TRIALS)
    assert abs(float(hamming.mean()) - expected) <= 4.0 * stderr


def test_product_lift_disagreement_matches_complement_power():
    p = DiscreteDistribution.bernoulli(0.3)
    q = DiscreteDistribution.bernoulli(0.5)
    n = 10
    matrix = estimate_disagreement(product_lift(maximal_pair(p, q), n), TRIALS, seed=9)
    delta = tv(p, q)
    expected = 1.0 - (1.0 - delta) ** n
    assert abs(matrix.estimates[0, 1] - expected) <= 4.0 * max(matrix.stderr[0, 1], 1e-4)


def test_product_lift_validation():
    base = maximal_pair(
        DiscreteDistribution.bernoulli(0.3), DiscreteDistribution.bernoulli(0.5)
    )
    with pytest.raises(DomainError):
        product_lift(base, 0)
    with pytest.raises(DomainError):
        product_lift(product_lift(base, 2), 2)


# ---------------------------------------------------------------- sampling


def test_sampling_is_deterministic_in_seed():
    rng = np.random.default_rng(109)
    p = random_distribution(rng)
    q = random_distribution(rng)
    for sampler in (maximal_pair(p, q), exponential_races([p, q])):
        a = sampler.sample(500, seed=42)
        b = sampler.sample(500, seed=42)
        c = sampler.sample(500, seed=43)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


def test_draw_budgets():
    p = DiscreteDistribution.bernoulli(0.3)
    q = DiscreteDistribution.bernoulli(0.5)
    assert maximal_pair(p, q).draw_budget() == 3
    assert shared_uniform_bernoulli([0.2, 0.5]).draw_budget() == 1
    assert exponential_races([p, q]).draw_budget() == 2
    assert product_lift(exponential_races([p, q]), 4).draw_budget() == 8


def test_sample_rejects_nonpositive_trials():
    p = DiscreteDistribution.bernoulli(0.3)
    with pytest.raises(DomainError):
        maximal_pair(p, p).sample(0, seed=0)


def test_disagreement_matrix_is_symmetric_with_zero_diagonal():
    sampler = shared_uniform_bernoulli([0.2, 0.5, 0.9])
    matrix = estimate_disagreement(sampler, 2_000, seed=1)
    assert np.array_equal(matrix.estimates, matrix.estimates.T)
    assert np.all(np.diag(matrix.estimates) == 0.0)
    assert matrix.trials == 2_000


# ----------------------------------------------------------------- LP


def test_lp_example2_value_exceeds_tv_sum():
    marginals = example2_marginals()
    value = min_disagreement_lp(marginals)
    assert abs(value - 2.0) <= 1e-9
    tv_sum = sum(
        tv(marginals[i], marginals[j])
        for i in range(3)
        for j in range(i + 1, 3)
    )
    assert abs(tv_sum - 1.5) <= 1e-12
    assert value > tv_sum


def test_lp_pair_equals_tv():
    rng = np.random.default_rng(113)
    for _ in range(20):
        p = random_distribution(rng, max_atoms=5)
        q = random_distribution(rng, max_atoms=5)
        assert abs(min_disagreement_lp([p, q]) - tv(p, q)) <= 1e-9


def test_lp_matches_scipy_on_random_triples():
    rng = np.random.default_rng(127)
    for _ in range(10):
        marginals = [random_distribution(rng, max_atoms=4) for _ in range(3)]
        ours = min_disagreement_lp(marginals)
        oracle = linprog_min_disagreement(marginals)
        assert abs(ours - oracle) <= 1e-7


def test_lp_dominated_by_every_sampler():
    rng = np.random.default_rng(131)
    marginals = [random_distribution(rng, max_atoms=4) for _ in range(3)]
    lp_value = min_disagreement_lp(marginals)
    matrix = estimate_disagreement(exponential_races(marginals), TRIALS, seed=2)
    total = sum(matrix.estimates[i, j] for i in range(3) for j in range(i + 1, 3))
    slack = 3.0 * sum(matrix.stderr[i, j] for i in range(3) for j in range(i + 1, 3))
    assert total >= lp_value - slack - 1e-9


def test_lp_validation_and_caps():
    with pytest.raises(DomainError):
        min_disagreement_lp([DiscreteDistribution.bernoulli(0.5)])
    wide = DiscreteDistribution(tuple(range(22)), np.full(22, 1.0 / 22.0))
    with pytest.raises(TooLarge):
        min_disagreement_lp([wide, wide, wide])
