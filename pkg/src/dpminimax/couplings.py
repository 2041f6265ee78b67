"""Couplings of finite marginals and their disagreement structure.

A coupling sampler draws joint realizations (X_1, ..., X_N) whose i-th
component is exactly distributed as the i-th marginal.  Draw t consumes a
fixed-size block of a counter-based stream derived from the seed, so
estimates are reproducible and independent of how draws are partitioned
across workers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from ._rng import derived_rng
from ._simplex import solve_min
from .divergences import DiscreteDistribution
from .errors import DegenerateMarginal, DomainError, TooLarge

__all__ = [
    "CouplingSampler",
    "DisagreementMatrix",
    "maximal_pair",
    "shared_uniform_bernoulli",
    "exponential_races",
    "product_lift",
    "estimate_disagreement",
    "min_disagreement_lp",
]

_LP_CAP = 10_000


@dataclass(frozen=True)
class DisagreementMatrix:
    """Empirical pairwise disagreement rates with binomial standard errors."""

    estimates: np.ndarray = field(compare=False)
    stderr: np.ndarray = field(compare=False)
    trials: int = 0
    seed: int = 0


@dataclass(frozen=True)
class CouplingSampler:
    """A joint sampler over N finite marginals.

    kind is one of "maximal_pair", "shared_uniform", "races", "product_lift".
    For "product_lift" each draw is an n-vector per marginal and two
    components disagree when any coordinate differs.
    """

    kind: str
    marginals: tuple[DiscreteDistribution, ...]
    base: Optional["CouplingSampler"] = None
    n: int = 1

    @property
    def n_marginals(self) -> int:
        return len(self.marginals)

    def draw_budget(self) -> int:
        """Number of stream variates one draw consumes."""
        if self.kind == "maximal_pair":
            return 3
        if self.kind == "shared_uniform":
            return 1
        if self.kind == "races":
            return len(_universe(self.marginals))
        if self.kind == "product_lift":
            return self.n * self.base.draw_budget()
        raise DomainError(f"unknown coupling kind {self.kind!r}")

    def sample(self, trials: int, seed: int) -> np.ndarray:
        """Draw ``trials`` joint realizations.

        Returns (trials, N) atom labels, or (trials, N, n) for product lifts.
        """
        if trials < 1:
            raise DomainError("trials must be >= 1")
        if self.kind == "product_lift":
            flat = self.base.sample(trials * self.n, seed)
            return flat.reshape(trials, self.n, -1).transpose(0, 2, 1)
        u = derived_rng(seed).random((trials, self.draw_budget()))
        if self.kind == "maximal_pair":
            return _sample_maximal_pair(self.marginals, u)
        if self.kind == "shared_uniform":
            ps = np.array([m.prob(1) for m in self.marginals])
            return (u[:, :1] < ps[None, :]).astype(np.int64)
        if self.kind == "races":
            return _sample_races(self.marginals, u)
        raise DomainError(f"unknown coupling kind {self.kind!r}")


def _universe(marginals) -> list[int]:
    atoms: set[int] = set()
    for m in marginals:
        support, _ = m.support()
        atoms.update(support)
    return sorted(atoms)


def _sample_maximal_pair(marginals, u: np.ndarray) -> np.ndarray:
    p, q = marginals
    atoms = _universe(marginals)
    pw = np.array([p.prob(a) for a in atoms])
    qw = np.array([q.prob(a) for a in atoms])
    common = np.minimum(pw, qw)
    agree_prob = float(common.sum())
    tvd = 1.0 - agree_prob
    atom_arr = np.asarray(atoms, dtype=np.int64)

    if agree_prob > 0.0:
        common_atoms = atom_arr[common > 0.0]
        common_cdf = np.cumsum(common[common > 0.0] / agree_prob)
    else:
        common_atoms = atom_arr[:1]
        common_cdf = np.array([1.0])
    if tvd > 1e-15:
        pos = pw - common
        neg = qw - common
        pos_atoms = atom_arr[pos > 0.0]
        neg_atoms = atom_arr[neg > 0.0]
        pos_cdf = np.cumsum(pos[pos > 0.0] / tvd)
        neg_cdf = np.cumsum(neg[neg > 0.0] / tvd)
    else:
        agree_prob = 1.0
        pos_atoms = neg_atoms = atom_arr[:1]
        pos_cdf = neg_cdf = np.zeros(0)

    idx = _kernels.pair_assignments(u, agree_prob, common_cdf, pos_cdf, neg_cdf)
    agree = u[:, 0] < agree_prob
    out = np.empty((u.shape[0], 2), dtype=np.int64)
    out[agree, 0] = common_atoms[idx[agree, 0]]
    out[agree, 1] = common_atoms[idx[agree, 1]]
    if pos_cdf.shape[0] > 0:
        out[~agree, 0] = pos_atoms[idx[~agree, 0]]
        out[~agree, 1] = neg_atoms[idx[~agree, 1]]
    return out


def _sample_races(marginals, u: np.ndarray) -> np.ndarray:
    atoms = _universe(marginals)
    probs = np.array([[m.prob(a) for a in atoms] for m in marginals])
    clocks = -np.log1p(-u)
    winners = _kernels.races_winners(clocks, probs)
    return np.asarray(atoms, dtype=np.int64)[winners]


def maximal_pair(p: DiscreteDistribution, q: DiscreteDistribution) -> CouplingSampler:
    """Maximal coupling of two marginals: P(X != Y) equals tv(p, q) exactly."""
    return CouplingSampler("maximal_pair", (p, q))


def shared_uniform_bernoulli(ps) -> CouplingSampler:
    """Couple Bernoulli(p_i) through one shared uniform: X_i = 1{U < p_i}.

    Pairwise disagreement is exactly |p_i - p_j|.
    """
    ps = [float(p) for p in ps]
    if len(ps) < 2:
        raise DomainError("need at least two marginals")
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise DegenerateMarginal("Bernoulli parameters must lie in [0, 1]")
    marginals = tuple(DiscreteDistribution.bernoulli(p) for p in ps)
    return CouplingSampler("shared_uniform", marginals)


def exponential_races(marginals) -> CouplingSampler:
    """Race coupling: shared Exp(1) clocks T_x, X_i = argmin_x T_x / p_i(x).

    Marginals are exact; pairwise disagreement satisfies
    P(X_i != X_j) <= 2 tv / (1 + tv), checked statistically in tests.
    """
    marginals = tuple(marginals)
    if len(marginals) < 2:
        raise DomainError("need at least two marginals")
    return CouplingSampler("races", marginals)


def product_lift(base: CouplingSampler, n: int) -> CouplingSampler:
    """n-fold product coupling: n independent base draws per realization.

    Componentwise Hamming distance between X_i and X_j is Binomial(n, delta_ij)
    where delta_ij is the base disagreement probability.
    """
    if base.kind == "product_lift":
        raise DomainError("nested product lifts are not supported")
    if n < 1:
        raise DomainError("n must be >= 1")
    return CouplingSampler("product_lift", base.marginals, base=base, n=n)


def estimate_disagreement(sampler: CouplingSampler, trials: int, seed: int) -> DisagreementMatrix:
    """Monte-Carlo pairwise disagreement matrix for a coupling sampler."""
    draws = sampler.sample(trials, seed)
    N = sampler.n_marginals
    est = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, N):
            if draws.ndim == 3:
                dis = np.any(draws[:, i, :] != draws[:, j, :], axis=1)
            else:
                dis = draws[:, i] != draws[:, j]
            est[i, j] = est[j, i] = float(np.mean(dis))
    stderr = np.sqrt(est * (1.0 - est) / trials)
    return DisagreementMatrix(estimates=est, stderr=stderr, trials=trials, seed=seed)


def min_disagreement_lp(marginals) -> float:
    """Exact minimum of sum_{i<j} P(X_i != X_j) over all couplings.

    Solves the coupling polytope LP on the product of the marginal supports
    (capped at 10^4 joint atoms) with a deterministic dense simplex.  For two
    marginals the optimum equals tv(P, Q).
    """
    marginals = tuple(marginals)
    N = len(marginals)
    if N < 2:
        raise DomainError("need at least two marginals")
    supports = []
    weights = []
    for m in marginals:
        atoms, w = m.support()
        if len(atoms) == 0:
            raise DegenerateMarginal("marginal with empty support")
        supports.append(atoms)
        weights.append(w)
    n_vars = math.prod(len(s) for s in supports)
    if n_vars > _LP_CAP:
        raise TooLarge(f"joint support {n_vars} exceeds cap {_LP_CAP}")

    combos = list(itertools.product(*supports))
    cost = np.array(
        [
            sum(1.0 for i in range(N) for j in range(i + 1, N) if combo[i] != combo[j])
            for combo in combos
        ]
    )
    rows = []
    rhs = []
    for i, (atoms, w) in enumerate(zip(supports, weights)):
        for a, wa in zip(atoms, w):
            rows.append([1.0 if combo[i] == a else 0.0 for combo in combos])
            rhs.append(float(wa))
    value, _ = solve_min(cost, np.array(rows), np.array(rhs))
    return value
