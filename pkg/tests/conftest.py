"""Shared helpers for the test suite."""

import numpy as np

from dpminimax import DiscreteDistribution


def random_distribution(rng, max_atoms: int = 6, atom_range: int = 10) -> DiscreteDistribution:
    """A random distribution on 2..max_atoms distinct integer atoms."""
    k = int(rng.integers(2, max_atoms + 1))
    atoms = rng.choice(atom_range, size=k, replace=False)
    w = rng.random(k) + 0.05
    return DiscreteDistribution(tuple(int(a) for a in atoms), w / w.sum())


def empirical_marginal_l1(draws_column, dist: DiscreteDistribution) -> float:
    """L1 distance between a column of atom draws and the target weights."""
    atoms, weights = dist.support()
    total = 0.0
    seen = 0.0
    n = draws_column.shape[0]
    for atom, weight in zip(atoms, weights):
        freq = float(np.count_nonzero(draws_column == atom)) / n
        total += abs(freq - weight)
        seen += freq
    return total + (1.0 - seen)
