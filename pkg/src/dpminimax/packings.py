"""Packings of parameter space for multi-hypothesis lower bounds.

A packing is a finite set of parameters pairwise separated by at least 2 * omega.
Two-point packings cover scalar problems; Varshamov-Gilbert binary codes scaled
into a Euclidean ball cover high-dimensional ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._rng import derived_rng
from .errors import BudgetExhausted, DomainError, OutOfSpace

__all__ = [
    "BinaryCode",
    "Packing",
    "varshamov_gilbert",
    "scale_code",
    "two_point",
]

_GREEDY_BUDGET = 1_000_000
_GREEDY_RESTARTS = 10
_BLOCK = 1024


@dataclass(frozen=True)
class BinaryCode:
    """N binary words of length d with pairwise Hamming distance >= min_distance."""

    d: int
    zeta: float
    min_distance: int
    words: np.ndarray = field(compare=False)

    def __post_init__(self):
        words = np.ascontiguousarray(np.asarray(self.words, dtype=np.int8))
        if words.ndim != 2 or words.shape[1] != self.d or words.shape[0] < 1:
            raise DomainError("words must be a non-empty (N, d) array")
        if not np.all((words == 0) | (words == 1)):
            raise DomainError("words must be binary")
        object.__setattr__(self, "words", words)
        if self.size > 1 and self.realized_min_distance() < self.min_distance:
            raise DomainError("pairwise Hamming distance below min_distance")

    @property
    def size(self) -> int:
        return int(self.words.shape[0])

    def realized_min_distance(self) -> int:
        """Smallest pairwise Hamming distance; min_distance when only one word."""
        if self.size < 2:
            return self.min_distance
        w = self.words.astype(np.int64)
        gram = w @ w.T
        sums = w.sum(axis=1)
        dist = sums[:, None] + sums[None, :] - 2 * gram
        np.fill_diagonal(dist, self.d + 1)
        return int(dist.min())


@dataclass(frozen=True)
class Packing:
    """Parameters pairwise separated by >= 2 * omega under the stated metric."""

    points: tuple
    omega: float
    metric: str

    def __post_init__(self):
        if self.metric not in ("abs_diff", "euclidean"):
            raise DomainError(f"unknown metric {self.metric!r}")
        if len(self.points) < 1:
            raise DomainError("packing needs at least one point")
        if self.omega < 0.0:
            raise DomainError("omega must be non-negative")

    @property
    def size(self) -> int:
        return len(self.points)

    def distance(self, i: int, j: int) -> float:
        a, b = self.points[i], self.points[j]
        if self.metric == "abs_diff":
            return abs(float(a) - float(b))
        return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))

    def min_pairwise_distance(self) -> float:
        best = math.inf
        for i in range(self.size):
            for j in range(i + 1, self.size):
                best = min(best, self.distance(i, j))
        return best

    def validate(self) -> None:
        """Check every pair is separated by at least 2 * omega."""
        if self.size < 2:
            return
        if self.min_pairwise_distance() < 2.0 * self.omega - 1e-12:
            raise DomainError("packing violates pairwise distance >= 2 * omega")


def _target_size(d: int, zeta: float) -> int:
    return int(math.ceil(math.exp(zeta * zeta * d / 2.0)))


def varshamov_gilbert(d: int, zeta: float, seed: int) -> BinaryCode:
    """Randomized greedy binary code with N >= ceil(e^{zeta^2 d / 2}) words
    at pairwise Hamming distance >= ceil((1/2 - zeta) d).

    Deterministic given (d, zeta, seed).  Each of up to 10 restarts draws at
    most 10^6 candidate words before giving up.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if not 0.0 < zeta < 0.5:
        raise DomainError("zeta must lie in (0, 1/2)")
    target = _target_size(d, zeta)
    required = int(math.ceil((0.5 - zeta) * d))
    for restart in range(_GREEDY_RESTARTS):
        rng = derived_rng(seed, restart)
        kept = np.empty((target, d), dtype=np.int8)
        n_kept = 0
        drawn = 0
        while drawn < _GREEDY_BUDGET and n_kept < target:
            block = rng.integers(0, 2, size=(_BLOCK, d), dtype=np.int8)
            for row in block:
                drawn += 1
                if n_kept > 0:
                    dists = np.count_nonzero(kept[:n_kept] != row[None, :], axis=1)
                    if dists.min() < required:
                        continue
                kept[n_kept] = row
                n_kept += 1
                if n_kept == target or drawn == _GREEDY_BUDGET:
                    break
        if n_kept >= target:
            return BinaryCode(d=d, zeta=zeta, min_distance=required, words=kept[:n_kept])
    raise BudgetExhausted(
        f"greedy failed to reach {target} words at distance {required} "
        f"after {_GREEDY_RESTARTS} restarts of {_GREEDY_BUDGET} draws"
    )


def scale_code(code: BinaryCode, alpha: float, center, space=None) -> Packing:
    """Embed a binary code as points center + alpha * w_i.

    omega = alpha * sqrt(realized min distance) / 2, since squared Euclidean
    distance between embedded words equals alpha^2 times Hamming distance.
    When a space with a contains() method is supplied, every point must lie
    inside it.
    """
    if alpha < 0.0:
        raise DomainError("alpha must be non-negative")
    center = np.asarray(center, dtype=float)
    if center.shape != (code.d,):
        raise DomainError(f"center must have shape ({code.d},)")
    points = tuple(center + alpha * w for w in code.words.astype(float))
    if space is not None:
        for i, p in enumerate(points):
            if not space.contains(p):
                raise OutOfSpace(f"scaled word {i} leaves the parameter space")
    omega = alpha * math.sqrt(code.realized_min_distance()) / 2.0
    return Packing(points=points, omega=omega, metric="euclidean")


def two_point(theta1, theta2, metric: str = "abs_diff") -> Packing:
    """Two-hypothesis packing with omega equal to half the distance."""
    packing = Packing(points=(theta1, theta2), omega=0.0, metric=metric)
    dist = packing.distance(0, 1)
    if dist <= 0.0:
        raise DomainError("two_point requires distinct parameters")
    return Packing(points=(theta1, theta2), omega=dist / 2.0, metric=metric)
