"""Counter-based random streams.

Every stochastic routine in the package derives its generator from an integer
seed plus a tuple of integer tags (cell index, trial index, ...) through a
Philox counter-based bit generator.  Stream i is a pure function of
(seed, tags), never of how much randomness other streams consumed, so
estimates do not depend on execution order or worker partitioning.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derived_rng", "spawn_keys"]


def derived_rng(seed: int, *tags: int) -> np.random.Generator:
    """Return a Generator for the stream identified by (seed, *tags).

    Tags must be non-negative integers; the same (seed, tags) always yields
    an identical stream.
    """
    entropy = (int(seed),) + tuple(int(t) for t in tags)
    if any(t < 0 for t in entropy[1:]):
        raise ValueError("stream tags must be non-negative")
    # The tag count leads the entropy because SeedSequence absorbs trailing
    # zero words: without it (seed, 0) would alias the bare (seed,) stream.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((len(tags),) + entropy)))


def spawn_keys(seed: int, count: int, *tags: int) -> list[tuple[int, ...]]:
    """Pre-derive `count` stream identities (seed, *tags, i) for i < count."""
    base = (int(seed),) + tuple(int(t) for t in tags)
    return [base + (i,) for i in range(count)]
