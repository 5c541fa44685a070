"""Deterministic, named RNG substreams.

Every stochastic choice in the toolkit draws from a substream keyed by
(seed, purpose), so toggling one randomized feature never shifts the
stream consumed by another.
"""

import numpy as np

# Purpose keys. Keep these stable: they are part of reproducibility.
MIXTURE = 1
AVERAGING = 2
EXPLORATION = 3
REFERENCE = 4
DATA = 5
EVAL = 6
MODELGEN = 7
GRID = 8


def derive_seed(seed, purpose, index):
    """A stable integer child seed for (seed, purpose, index)."""
    ss = np.random.SeedSequence(seed, spawn_key=(purpose, index))
    return int(ss.generate_state(1)[0])


def substream(seed, purpose):
    """A generator that depends only on (seed, purpose)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(purpose,)))
