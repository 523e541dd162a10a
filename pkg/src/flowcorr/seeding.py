"""Deterministic random streams derived from one user seed."""
from __future__ import annotations

import numpy as np

# stream tags; each consumer draws from its own SeedSequence branch
INIT = 1
NEGATIVES = 2
SHUFFLE = 3
SIMULATION = 4
SUBSETS = 5
BENCH = 6


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream identified by `(seed, *keys)`."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))
