"""Deterministic RNG derivation.

A scene seed deterministically spawns two independent generators: one
consumed by scene generation, one owned by each trial for tie-breaking.
"""

import numpy as np


def generation_rng(seed: int) -> np.random.Generator:
    """Generator used while sampling a scene's obstacles."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(0,)))


def trial_rng(seed: int) -> np.random.Generator:
    """Per-trial generator used for force-evaluation tie-breaks."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(1,)))
