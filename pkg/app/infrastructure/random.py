"""Reproducible random streams: one independent substream per (seed, key path)."""
from typing import Tuple

import numpy as np


def substream(seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence for task `key` under `seed`; equal inputs give equal streams on any worker."""
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))


def generator(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(substream(seed, *key))


def task_seeds(seed: int, *key: int) -> Tuple[np.random.Generator, int]:
    """A sampling generator and an integer seed for a nested solver, both derived from (seed, key)."""
    sampling, solving = substream(seed, *key).spawn(2)
    return np.random.default_rng(sampling), int(solving.generate_state(1, dtype=np.uint64)[0])


def fresh_seed() -> int:
    """A seed from OS entropy, for `--seed auto`."""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
