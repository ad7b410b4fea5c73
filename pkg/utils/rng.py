"""Seeded generator streams, one per purpose."""
from dataclasses import dataclass

import numpy as np

PURPOSES = ("transitions", "delays", "masks", "rewards", "actions")


def make_generator(seed: int, purpose: str) -> np.random.Generator:
    """Return a Philox-backed generator for ``(seed, purpose)``.

    Each purpose gets its own spawn key, so draws made for one purpose never
    shift the stream of another.
    """
    if purpose not in PURPOSES:
        raise ValueError(f"Unknown generator purpose: {purpose}")
    seq = np.random.SeedSequence(seed, spawn_key=(PURPOSES.index(purpose),))
    return np.random.Generator(np.random.Philox(seq))


@dataclass
class RngStreams:
    """Independent generators used by a single run."""

    transitions: np.random.Generator
    delays: np.random.Generator
    masks: np.random.Generator
    rewards: np.random.Generator
    actions: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RngStreams":
        return cls(**{purpose: make_generator(seed, purpose) for purpose in PURPOSES})
