"""Seeds and stream splitting.

Every sampler takes a ``seed`` that is either an int, a :class:`Seed` or an
already built ``np.random.Generator``. Identical seeds and parameters give
bit-identical output.
"""
from dataclasses import dataclass
from typing import List, Union

import numpy as np

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Seed:
    value: int

    def __post_init__(self):
        if not isinstance(self.value, (int, np.integer)):
            raise ValueError(f"Invalid seed {self.value!r}")
        if not 0 <= int(self.value) <= SEED_MASK:
            raise ValueError(f"Seed must fit in 64 bits, got {self.value}")

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(int(self.value))

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.sequence()))

    def spawn(self, count: int) -> List["Seed"]:
        """Independent child seeds, stable for a given (value, count prefix)."""
        children = self.sequence().spawn(count)
        return [Seed(_to_int(child)) for child in children]

    def child(self, index: int) -> "Seed":
        return self.spawn(index + 1)[index]


SeedLike = Union[int, Seed, np.random.Generator]


def _to_int(sequence: np.random.SeedSequence) -> int:
    low, high = sequence.generate_state(2, dtype=np.uint32)
    return (int(high) << 32) | int(low)


def as_seed(seed: Union[int, Seed]) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if seed is None:
        raise ValueError("A seed is required")
    return Seed(int(seed) & SEED_MASK)


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return as_seed(seed).rng()


def spawn_seeds(seed: Union[int, Seed], count: int) -> List[Seed]:
    return as_seed(seed).spawn(count)
