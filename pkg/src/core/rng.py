"""Seeding: every random draw goes through counter-based Philox streams"""

from typing import List

import numpy as np


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def realization_seeds(seed: int, count: int) -> List[int]:
    """One 64-bit child seed per realization, independent of thread count"""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, np.uint64)[0]) for child in children]


def realization_generators(seed: int, count: int) -> List[np.random.Generator]:
    return [philox(s) for s in realization_seeds(seed, count)]
