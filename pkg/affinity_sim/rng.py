"""
Seeded Random Streams
Independent numpy substreams per stochastic purpose, so a run is
reproducible from (Params, seed) and extra draws in one purpose never
shift the values seen by another.

Derivation rule: substream i of STREAM_NAMES is
    numpy.random.Generator(PCG64(SeedSequence(entropy=seed, spawn_key=(i,))))
The bit generator is pinned to PCG64.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

STREAM_NAMES = ("init", "scheduling", "perception", "rejection", "mortality", "replacement")


@dataclass(frozen=True)
class StreamSet:
    """Per-purpose generators of one simulation instance"""

    seed: int
    init: np.random.Generator
    scheduling: np.random.Generator
    perception: np.random.Generator
    rejection: np.random.Generator
    mortality: np.random.Generator
    replacement: np.random.Generator


def _substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


def make_streams(seed: int) -> StreamSet:
    return StreamSet(seed, *(_substream(seed, i) for i in range(len(STREAM_NAMES))))


def derive_seed(master_seed: int, *key: int) -> int:
    """64-bit seed for a (cell, replication, ...) key under a master seed"""
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def uniform(stream: np.random.Generator, lo: float, hi: float) -> float:
    """Draw from [lo, hi)"""
    if lo > hi:
        raise ValueError(f"uniform: lo ({lo}) > hi ({hi})")
    if lo == hi:
        return lo
    return float(stream.uniform(lo, hi))


def gaussian(stream: np.random.Generator, mean: float, sd: float) -> float:
    if sd < 0:
        raise ValueError(f"gaussian: negative sd ({sd})")
    if sd == 0:
        return mean
    return float(stream.normal(mean, sd))


def permutation(stream: np.random.Generator, n: int) -> List[int]:
    if n < 0:
        raise ValueError(f"permutation: negative size ({n})")
    return [int(i) for i in stream.permutation(n)]
