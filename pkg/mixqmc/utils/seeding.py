"""
Seed splitting.

Every random object in mixqmc is keyed by one master seed. Subseeds are derived
with numpy's SeedSequence: the master seed (reduced to 64 bits) is the entropy
and the derivation path is the spawn key, so

    derive_seed(master, TAG_REPLICATE, r)          -> seed of replicate r
    derive_seed(seed, TAG_NESTED_UNIFORM, j)       -> scramble key of dimension j
    derive_seed(seed, TAG_STRATUM, l)              -> independent net of stratum l

Distinct paths give statistically independent streams; equal paths give equal
seeds on every platform.
"""
import zlib
from typing import Union

import numpy as np

MASK64 = (1 << 64) - 1

TAG_REPLICATE = 1
TAG_NESTED_UNIFORM = 2
TAG_LINEAR_MATRIX = 3
TAG_DIGITAL_SHIFT = 4
TAG_MONTE_CARLO = 5
TAG_STRATUM = 6
TAG_EXPERIMENT_CELL = 7


def derive_seed(master: int, *path: int) -> int:
    """Derive a 64-bit subseed from a master seed and an integer path."""
    sequence = np.random.SeedSequence(
        entropy=int(master) & MASK64,
        spawn_key=tuple(int(p) & MASK64 for p in path),
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def name_tag(name: str) -> int:
    """Stable integer tag for a string label (used for experiment cells)."""
    return zlib.crc32(name.encode("utf-8"))


def philox_generator(seed: Union[int, np.uint64]) -> np.random.Generator:
    """Counter-based generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


# splitmix64 finalizer constants
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)


def mix64(words: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer applied elementwise to a uint64 array (wrapping arithmetic)."""
    z = np.asarray(words, dtype=np.uint64).copy()
    z ^= z >> _S30
    z *= _MIX_A
    z ^= z >> _S27
    z *= _MIX_B
    z ^= z >> _S31
    return z


def keyed_hash(key: int, counters: np.ndarray) -> np.ndarray:
    """
    Counter-based pseudo-random function: 64 random bits for every counter value.

    Args:
        key: 64-bit key (already derived with derive_seed)
        counters: uint64 array of counter values

    Returns:
        uint64 array of the same shape
    """
    key_word = mix64(np.array([key & MASK64], dtype=np.uint64))[0]
    return mix64(np.asarray(counters, dtype=np.uint64) * _GOLDEN ^ key_word)
