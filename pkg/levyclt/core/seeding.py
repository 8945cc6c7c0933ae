"""
Counter-based seeding for reproducible parallel Monte Carlo.

Every path owns a Philox generator keyed by a splitmix64 mix of
(seed, stream, index).  Keys depend only on those three integers, so paths
can be generated in any order, on any number of threads, and replayed
individually.
"""

import numpy as np

MASK64 = (1 << 64) - 1

# Disjoint streams
STREAM_PATHS = 0
STREAM_MIXTURE = 1
STREAM_ETA = 2
STREAM_SCALING = 10
STREAM_MOMENTS = 100


def splitmix64(value: int) -> int:
    """One round of the splitmix64 finaliser."""
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"Seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive_key(seed: int, stream: int, index: int) -> int:
    """64-bit key for the (seed, stream, index) counter."""
    key = splitmix64(check_seed(seed))
    key = splitmix64(key ^ (int(stream) & MASK64))
    return splitmix64(key ^ (int(index) & MASK64))


def path_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator for one work unit."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, stream, index)))
