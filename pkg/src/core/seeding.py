from dataclasses import dataclass
from enum import IntEnum

import numpy as np

MASK_64 = (1 << 64) - 1


class Purpose(IntEnum):
    """
    Distinguishes the random draws made for one image. Values are part of the
    seed format and must never be renumbered.
    """

    SELECT = 0
    BROWN_CONRADY = 1
    GRF_WARP = 2
    TPS = 3
    DIVERGENCE_FREE = 4
    UNIFORM_FOG = 5
    HETERO_FOG = 6
    LENS_FLARE = 7
    FIELD_U = 8
    FIELD_V = 9
    STREAM_FUNCTION = 10
    NOISE = 11
    JITTER = 12
    FLARE_CENTER = 13


@dataclass(frozen=True)
class SeedSpec:
    global_seed: int
    stream_id: int
    purpose: Purpose

    def __post_init__(self) -> None:
        assert 0 <= self.global_seed <= MASK_64, "global_seed must fit in 64 bits"
        assert 0 <= self.stream_id <= MASK_64, "stream_id must fit in 64 bits"


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK_64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK_64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK_64
    return z ^ (z >> 31)


def derive_seed(spec: SeedSpec) -> int:
    """
    Chained SplitMix64 finalizer over (global_seed, stream_id, purpose):

        h = mix(mix(mix(global_seed) ^ stream_id) ^ purpose)

    mix is a bijection on 64-bit words, so distinct purposes under the same
    (global_seed, stream_id) always give distinct seeds. This format is frozen:
    changing it changes every generated dataset.
    """
    h = splitmix64(spec.global_seed)
    h = splitmix64(h ^ spec.stream_id)
    return splitmix64(h ^ int(spec.purpose))


def sub_seed(seed: int, purpose: Purpose, index: int = 0) -> int:
    """
    Seed for a named draw nested inside an already derived seed.
    """
    return derive_seed(SeedSpec(seed, index, purpose))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
