import time
import zlib
from typing import Union

import numpy as np


def derive_seed(seed: int, *coords: Union[int, str]) -> int:
    """
    Mix a base seed with cell coordinates into an independent 64-bit seed.

    String coordinates (e.g. classifier labels) are hashed with crc32 so the
    result does not depend on the interpreter's hash randomisation.
    """
    key = [zlib.crc32(c.encode("utf-8")) if isinstance(c, str) else int(c) for c in coords]
    sequence = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator; the only RNG used by the toolkit."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def get_unique_filename(filename, ext):
    return time.strftime(f"{filename}_%Y_%m_%d_%H_%M_%S.{ext}")
