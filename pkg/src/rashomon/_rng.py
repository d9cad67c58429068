"""Named, reproducible random substreams (PCG64 via SeedSequence)."""

import zlib

import numpy as np

# samples are drawn in fixed-size blocks, each with its own substream, so results
# do not depend on how blocks are split across workers
BLOCK = 8192


def stream_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, name: str, *index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(stream_key(name), *map(int, index)))
    return np.random.Generator(np.random.PCG64(ss))


def blocks(k: int, block: int = BLOCK):
    """Yield (block_index, start, stop) covering range(k)."""
    for b, start in enumerate(range(0, k, block)):
        yield b, start, min(start + block, k)
