"""Deterministic block-parallel Monte Carlo.

Replicas are cut into fixed-size blocks.  Block ``b`` draws from a generator
seeded by ``SeedSequence(seed, spawn_key=(b,))`` and block results are combined
by a fixed pairwise tree, so output does not depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 1 << 15


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(block),)))


def block_sizes(total: int, block_size: int = BLOCK_SIZE) -> list[int]:
    if total < 1:
        raise ValueError("need at least one replica")
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def pairwise_reduce(parts, op=None):
    """Combine ``parts`` by a balanced tree in a fixed order."""
    if op is None:
        op = lambda a, b: a + b  # noqa: E731
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to reduce")
    while len(parts) > 1:
        nxt = [op(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def run_blocks(fn, total: int, seed: int, workers: int = 1, block_size: int = BLOCK_SIZE):
    """Evaluate ``fn(rng, size)`` on every block; results in block order."""
    sizes = block_sizes(total, block_size)
    jobs = [(block_rng(seed, b), s) for b, s in enumerate(sizes)]
    if workers <= 1 or len(jobs) == 1:
        return [fn(rng, s) for rng, s in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
