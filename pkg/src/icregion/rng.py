"""Seeded random streams.

Every Monte Carlo work unit ``b`` (a simulation block or a coding trial)
draws from its own PCG64 stream keyed by ``SeedSequence(seed, spawn_key=(b,))``,
so results do not depend on how the units are scheduled across workers.
Gaussian variates use the Box-Muller transform on PCG64 doubles.
"""
from __future__ import annotations

import numpy as np

SEED_LIMIT = 1 << 64


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, unit: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(unit),))
    return np.random.Generator(np.random.PCG64(ss))


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normal variates via Box-Muller (cosine branch only)."""
    u1 = 1.0 - rng.random(size)  # (0, 1]
    u2 = rng.random(size)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
