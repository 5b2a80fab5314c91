"""Standardized i.i.d. innovations from a counter-based generator."""

import math
from typing import Tuple

import numpy as np

from src.core.schemas import InnovationFamily, InnovationSpec

_SQRT12 = math.sqrt(12.0)


def innovation_stream(innov: InnovationSpec, replicate: int) -> np.random.Generator:
    """
    Philox4x32-10 generator keyed by the 128-bit value base_seed + 2^64 * replicate.

    Replicates get disjoint keys, so their streams are independent; the counter starts at 0
    and cells consume it in row-major order.
    """
    if replicate < 0 or replicate >= 2**64:
        raise ValueError(f"replicate index must lie in [0, 2^64), got {replicate}")
    key = innov.base_seed + (replicate << 64)
    return np.random.Generator(np.random.Philox(key=key))


def innovation_slab(innov: InnovationSpec, replicate: int, shape: Tuple[int, int]) -> np.ndarray:
    """Mean-zero, unit-variance innovations on a slab of the given shape."""
    generator = innovation_stream(innov, replicate)
    if innov.family == InnovationFamily.GAUSSIAN:
        return generator.standard_normal(shape)
    if innov.family == InnovationFamily.RADEMACHER:
        return generator.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    return (generator.random(shape) - 0.5) * _SQRT12
