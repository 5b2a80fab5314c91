"""Rectangle partial sums S_{lambda,gamma}(x, y) over simulated slabs."""

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from src.core.exceptions import ParameterValidationError, RectangleRangeError
from src.lattice_sim.field import FieldSlab


class PartialSumEntry(NamedTuple):
    lam: float
    gamma: float
    x: float
    y: float
    n1: int
    n2: int
    value: float


def rectangle_counts(lam: float, gamma: float, x: float, y: float) -> Tuple[int, int]:
    """(floor(lambda x), floor(lambda^gamma y)), the side lengths of the summation rectangle."""
    if lam <= 0 or gamma <= 0 or x <= 0 or y <= 0:
        raise ParameterValidationError(f"lambda, gamma, x, y must be positive, got {(lam, gamma, x, y)}")
    n1 = math.floor(lam * x)
    n2 = math.floor(lam ** gamma * y)
    if n1 < 1 or n2 < 1:
        raise RectangleRangeError(
            f"rectangle floor(lambda x) x floor(lambda^gamma y) = {n1} x {n2} is empty for "
            f"lambda={lam}, gamma={gamma}, (x, y)={(x, y)}"
        )
    return n1, n2


def prefix_table(values: np.ndarray) -> np.ndarray:
    """Zero-padded 2-D cumulative sum: prefix[i, j] is the sum of values[:i, :j]."""
    prefix = np.zeros((values.shape[0] + 1, values.shape[1] + 1))
    prefix[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    return prefix


def rectangle_sum(prefix: np.ndarray, t0: int, t1: int, s0: int, s1: int) -> float:
    """Sum over 1-based inclusive ranges t0..t1, s0..s1 by inclusion-exclusion."""
    return float(prefix[t1, s1] - prefix[t0 - 1, s1] - prefix[t1, s0 - 1] + prefix[t0 - 1, s0 - 1])


@dataclass
class PartialSumTable:
    prefix: np.ndarray
    entries: List[PartialSumEntry] = field(default_factory=list)

    def query(self, n1: int, n2: int) -> float:
        T1, T2 = self.prefix.shape[0] - 1, self.prefix.shape[1] - 1
        if not (1 <= n1 <= T1 and 1 <= n2 <= T2):
            raise RectangleRangeError(f"rectangle {n1} x {n2} exceeds the {T1} x {T2} slab")
        return float(self.prefix[n1, n2])

    def values(self) -> List[float]:
        return [entry.value for entry in self.entries]


def partial_sums(slab: FieldSlab, lambdas: Sequence[float], gamma: float,
                 points: Sequence[Tuple[float, float]]) -> PartialSumTable:
    """S_{lambda,gamma}(x, y) for every lambda and point, read from one prefix table."""
    table = PartialSumTable(prefix=prefix_table(slab.values))
    for lam in lambdas:
        for x, y in points:
            n1, n2 = rectangle_counts(lam, gamma, x, y)
            table.entries.append(PartialSumEntry(lam, gamma, x, y, n1, n2, table.query(n1, n2)))
    return table
