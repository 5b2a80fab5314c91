"""Realizations of X(t, s) = sum a(t-u, s-v) eps(u, v) on finite windows."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.signal import convolve2d, fftconvolve

from src.coeff_families.grid import CoefficientGrid
from src.coeff_families.grid_io import SLAB_MAGIC, pack_container
from src.core.config import get_config
from src.core.exceptions import ParameterValidationError, ResourceLimitError
from src.core.schemas import InnovationSpec
from src.lattice_sim.innovations import innovation_slab

logger = logging.getLogger(__name__)

# Working copies held during an FFT convolution, relative to the slab size.
_FFT_OVERHEAD = 6


@dataclass(frozen=True)
class FieldSlab:
    """Field values on [1, T1] x [1, T2]; values[t-1, s-1] holds X(t, s)."""
    values: np.ndarray
    coeff_meta: CoefficientGrid
    seed_info: Tuple[int, int]
    innovation: InnovationSpec

    @property
    def window(self) -> Tuple[int, int]:
        return self.values.shape

    def to_bytes(self) -> bytes:
        grid = self.coeff_meta
        params = list(grid.params.values()) + [float(self.seed_info[1])]
        return pack_container(SLAB_MAGIC, self.window, grid.q1, grid.q2, grid.family, params, self.values)


def check_budget(n_cells: int, label: str, memory_budget: Optional[int] = None, overhead: int = 1) -> None:
    budget = memory_budget if memory_budget is not None else get_config().memory_budget_bytes
    needed = n_cells * 8 * overhead
    if needed > budget:
        raise ResourceLimitError(
            f"{label} needs about {needed / 2**20:.1f} MiB, above the {budget / 2**20:.1f} MiB budget"
        )


def convolve_window(coeffs: CoefficientGrid, eps: np.ndarray, method: str = "fft") -> np.ndarray:
    """Valid-mode convolution of an innovation slab with the coefficient grid."""
    if method == "fft":
        return fftconvolve(eps, coeffs.values, mode="valid")
    if method == "direct":
        return convolve2d(eps, coeffs.values, mode="valid")
    raise ParameterValidationError(f"unknown convolution method '{method}'")


def simulate_field(coeffs: CoefficientGrid, T1: int, T2: int, innov: InnovationSpec, replicate: int,
                   method: str = "fft", memory_budget: Optional[int] = None) -> FieldSlab:
    """
    Simulate X on the window [1, T1] x [1, T2].

    The innovation slab covers [1 - R1, T1 + R1] x [1 - R2, T2 + R2] so every field value
    uses the full truncated kernel.
    """
    if T1 < 1 or T2 < 1:
        raise ParameterValidationError(f"window sizes must be >= 1, got {(T1, T2)}")
    R1, R2 = coeffs.truncation_radii
    shape = (T1 + 2 * R1, T2 + 2 * R2)
    check_budget(shape[0] * shape[1], f"slab {shape}", memory_budget,
                 overhead=_FFT_OVERHEAD if method == "fft" else 2)

    eps = innovation_slab(innov, replicate, shape)
    values = convolve_window(coeffs, eps, method)
    values.flags.writeable = False
    return FieldSlab(values=values, coeff_meta=coeffs, seed_info=(innov.base_seed, replicate), innovation=innov)
