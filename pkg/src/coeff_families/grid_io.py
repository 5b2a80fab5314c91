"""Binary container for coefficient grids and field slabs, plus JSON sidecars."""

import struct
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from src.coeff_families.grid import CoefficientGrid, make_grid
from src.core.exceptions import ParameterValidationError
from src.core.schemas import Family
from src.utils.json_utils import canonical_json

CONTAINER_VERSION = 1
GRID_MAGIC = b"LSCG"
SLAB_MAGIC = b"LSSB"

_FAMILY_TAGS = {family: index for index, family in enumerate(Family)}
_TAG_FAMILIES = {index: family for family, index in _FAMILY_TAGS.items()}
_HEADER = struct.Struct("<4sHIIddBI")


def pack_container(magic: bytes, dims: Tuple[int, int], q1: float, q2: float, family: Family,
                   params: Sequence[float], values: np.ndarray) -> bytes:
    """
    Layout: magic, version u16, dims as two u32, q1 and q2 as f64, family tag u8,
    params as a u32 count then f64s, then the values as row-major little-endian f64.
    """
    header = _HEADER.pack(magic, CONTAINER_VERSION, dims[0], dims[1], q1, q2,
                          _FAMILY_TAGS[family], len(params))
    body = np.asarray(params, dtype="<f8").tobytes()
    return header + body + np.ascontiguousarray(values, dtype="<f8").tobytes()


def unpack_container(payload: bytes) -> Dict[str, Any]:
    magic, version, dim1, dim2, q1, q2, tag, n_params = _HEADER.unpack_from(payload, 0)
    if magic not in (GRID_MAGIC, SLAB_MAGIC):
        raise ParameterValidationError(f"unknown container magic {magic!r}")
    if version != CONTAINER_VERSION:
        raise ParameterValidationError(f"unsupported container version {version}")
    offset = _HEADER.size
    params = np.frombuffer(payload, dtype="<f8", count=n_params, offset=offset)
    offset += 8 * n_params
    if magic == GRID_MAGIC:
        shape = (2 * dim1 + 1, 2 * dim2 + 1)
    else:
        shape = (dim1, dim2)
    values = np.frombuffer(payload, dtype="<f8", count=shape[0] * shape[1], offset=offset).reshape(shape)
    return {"magic": magic, "dims": (dim1, dim2), "q1": q1, "q2": q2, "family": _TAG_FAMILIES[tag],
            "params": params.tolist(), "values": values.astype(np.float64)}


def grid_to_bytes(grid: CoefficientGrid) -> bytes:
    return pack_container(GRID_MAGIC, grid.truncation_radii, grid.q1, grid.q2, grid.family,
                          list(grid.params.values()), grid.values)


def grid_from_bytes(payload: bytes, param_names: Sequence[str] = ()) -> CoefficientGrid:
    record = unpack_container(payload)
    if record["magic"] != GRID_MAGIC:
        raise ParameterValidationError("payload is not a coefficient grid")
    names = list(param_names) or [f"p{i}" for i in range(len(record["params"]))]
    return make_grid(record["values"], record["q1"], record["q2"], record["family"],
                     dict(zip(names, record["params"])))


def grid_sidecar(grid: CoefficientGrid) -> Dict[str, Any]:
    R1, R2 = grid.truncation_radii
    return {
        "format": GRID_MAGIC.decode(),
        "version": CONTAINER_VERSION,
        "family": grid.family.value,
        "q1": grid.q1,
        "q2": grid.q2,
        "truncation_radii": [R1, R2],
        "params": grid.params,
        "zero_sum_residual": grid.zero_sum_residual,
    }


def write_grid(grid: CoefficientGrid, path: Path) -> Tuple[Path, Path]:
    """Write the binary container and its JSON sidecar next to each other."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(grid_to_bytes(grid))
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(canonical_json(grid_sidecar(grid)))
    return path, sidecar
