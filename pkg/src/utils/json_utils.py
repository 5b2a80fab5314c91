"""Deterministic JSON serialization for reports and configuration hashing."""
import hashlib
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel


def to_jsonable(data: Any) -> Any:
    """Convert pydantic records, enums, numpy values and paths into plain JSON types."""
    if isinstance(data, BaseModel):
        return to_jsonable(data.model_dump(mode="python"))
    if isinstance(data, Enum):
        return data.value
    if isinstance(data, dict):
        return {str(key): to_jsonable(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_jsonable(value) for value in data]
    if isinstance(data, np.ndarray):
        return to_jsonable(data.tolist())
    if isinstance(data, np.generic):
        return data.item()
    if isinstance(data, Path):
        return str(data)
    return data


def canonical_json(data: Any) -> str:
    """
    Serialize with sorted keys and fixed indentation.

    Floats use Python's shortest round-trip repr, so values survive a write/read cycle exactly.
    Non-finite floats are written as the strings "inf", "-inf" and "nan".
    """
    return json.dumps(_finite(to_jsonable(data)), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def config_hash(data: Any) -> str:
    """SHA-256 of the compact canonical JSON form."""
    compact = json.dumps(_finite(to_jsonable(data)), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(value, ".17g")


def _finite(data: Any) -> Any:
    if isinstance(data, float) and not math.isfinite(data):
        return repr(data)
    if isinstance(data, dict):
        return {key: _finite(value) for key, value in data.items()}
    if isinstance(data, list):
        return [_finite(value) for value in data]
    return data
