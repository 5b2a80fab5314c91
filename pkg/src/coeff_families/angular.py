"""Angular functions L0 on [-1, 1] and the limiting coefficient profile a_inf."""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gamma as gamma_fn

from src.core.exceptions import ParameterValidationError

ANGULAR_SAMPLES = 1025
_NODES = np.linspace(-1.0, 1.0, ANGULAR_SAMPLES)


@dataclass(frozen=True)
class AngularFunction:
    """
    Bounded angular function sampled on 1025 equally spaced points of [-1, 1].

    Evaluation interpolates linearly between samples.
    """
    samples: np.ndarray
    label: str = "table"

    def __post_init__(self):
        if self.samples.shape != (ANGULAR_SAMPLES,):
            raise ParameterValidationError(
                f"angular table must have {ANGULAR_SAMPLES} samples, got {self.samples.shape}"
            )
        if not np.all(np.isfinite(self.samples)):
            raise ParameterValidationError("angular function samples must be finite (L0 must be bounded)")
        self.samples.flags.writeable = False

    def __call__(self, z):
        return np.interp(z, _NODES, self.samples)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.samples == self.samples[0]))

    def scaled(self, factor: float) -> "AngularFunction":
        return AngularFunction(self.samples * factor, label=f"{factor}*{self.label}")

    @classmethod
    def constant(cls, value: float) -> "AngularFunction":
        return cls(np.full(ANGULAR_SAMPLES, float(value)), label=f"const({value})")

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray], label: str = "callable") -> "AngularFunction":
        return cls(np.asarray(func(_NODES.copy()), dtype=np.float64), label=label)


def a_infinity(t, s, q1: float, q2: float, angular: AngularFunction):
    """
    Limiting coefficient profile
    a_inf(t, s) = (|t|^2 + |s|^{2 q2/q1})^{-q1/2} L0(t / (|t|^2 + |s|^{2 q2/q1})^{1/2}).

    Undefined at the origin; callers exclude it.
    """
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    radius2 = t * t + np.abs(s) ** (2.0 * q2 / q1)
    return radius2 ** (-q1 / 2.0) * angular(t / np.sqrt(radius2))


def isotropic_far_field_constant(d: float) -> float:
    """A(d) = Gamma(1-d) / (pi Gamma(d)); negative for d in (-1, 0)."""
    return float(gamma_fn(1.0 - d) / (math.pi * gamma_fn(d)))


def isotropic_angular(d: float) -> AngularFunction:
    return AngularFunction(np.full(ANGULAR_SAMPLES, isotropic_far_field_constant(d)), label=f"isotropic(d={d})")


def heat_angular(d: float, theta: float) -> AngularFunction:
    """
    Angular function of the heat-operator family:
    L0(z) = z^{d-3/2} exp(-sqrt(1/z^2 - 1) / (2(1-theta))) / (Gamma(d) sqrt(2 pi (1-theta))) for 0 < z <= 1,
    and 0 for z <= 0.
    """
    def profile(z: np.ndarray) -> np.ndarray:
        out = np.zeros_like(z)
        pos = z > 0
        zp = np.minimum(z[pos], 1.0)
        log_mag = ((d - 1.5) * np.log(zp)
                   - np.sqrt(np.maximum(1.0 / (zp * zp) - 1.0, 0.0)) / (2.0 * (1.0 - theta))
                   - math.log(abs(gamma_fn(d)) * math.sqrt(2.0 * math.pi * (1.0 - theta))))
        out[pos] = math.copysign(1.0, gamma_fn(d)) * np.exp(log_mag)
        return out

    return AngularFunction.from_callable(profile, label=f"heat(d={d},theta={theta})")
