"""Backstepping synchronisation law and its diagnostics.

Error coordinates are transformed to ``(e3, w2, w3)`` with ``w2 = e2 + k1*e3``
and ``w3 = e1`` (the second virtual gain is pinned to zero). In those
coordinates the closed loop is linear when ``k1 = 0``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .model import OscillatorParams, ErrorState, _drive


class ControlVariant(str, enum.Enum):
    # "printed": the e3 coefficient as written in the published control law.
    # "corrected": U chosen so that dw3/dt = w2 - k3*w3 holds for every k1.
    PRINTED = "printed"
    CORRECTED = "corrected"

    @property
    def code(self) -> int:
        return 0 if self is ControlVariant.PRINTED else 1


@dataclass(frozen=True)
class Gains:
    k1: float
    k3: float
    k2: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.k1) or self.k1 < 0:
            raise ValueError(f"k1 must be a finite non-negative number, got {self.k1!r}")
        if not np.isfinite(self.k3) or self.k3 < 0:
            raise ValueError(f"k3 must be a finite non-negative number, got {self.k3!r}")
        # Step 3 forces the second virtual gain to zero for negative definiteness.
        if self.k2 != 0.0:
            raise ValueError(f"k2 must be exactly 0, got {self.k2!r}")

    @classmethod
    def checked(cls, k1: float, k3: float, params: OscillatorParams) -> "Gains":
        g = cls(k1, k3)
        g.check(params)
        return g

    def check(self, params: OscillatorParams) -> None:
        if not self.k1 < params.b:
            raise ValueError(f"k1 must be below b={params.b}, got {self.k1!r}")


class TransformedError(NamedTuple):
    e3: float
    w2: float
    w3: float


class LyapunovValues(NamedTuple):
    v1: float
    v2: float
    v3: float


def transform_error(err, g: Gains) -> TransformedError:
    e1, e2, e3 = err
    return TransformedError(e3, e2 + g.k1 * e3, e1)


def inverse_transform(t, g: Gains) -> ErrorState:
    e3, w2, w3 = t
    return ErrorState(w3, w2 - g.k1 * e3, e3)


@numba.njit(cache=True, nogil=True)
def _control(e1, e2, e3, zm, k1, k3, variant, a, b, d, e):
    w2 = e2 + k1 * e3
    w3 = e1
    u = -a * _drive(zm, e) + a * _drive(zm - e3, e) + k3 * w3
    if variant == 0:
        u += (k1 * k1 - b * k1 + d * k1) * w2
        u += (d * k1 - k1 + b * k1 * k1 - k1 * k1 * k1 - 2.0 * d * k1 * k1 - d * d * k1) * e3
    else:
        u -= k1 * e3
    return u


def control_law(
    err,
    z_master: float,
    g: Gains,
    p: OscillatorParams,
    variant: ControlVariant = ControlVariant.PRINTED,
) -> float:
    e1, e2, e3 = err
    return _control(
        float(e1), float(e2), float(e3), float(z_master),
        g.k1, g.k3, ControlVariant(variant).code, p.a, p.b, p.d, p.e,
    )


def closed_loop_matrix(g: Gains, p: OscillatorParams) -> np.ndarray:
    """System matrix of the linear closed loop over ``(e3, w2, w3)``."""
    return np.array(
        [
            [-(g.k1 + p.d), 1.0, 0.0],
            [-1.0, g.k1 - p.b, -1.0],
            [0.0, 1.0, -g.k3],
        ]
    )


def lyapunov_values(t) -> LyapunovValues:
    e3, w2, w3 = t
    v1 = 0.5 * e3 * e3
    v2 = v1 + 0.5 * w2 * w2
    return LyapunovValues(v1, v2, v2 + 0.5 * w3 * w3)
