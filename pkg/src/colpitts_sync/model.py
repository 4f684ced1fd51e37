"""Dimensionless Colpitts oscillator: master, slave and error vector fields.

The scalar kernels are numba-compiled so the simulation loop can call them
directly; the public wrappers accept any length-3 sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, astuple
from typing import NamedTuple

import numba


class State3(NamedTuple):
    x: float
    y: float
    z: float


class ErrorState(NamedTuple):
    """Master minus slave, componentwise."""

    e1: float
    e2: float
    e3: float


@dataclass(frozen=True)
class OscillatorParams:
    a: float = 30.0
    b: float = 0.8
    c: float = 20.0
    d: float = 0.08
    e: float = 10.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.e > 1:
            raise ValueError(f"e must exceed 1 so the breakpoint e-1 is positive, got {self.e!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return astuple(self)

    @property
    def breakpoint(self) -> float:
        return self.e - 1.0


TYPICAL = OscillatorParams()


@numba.njit(cache=True, nogil=True)
def _drive(z, e):
    v = e - 1.0 - z
    return v if v > 0.0 else 0.0


@numba.njit(cache=True, nogil=True)
def _master_rhs(x, y, z, a, b, c, d, e):
    return y - a * _drive(z, e), c - x - b * y - z, y - d * z


@numba.njit(cache=True, nogil=True)
def _error_rhs(e1, e2, e3, zm, u, a, b, d, e):
    return (
        e2 - a * _drive(zm, e) + a * _drive(zm - e3, e) - u,
        -e1 - b * e2 - e3,
        e2 - d * e3,
    )


def nonlinearity_F(z: float, params: OscillatorParams) -> float:
    """Piecewise-linear drive ``max(e - 1 - z, 0)``.

    Zero at and above the breakpoint ``z = e - 1``; non-increasing in ``z``.
    """
    return _drive(float(z), params.e)


def master_derivative(s, p: OscillatorParams) -> State3:
    x, y, z = s
    return State3(*_master_rhs(float(x), float(y), float(z), p.a, p.b, p.c, p.d, p.e))


def slave_derivative(s, p: OscillatorParams, u: float) -> State3:
    dx, dy, dz = master_derivative(s, p)
    return State3(dx + u, dy, dz)


def error_derivative(err, z_master: float, p: OscillatorParams, u: float) -> ErrorState:
    e1, e2, e3 = err
    return ErrorState(
        *_error_rhs(float(e1), float(e2), float(e3), float(z_master), float(u), p.a, p.b, p.d, p.e)
    )


def equilibrium(p: OscillatorParams) -> State3:
    """Fixed point in the conducting region ``z < e - 1``."""
    z = p.a * (p.e - 1.0) / (p.a + p.d)
    y = p.d * z
    return State3(p.c - p.b * y - z, y, z)
