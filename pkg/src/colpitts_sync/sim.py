"""Fixed-step RK4 integration of the coupled master/slave pair and the TSS cost."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numba
import numpy as np

from .backstepping import ControlVariant, Gains, _control, lyapunov_values, transform_error
from .model import OscillatorParams, State3, _master_rhs

#: Cost reported for a simulation that left the finite range.
DIVERGED = math.inf

PAPER_MASTER_IC = State3(10.45, 0.718, 8.89)
PAPER_SLAVE_IC = State3(8.0, 2.0, 3.0)


class DivergenceError(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"state became non-finite at t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_final: float = 70.0
    t_activate: float = 20.0
    master_ic: State3 = PAPER_MASTER_IC
    slave_ic: State3 = PAPER_SLAVE_IC
    record_stride: int = 10

    def __post_init__(self):
        object.__setattr__(self, "master_ic", State3(*map(float, self.master_ic)))
        object.__setattr__(self, "slave_ic", State3(*map(float, self.slave_ic)))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive")
        if not (math.isfinite(self.t_final) and self.t_final >= 0):
            raise ValueError("t_final must be a finite non-negative number")
        if not 0 <= self.t_activate <= self.t_final:
            raise ValueError("t_activate must lie in [0, t_final]")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        n = self.t_final / self.dt
        if n > 2**53:
            raise ValueError("t_final/dt is too large for the step counter")
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise ValueError(f"t_final={self.t_final} is not a whole number of dt={self.dt} steps")
        for s in (*self.master_ic, *self.slave_ic):
            if not math.isfinite(s):
                raise ValueError("initial conditions must be finite")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def activation_step(self) -> int:
        """Index of the first step integrated with the controller on."""
        return min(int(math.ceil(self.t_activate / self.dt - 1e-9)), self.n_steps)


#: Objective protocol used for gain tuning: controller live over the whole horizon.
OPTIMIZATION_SIM = SimConfig(dt=1e-3, t_final=70.0, t_activate=0.0)


@dataclass
class Trajectory:
    times: np.ndarray
    master: np.ndarray  # (n, 3)
    slave: np.ndarray  # (n, 3)
    errors: np.ndarray  # (n, 3), master - slave
    control: np.ndarray  # (n,)
    tss: float
    final_master: State3 | None = None
    final_slave: State3 | None = None

    def __len__(self):
        return len(self.times)

    @classmethod
    def from_errors(cls, times, errors) -> "Trajectory":
        """Error-only trajectory with TSS by trapezoid over the given samples."""
        times = np.asarray(times, dtype=float)
        errors = np.asarray(errors, dtype=float).reshape(len(times), 3)
        sq = (errors**2).sum(axis=1)
        tss = float(np.sum(0.5 * np.diff(times) * (sq[1:] + sq[:-1])))
        zeros = np.zeros_like(errors)
        return cls(times, errors.copy(), zeros, errors, np.zeros(len(times)), tss)

    def lyapunov(self, g: Gains) -> np.ndarray:
        """Column of v3 values along the recorded error samples."""
        return np.array([lyapunov_values(transform_error(e, g)).v3 for e in self.errors])


@dataclass(frozen=True)
class CostResult:
    tss: float
    evals_time: float


def rk4_step(field: Callable[[np.ndarray], np.ndarray], s, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``ds/dt = field(s)``.

    Raises :class:`DivergenceError` (with ``t`` set to ``nan``) when the
    update is not finite.
    """
    s = np.asarray(s, dtype=float)
    k1 = np.asarray(field(s), dtype=float)
    k2 = np.asarray(field(s + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(field(s + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(field(s + dt * k3), dtype=float)
    out = s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(math.nan)
    return out


def integrate(field, s0, dt: float, n_steps: int) -> np.ndarray:
    """Repeated :func:`rk4_step`; returns all ``n_steps + 1`` states."""
    out = np.empty((n_steps + 1, len(s0)))
    out[0] = s0
    for i in range(n_steps):
        try:
            out[i + 1] = rk4_step(field, out[i], dt)
        except DivergenceError:
            raise DivergenceError((i + 1) * dt) from None
    return out


@numba.njit(cache=True, nogil=True)
def _pair_rhs(s, on, k1, k3, variant, a, b, c, d, e, out):
    xm, ym, zm = s[0], s[1], s[2]
    xs, ys, zs = s[3], s[4], s[5]
    u = 0.0
    if on:
        u = _control(xm - xs, ym - ys, zm - zs, zm, k1, k3, variant, a, b, d, e)
    out[0], out[1], out[2] = _master_rhs(xm, ym, zm, a, b, c, d, e)
    dx, dy, dz = _master_rhs(xs, ys, zs, a, b, c, d, e)
    out[3], out[4], out[5] = dx + u, dy, dz
    return u


@numba.njit(cache=True, nogil=True)
def _run_pair(s, pars, k1, k3, variant, dt, n_steps, n_act, stride, record, rec_state, rec_u):
    """Integrate in place. Returns (tss, failed_step); failed_step is -1 on success."""
    a, b, c, d, e = pars[0], pars[1], pars[2], pars[3], pars[4]
    q1 = np.empty(6)
    q2 = np.empty(6)
    q3 = np.empty(6)
    q4 = np.empty(6)
    tmp = np.empty(6)
    sq_prev = (s[0] - s[3]) ** 2 + (s[1] - s[4]) ** 2 + (s[2] - s[5]) ** 2
    tss = 0.0
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n_steps):
        on = i >= n_act
        u = _pair_rhs(s, on, k1, k3, variant, a, b, c, d, e, q1)
        if record and i % stride == 0:
            r = i // stride
            for j in range(6):
                rec_state[r, j] = s[j]
            rec_u[r] = u
        for j in range(6):
            tmp[j] = s[j] + half * q1[j]
        _pair_rhs(tmp, on, k1, k3, variant, a, b, c, d, e, q2)
        for j in range(6):
            tmp[j] = s[j] + half * q2[j]
        _pair_rhs(tmp, on, k1, k3, variant, a, b, c, d, e, q3)
        for j in range(6):
            tmp[j] = s[j] + dt * q3[j]
        _pair_rhs(tmp, on, k1, k3, variant, a, b, c, d, e, q4)
        for j in range(6):
            s[j] += sixth * (q1[j] + 2.0 * q2[j] + 2.0 * q3[j] + q4[j])
        sq = (s[0] - s[3]) ** 2 + (s[1] - s[4]) ** 2 + (s[2] - s[5]) ** 2
        if not np.isfinite(sq):
            return tss, i + 1
        tss += half * (sq_prev + sq)
        sq_prev = sq
    if record and n_steps % stride == 0:
        r = n_steps // stride
        for j in range(6):
            rec_state[r, j] = s[j]
        # terminal sample carries the control of the last integrated step
        on = n_steps > 0 and n_steps - 1 >= n_act
        rec_u[r] = _pair_rhs(s, on, k1, k3, variant, a, b, c, d, e, q1)
    return tss, -1


def _launch(p, g, cfg, variant, record):
    s = np.array([*cfg.master_ic, *cfg.slave_ic])
    n = cfg.n_steps
    stride = int(cfg.record_stride)
    n_rec = n // stride + 1 if record else 1
    rec_state = np.zeros((n_rec, 6))
    rec_u = np.zeros(n_rec)
    tss, failed = _run_pair(
        s, np.array(p.as_tuple()), float(g.k1), float(g.k3), ControlVariant(variant).code,
        float(cfg.dt), n, cfg.activation_step, stride, record, rec_state, rec_u,
    )
    return s, tss, failed, rec_state, rec_u


def simulate_pair(
    p: OscillatorParams,
    g: Gains,
    cfg: SimConfig,
    variant: ControlVariant = ControlVariant.PRINTED,
) -> Trajectory:
    """Integrate master and controlled slave together.

    The control input is zero on steps starting before ``cfg.t_activate`` and
    follows the backstepping law afterwards. TSS is accumulated with the
    trapezoidal rule on every integration step.
    """
    g.check(p)
    s, tss, failed, rec, rec_u = _launch(p, g, cfg, variant, True)
    if failed >= 0:
        raise DivergenceError(failed * cfg.dt)
    n_rec = len(rec_u)
    times = np.arange(n_rec) * (cfg.record_stride * cfg.dt)
    master, slave = rec[:, :3].copy(), rec[:, 3:].copy()
    return Trajectory(
        times=times,
        master=master,
        slave=slave,
        errors=master - slave,
        control=rec_u,
        tss=float(tss),
        final_master=State3(*s[:3]),
        final_slave=State3(*s[3:]),
    )


def simulate_single(p: OscillatorParams, ic, dt: float, t_final: float, record_stride: int = 10):
    """Uncontrolled oscillator run; returns ``(times, states)``."""
    cfg = SimConfig(
        dt=dt, t_final=t_final, t_activate=t_final,
        master_ic=State3(*ic), slave_ic=State3(*ic), record_stride=record_stride,
    )
    traj = simulate_pair(p, Gains(0.0, 0.0), cfg)
    return traj.times, traj.master


def tss_cost(traj: Trajectory) -> CostResult:
    return CostResult(tss=traj.tss, evals_time=float(traj.times[-1]) if len(traj) else 0.0)


def evaluate_gains(
    k1: float,
    k3: float,
    p: OscillatorParams,
    cfg: SimConfig,
    variant: ControlVariant = ControlVariant.PRINTED,
) -> float:
    """TSS for gains ``(k1, 0, k3)``; :data:`DIVERGED` if the run blows up."""
    g = Gains(float(k1), float(k3))
    g.check(p)
    _, tss, failed, _, _ = _launch(p, g, cfg, variant, False)
    if failed >= 0 or not math.isfinite(tss):
        return DIVERGED
    return float(tss)


@dataclass(frozen=True)
class GainObjective:
    """Picklable ``x -> TSS`` map over the decision vector ``(k1, k3)``."""

    params: OscillatorParams = field(default_factory=OscillatorParams)
    sim: SimConfig = OPTIMIZATION_SIM
    variant: ControlVariant = ControlVariant.PRINTED

    def __call__(self, x) -> float:
        return evaluate_gains(x[0], x[1], self.params, self.sim, self.variant)

    def with_sim(self, **changes) -> "GainObjective":
        return replace(self, sim=replace(self.sim, **changes))
