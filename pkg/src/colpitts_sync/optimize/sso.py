"""Shark smell optimisation over a box.

Each stage moves every shark along a damped, clamped velocity driven by the
numerical gradient (forward move), probes ``K`` multiplicative perturbations
of the forward point (rotational move) and keeps the cheapest candidate.

The cost is minimised: sharks follow odour ``-cost``, so the velocity uses
``-grad(cost)``.
"""
from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gradient import combine, probe_points
from .result import BestTracker, Objective, OptResult, config_dict, evaluate_batch


def _per_stage(value, m_stages: int) -> tuple[float, ...]:
    if np.ndim(value) == 0:
        return (float(value),) * m_stages
    value = tuple(float(v) for v in value)
    if len(value) != m_stages:
        raise ValueError(f"schedule needs {m_stages} entries, got {len(value)}")
    return value


@dataclass(frozen=True)
class SsoConfig:
    population: int = 50
    stages: int = 30
    local_points: int = 4
    mu: float | Sequence[float] = 0.9
    alpha: float | Sequence[float] = 0.1
    gamma: float | Sequence[float] = 4.0
    dt_stage: float = 1.0
    fd_step: float | Sequence[float] = 1e-3
    lower: Sequence[float] = (0.0, 0.0)
    upper: Sequence[float] = (0.79, 10.0)
    init_velocity: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("population", "stages", "local_points"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be at least 1")
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("lower and upper bounds need the same, non-zero length")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("each lower bound must be below its upper bound")
        for name in ("mu", "alpha", "gamma"):
            value = getattr(self, name)
            if np.ndim(value):
                object.__setattr__(self, name, _per_stage(value, self.stages))
        if any(not 0 < a < 1 for a in self.alphas):
            raise ValueError("alpha must lie strictly between 0 and 1")
        if any(m <= 0 for m in self.mus):
            raise ValueError("mu must be positive")
        if any(g <= 0 for g in self.gammas):
            raise ValueError("gamma must be positive")
        if self.init_velocity < 0:
            raise ValueError("init_velocity must be non-negative")
        if self.dt_stage <= 0:
            raise ValueError("dt_stage must be positive")
        h = self.steps
        if np.any(h <= 0):
            raise ValueError("fd_step must be positive")
        if np.any(np.subtract(self.upper, self.lower) < 4 * h):
            raise ValueError("bounds must span at least four finite-difference steps")

    @property
    def nd(self) -> int:
        return len(self.lower)

    @property
    def mus(self):
        return _per_stage(self.mu, self.stages)

    @property
    def alphas(self):
        return _per_stage(self.alpha, self.stages)

    @property
    def gammas(self):
        return _per_stage(self.gamma, self.stages)

    @property
    def steps(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.fd_step, dtype=float), (self.nd,)).copy()

    def evals_per_stage(self) -> int:
        return self.population * (2 * self.nd + 1 + self.local_points)

    def total_evals(self) -> int:
        return self.population + self.stages * self.evals_per_stage()


@dataclass
class SharkPopulation:
    positions: np.ndarray  # (NP, ND)
    velocities: np.ndarray  # (NP, ND), velocity of the previous stage
    costs: np.ndarray  # (NP,)
    stage: int = 0


@dataclass
class StageDraws:
    """Random numbers consumed by one stage, drawn before any evaluation."""

    r1: np.ndarray  # (NP,)
    r2: np.ndarray  # (NP,)
    r3: np.ndarray  # (NP, K, ND)

    @classmethod
    def draw(cls, rng: np.random.Generator, population: int, k: int, nd: int) -> "StageDraws":
        r1 = np.empty(population)
        r2 = np.empty(population)
        r3 = np.empty((population, k, nd))
        for i in range(population):
            r1[i] = rng.random()
            r2[i] = rng.random()
            r3[i] = rng.uniform(-1.0, 1.0, size=(k, nd))
        return cls(r1, r2, r3)


def sso_velocity(grad, v_prev, mu: float, alpha: float, gamma: float, r1: float, r2: float) -> np.ndarray:
    """Forward-move velocity with the per-dimension magnitude limit.

    ``raw = mu*r1*(-grad) + alpha*r2*v_prev``; each component keeps its sign
    but its magnitude is cut to ``|gamma * v_prev|``.
    """
    grad = np.asarray(grad, dtype=float)
    v_prev = np.asarray(v_prev, dtype=float)
    raw = mu * r1 * (-grad) + alpha * r2 * v_prev
    return np.sign(raw) * np.minimum(np.abs(raw), np.abs(gamma * v_prev))


def select_candidate(costs) -> int:
    """Index of the cheapest candidate; the earliest wins ties (forward point first)."""
    return int(np.argmin(costs))


def sso_stage(
    pop: SharkPopulation,
    objective: Objective,
    cfg: SsoConfig,
    rng: np.random.Generator,
    executor: Executor | None = None,
    draws: StageDraws | None = None,
) -> tuple[SharkPopulation, int]:
    """Advance the whole population by one stage; returns ``(population, evals)``."""
    m = pop.stage
    mu, alpha, gamma = cfg.mus[m], cfg.alphas[m], cfg.gammas[m]
    lower, upper = np.array(cfg.lower), np.array(cfg.upper)
    h = cfg.steps
    n_pop, nd, k = len(pop.positions), cfg.nd, cfg.local_points
    if draws is None:
        draws = StageDraws.draw(rng, n_pop, k, nd)

    stencils = [probe_points(x, h, lower, upper) for x in pop.positions]
    probes = [p for st in stencils for pair, _, _ in st for p in pair]
    probe_costs = evaluate_batch(objective, probes, executor)
    evals = len(probes)

    velocities = np.empty_like(pop.velocities)
    candidates = np.empty((n_pop, 1 + k, nd))
    for i in range(n_pop):
        chunk = probe_costs[i * 2 * nd : (i + 1) * 2 * nd]
        grad, _ = combine(stencils[i], chunk, pop.costs[i], h)
        velocities[i] = sso_velocity(grad, pop.velocities[i], mu, alpha, gamma, draws.r1[i], draws.r2[i])
        y = np.clip(pop.positions[i] + velocities[i] * cfg.dt_stage, lower, upper)
        candidates[i, 0] = y
        candidates[i, 1:] = np.clip(y + draws.r3[i] * y, lower, upper)

    flat = candidates.reshape(-1, nd)
    cand_costs = evaluate_batch(objective, list(flat), executor).reshape(n_pop, 1 + k)
    evals += len(flat)

    positions = np.empty_like(pop.positions)
    costs = np.empty(n_pop)
    for i in range(n_pop):
        j = select_candidate(cand_costs[i])
        positions[i] = candidates[i, j]
        costs[i] = cand_costs[i, j]
    return SharkPopulation(positions, velocities, costs, m + 1), evals


def initial_population(objective, cfg: SsoConfig, rng, executor=None) -> SharkPopulation:
    lower, upper = np.array(cfg.lower), np.array(cfg.upper)
    positions = rng.uniform(lower, upper, size=(cfg.population, cfg.nd))
    span = cfg.init_velocity * (upper - lower)
    velocities = rng.uniform(-span, span, size=(cfg.population, cfg.nd))
    costs = evaluate_batch(objective, list(positions), executor)
    return SharkPopulation(positions, velocities, costs, 0)


def sso_optimize(objective: Objective, cfg: SsoConfig, executor: Executor | None = None) -> OptResult:
    rng = np.random.default_rng(cfg.seed)
    pop = initial_population(objective, cfg, rng, executor)
    evals = cfg.population
    best = BestTracker()
    best.offer(pop.positions, pop.costs)
    for _ in range(cfg.stages):
        pop, n = sso_stage(pop, objective, cfg, rng, executor)
        evals += n
        best.offer(pop.positions, pop.costs)
        best.close_stage(evals)
    return OptResult(
        algorithm="sso",
        best_point=tuple(float(v) for v in best.point),
        best_cost=best.cost,
        history=best.history,
        history_points=best.points,
        history_evals=best.evals_at,
        evals=evals,
        seed=cfg.seed,
        config=config_dict(cfg),
    )

