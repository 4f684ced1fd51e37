"""Global-best particle swarm baseline."""
from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .result import BestTracker, Objective, OptResult, config_dict, evaluate_batch


@dataclass(frozen=True)
class PsoConfig:
    swarm: int = 50
    iters: int = 30
    inertia: float = 0.729
    c1: float = 1.49445
    c2: float = 1.49445
    vmax_frac: float = 0.2
    lower: Sequence[float] = (0.0, 0.0)
    upper: Sequence[float] = (0.79, 10.0)
    seed: int = 0

    def __post_init__(self):
        if self.swarm < 1 or self.iters < 1:
            raise ValueError("swarm and iters must be at least 1")
        if not 0 <= self.inertia <= 1:
            raise ValueError("inertia must lie in [0, 1]")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be non-negative")
        if self.vmax_frac <= 0:
            raise ValueError("vmax_frac must be positive")
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper) or any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("bounds must pair up with lower < upper")

    @property
    def vmax(self) -> np.ndarray:
        return self.vmax_frac * (np.array(self.upper) - np.array(self.lower))

    def total_evals(self) -> int:
        return self.swarm * (self.iters + 1)


def pso_optimize(objective: Objective, cfg: PsoConfig, executor: Executor | None = None) -> OptResult:
    rng = np.random.default_rng(cfg.seed)
    lower, upper = np.array(cfg.lower), np.array(cfg.upper)
    nd = len(lower)
    vmax = cfg.vmax

    x = rng.uniform(lower, upper, size=(cfg.swarm, nd))
    v = rng.uniform(-vmax, vmax, size=(cfg.swarm, nd))
    cost = evaluate_batch(objective, list(x), executor)
    evals = cfg.swarm
    pbest, pbest_cost = x.copy(), cost.copy()
    best = BestTracker()
    best.offer(x, cost)

    for _ in range(cfg.iters):
        r1 = rng.random((cfg.swarm, nd))
        r2 = rng.random((cfg.swarm, nd))
        v = cfg.inertia * v + cfg.c1 * r1 * (pbest - x) + cfg.c2 * r2 * (best.point - x)
        v = np.clip(v, -vmax, vmax)
        x = np.clip(x + v, lower, upper)
        cost = evaluate_batch(objective, list(x), executor)
        evals += cfg.swarm
        improved = cost < pbest_cost
        pbest[improved] = x[improved]
        pbest_cost[improved] = cost[improved]
        best.offer(x, cost)
        best.close_stage(evals)

    return OptResult(
        algorithm="pso",
        best_point=tuple(float(v) for v in best.point),
        best_cost=best.cost,
        history=best.history,
        history_points=best.points,
        history_evals=best.evals_at,
        evals=evals,
        seed=cfg.seed,
        config=config_dict(cfg),
    )
