from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

Objective = Callable[[np.ndarray], float]


@dataclass
class OptResult:
    """Outcome of one seeded optimizer run.

    ``history[m]`` is the best cost seen up to and including stage ``m``
    (initial population counted), so it never increases.
    """

    algorithm: str
    best_point: tuple[float, ...]
    best_cost: float
    history: list[float]
    history_points: list[tuple[float, ...]]
    history_evals: list[int]
    evals: int
    seed: int
    config: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "best_point": list(self.best_point),
            "best_cost": self.best_cost,
            "history": list(self.history),
            "history_points": [list(p) for p in self.history_points],
            "history_evals": list(self.history_evals),
            "evals": self.evals,
            "seed": self.seed,
            "config": self.config,
        }


def evaluate_batch(objective: Objective, points: Sequence[np.ndarray], executor: Executor | None = None) -> np.ndarray:
    """Evaluate in input order; the executor only changes scheduling."""
    if executor is None:
        costs = [objective(p) for p in points]
    else:
        costs = list(executor.map(objective, points))
    return np.asarray(costs, dtype=float)


class BestTracker:
    def __init__(self):
        self.cost = np.inf
        self.point: np.ndarray | None = None
        self.history: list[float] = []
        self.points: list[tuple[float, ...]] = []
        self.evals_at: list[int] = []

    def offer(self, points: np.ndarray, costs: np.ndarray) -> None:
        i = int(np.argmin(costs))
        if self.point is None or costs[i] < self.cost:
            self.cost = float(costs[i])
            self.point = np.array(points[i], dtype=float)

    def close_stage(self, evals: int) -> None:
        self.history.append(self.cost)
        self.points.append(tuple(float(v) for v in self.point))
        self.evals_at.append(evals)


def config_dict(cfg) -> dict[str, Any]:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()}
