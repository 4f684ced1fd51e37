"""Batch drivers behind the ``optimize`` and ``table`` commands."""
from __future__ import annotations

import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .optimize import OptResult, PsoConfig, SsoConfig, pso_optimize, sso_optimize

ALGORITHMS = ("sso", "pso")


def run_optimizer(algo: str, objective, cfg: SsoConfig | PsoConfig, executor=None) -> OptResult:
    if algo == "sso":
        return sso_optimize(objective, cfg, executor)
    if algo == "pso":
        return pso_optimize(objective, cfg, executor)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


@dataclass
class BatchRow:
    experiment: int
    seed: int
    k1: float
    k3: float
    tss: float


@dataclass
class BatchSummary:
    algorithm: str
    rows: list[BatchRow] = field(default_factory=list)

    @property
    def costs(self) -> list[float]:
        return [r.tss for r in self.rows]

    @property
    def tss_min(self) -> float:
        return min(self.costs)

    @property
    def tss_max(self) -> float:
        return max(self.costs)

    @property
    def tss_median(self) -> float:
        return statistics.median(self.costs)

    @property
    def spread(self) -> float:
        return self.tss_max - self.tss_min

    def aggregates(self) -> dict:
        return {
            "runs": len(self.rows),
            "tss_min": self.tss_min,
            "tss_median": self.tss_median,
            "tss_max": self.tss_max,
            "tss_spread": self.spread,
        }


def run_table(algo: str, objective, make_cfg, repeats: int, base_seed: int = 0, workers: int = 1):
    """``repeats`` independent runs seeded ``base_seed + index``.

    ``make_cfg(seed)`` builds the optimizer config. Returns the summary and
    the individual results in experiment order.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    seeds = [base_seed + i for i in range(repeats)]

    def one(seed):
        return run_optimizer(algo, objective, make_cfg(seed))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    summary = BatchSummary(algo)
    for i, r in enumerate(results, start=1):
        summary.rows.append(BatchRow(i, r.seed, r.best_point[0], r.best_point[1], r.best_cost))
    return summary, results


def matched_pso_iters(sso: SsoConfig, swarm: int) -> int:
    """PSO iteration count whose evaluation total equals the SSO run's."""
    total = sso.total_evals()
    if total % swarm:
        raise ValueError(f"SSO budget {total} is not a multiple of swarm size {swarm}")
    return total // swarm - 1
