from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from colpitts_sync.optimize import PsoConfig, pso_optimize


def sphere(x):
    return float(np.dot(x, x))


BOX = dict(lower=(-5, -5), upper=(5, 5))


def test_sphere():
    res = pso_optimize(sphere, PsoConfig(swarm=50, iters=30, seed=2, **BOX))
    assert res.best_cost < 1e-2


def test_history_and_evals():
    res = pso_optimize(sphere, PsoConfig(swarm=10, iters=15, seed=0, **BOX))
    assert len(res.history) == 15
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert res.evals == 10 * 16


def test_degenerate_never_moves():
    seen = []
    cfg = PsoConfig(swarm=1, iters=1, inertia=0.0, c1=0.0, c2=0.0, seed=4, **BOX)
    res = pso_optimize(lambda x: seen.append(np.array(x)) or sphere(x), cfg)
    np.testing.assert_array_equal(seen[0], seen[1])
    assert res.best_point == tuple(seen[0])


def test_bounds_and_speed_cap():
    seen = []
    cfg = PsoConfig(swarm=8, iters=20, seed=7, lower=(0, 0), upper=(0.79, 10))
    pso_optimize(lambda x: seen.append(np.array(x)) or (x[0] - 3) ** 2 + x[1] ** 2, cfg)
    pts = np.array(seen).reshape(21, 8, 2)
    assert np.all(pts >= 0) and np.all(pts <= [0.79, 10])
    assert np.all(np.abs(np.diff(pts, axis=0)) <= cfg.vmax + 1e-12)


def test_deterministic_serial_and_parallel():
    cfg = PsoConfig(swarm=10, iters=10, seed=5, **BOX)
    with ThreadPoolExecutor(3) as pool:
        assert pso_optimize(sphere, cfg) == pso_optimize(sphere, cfg) == pso_optimize(sphere, cfg, executor=pool)


@pytest.mark.parametrize(
    "kw", [{"swarm": 0}, {"iters": 0}, {"inertia": 1.5}, {"c1": -1.0}, {"vmax_frac": 0.0}, {"lower": (1, 1)}]
)
def test_rejects(kw):
    with pytest.raises(ValueError):
        PsoConfig(**kw)
