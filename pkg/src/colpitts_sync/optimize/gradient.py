from __future__ import annotations

from concurrent.futures import Executor

import numpy as np

from .result import Objective, evaluate_batch


def probe_points(x, h, lower, upper):
    """Stencil for each dimension: ``(points, weights)`` pairs.

    Central difference where both neighbours fit inside the box, otherwise a
    second-order one-sided stencil. Every dimension costs exactly two new
    evaluations; the one-sided forms reuse ``f(x)``.
    """
    x = np.asarray(x, dtype=float)
    stencils = []
    for j in range(len(x)):
        step = np.zeros_like(x)
        step[j] = h[j]
        if x[j] - h[j] >= lower[j] and x[j] + h[j] <= upper[j]:
            stencils.append(((x + step, x - step), (1.0, -1.0), 0.0))
        elif x[j] + 2 * h[j] <= upper[j]:
            stencils.append(((x + step, x + 2 * step), (4.0, -1.0), -3.0))
        elif x[j] - 2 * h[j] >= lower[j]:
            stencils.append(((x - step, x - 2 * step), (-4.0, 1.0), 3.0))
        else:
            raise ValueError(f"box too narrow for finite-difference step {h[j]} in dimension {j}")
    return stencils


def combine(stencils, probe_costs, f0, h):
    """Finite-difference quotients from evaluated probes; non-finite probes zero the component."""
    grad = np.zeros(len(stencils))
    flagged = np.zeros(len(stencils), dtype=bool)
    for j, (_, w, w0) in enumerate(stencils):
        fa, fb = probe_costs[2 * j], probe_costs[2 * j + 1]
        vals = [fa, fb] + ([f0] if w0 else [])
        if not np.all(np.isfinite(vals)):
            flagged[j] = True
            continue
        acc = w[0] * fa + w[1] * fb
        if w0:
            acc += w0 * f0
        grad[j] = acc / (2.0 * h[j])
    return grad, flagged


def fd_gradient(
    objective: Objective,
    x,
    h,
    bounds,
    f0: float | None = None,
    executor: Executor | None = None,
):
    """Numerical gradient of a black-box objective inside a box.

    Returns ``(grad, flagged)``; ``flagged[j]`` marks components zeroed
    because a probe evaluated to a non-finite cost. ``f0`` (the cost at
    ``x``) is evaluated only if a one-sided stencil needs it and it was not
    supplied.
    """
    x = np.asarray(x, dtype=float)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape)
    lower, upper = (np.broadcast_to(np.asarray(b, dtype=float), x.shape) for b in bounds)
    if np.any(h <= 0):
        raise ValueError("finite-difference steps must be positive")
    if np.any(x < lower) or np.any(x > upper):
        raise ValueError("x lies outside the bounds")
    stencils = probe_points(x, h, lower, upper)
    pts = [p for pair, _, _ in stencils for p in pair]
    costs = evaluate_batch(objective, pts, executor)
    if f0 is None and any(w0 for _, _, w0 in stencils):
        f0 = objective(x)
    return combine(stencils, costs, f0, h)
