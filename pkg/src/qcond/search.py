"""Derivative-free local search on products of simplices, with seeded multi-start.

Every restart draws from its own child of a single ``SeedSequence``, so
results do not depend on how restarts are scheduled across workers.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import constants as C


def project_simplex(v):
    """Euclidean projection of each row of ``v`` onto the probability simplex.

    Sort-based algorithm; works on a vector or on the last axis of an array.

    >>> project_simplex(np.array([2.0, 0.0]))
    array([1., 0.])
    """
    v = np.asarray(v, dtype=float)
    shape = v.shape
    rows = v.reshape(-1, shape[-1])
    n = rows.shape[1]
    u = -np.sort(-rows, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(rows.shape[0]), rho] / (rho + 1)
    return np.maximum(rows - theta[:, None], 0.0).reshape(shape)


def worker_count():
    """Worker cap from ``QCOND_THREADS`` (default 1)."""
    raw = os.environ.get("QCOND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """``list(map(fn, items))`` on up to ``worker_count()`` threads, order preserved."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def spawn_rngs(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


@dataclass
class LocalResult:
    x: np.ndarray
    value: float
    evals: int
    converged: bool


def pattern_search(f, x0, project=None, step0=C.PATTERN_STEP0, step_min=C.PATTERN_STEP_MIN,
                   max_evals=50_000, min_gain=1e-13):
    """Minimise ``f`` by coordinate-wise compass moves with step halving.

    ``project`` maps a trial point back to the feasible set after each move.
    A move is accepted only if it lowers ``f`` by more than ``min_gain``, so
    round-off noise on flat directions cannot keep the step from shrinking.
    ``converged`` is True when the step fell below ``step_min`` within the
    evaluation budget.
    """
    project = project or (lambda z: z)
    x = project(np.array(x0, dtype=float))
    fx = f(x)
    evals = 1
    step = step0
    n = x.size
    while step >= step_min:
        improved = False
        for i in range(n):
            for sign in (1.0, -1.0):
                y = x.copy()
                y.flat[i] += sign * step
                y = project(y)
                fy = f(y)
                evals += 1
                if fy < fx - min_gain:
                    x, fx = y, fy
                    improved = True
                    break
            if evals >= max_evals:
                return LocalResult(x, float(fx), evals, False)
        if not improved:
            step *= 0.5
    return LocalResult(x, float(fx), evals, True)


@dataclass
class MultiStartResult:
    x: np.ndarray
    value: float
    restarts_used: int
    converged: bool
    best_index: int
    values: np.ndarray


def multistart(f, sampler, restarts, seed, project=None, maximize=False, **kwargs):
    """Run ``pattern_search`` from ``restarts`` seeded starting points.

    ``sampler(rng)`` draws a starting point. The best value wins, with ties
    broken by the lowest restart index.
    """
    sign = -1.0 if maximize else 1.0
    g = (lambda z: sign * f(z))
    rngs = spawn_rngs(seed, restarts)
    runs = parallel_map(lambda rng: pattern_search(g, sampler(rng), project, **kwargs), rngs)
    vals = np.array([r.value for r in runs])
    best = int(np.argmin(vals))
    return MultiStartResult(
        x=runs[best].x,
        value=float(sign * vals[best]),
        restarts_used=restarts,
        converged=bool(runs[best].converged),
        best_index=best,
        values=sign * vals,
    )
