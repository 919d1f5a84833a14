"""One-way communication cost of CHSH-type correlations and an Information Causality bound.

The target behaviour is ``p(a,b|x,y) = (1 + eps)/4`` when ``a xor b = x y``
and ``(1 - eps)/4`` otherwise, with ``x, y`` uniform and independent.

Classical cost. Any protocol ``p(u|x)``, ``p(a|u,x)``, ``p(b|u,y)`` can be
refined so that ``U`` names a deterministic pair of local response
functions ``(alpha, beta)``: the refinement only adds randomness
independent of ``X`` given ``U``, so ``I(X;U)`` cannot grow, and the
refined variable is itself a valid ``U``. The minimum of ``I(X;U)`` is
therefore a convex program over ``p(s|x)`` on the 16 deterministic
strategies ``s``, with linear equality constraints reproducing the target.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import linprog

from . import constants as C
from .errors import DomainError, InfeasibleError, NumericalFailure, ValidationError
from .infotheory import binary_entropy
from .region_opt import hull_distance
from .search import parallel_map


def _check_eps(eps):
    eps = float(eps)
    if not 0.0 <= eps <= 1.0 or not np.isfinite(eps):
        raise DomainError(f"eps={eps} outside [0, 1]")
    return eps


@dataclass(frozen=True)
class ChshInstance:
    eps: float
    joint: np.ndarray  # p(a, b, x, y)

    @property
    def behaviour(self):
        """``p(a, b | x, y)`` indexed ``[a, b, x, y]``."""
        return self.joint * 4.0

    @property
    def win_probability(self):
        b = self.behaviour
        return float(sum(0.25 * b[a, bb, x, y]
                         for a, bb, x, y in product(range(2), repeat=4) if a ^ bb == x * y))


def chsh_dist(eps):
    """The CHSH-type joint law with bias ``eps``.

    >>> chsh_dist(1.0).win_probability
    1.0
    """
    eps = _check_eps(eps)
    j = np.empty((2, 2, 2, 2))
    for a, b, x, y in product(range(2), repeat=4):
        j[a, b, x, y] = 0.25 * ((1 + eps) if a ^ b == x * y else (1 - eps)) / 4.0
    return ChshInstance(eps, j)


#: The 16 deterministic local strategies as (alpha, beta) truth tables.
STRATEGIES = tuple(product(product(range(2), repeat=2), repeat=2))


def strategy_tensor():
    """``M[s, a, b, x, y] = 1`` iff strategy ``s`` answers ``(a, b)`` on ``(x, y)``."""
    m = np.zeros((16, 2, 2, 2, 2))
    for s, (alpha, beta) in enumerate(STRATEGIES):
        for x, y in product(range(2), repeat=2):
            m[s, alpha[x], beta[y], x, y] = 1.0
    return m


def local_vertices():
    """Behaviours of the deterministic strategies, flattened to (16, 16)."""
    return strategy_tensor().reshape(16, -1)


def local_polytope_distance(behaviour, iters=10000):
    """Euclidean distance of ``p(a,b|x,y)`` from the local polytope (pairwise Frank-Wolfe)."""
    b = np.asarray(behaviour, dtype=float)
    if b.shape != (2, 2, 2, 2):
        raise ValidationError("behaviour must be indexed [a, b, x, y]")
    return hull_distance(b.ravel(), local_vertices(), iters=iters)


@dataclass(frozen=True)
class ChshProtocol:
    """Optimal ``p(s|x)`` over the deterministic strategies and its rate."""

    eps: float
    weights: np.ndarray  # (2, 16), rows x
    rate: float
    mismatch: float


def mismatch_l1(weights, eps):
    """L1 distance between the behaviour simulated by ``p(s|x)`` and the target."""
    m = strategy_tensor()
    target = chsh_dist(eps).behaviour
    sim = np.zeros_like(target)
    for x in range(2):
        sim[:, :, x, :] = np.tensordot(weights[x], m[:, :, :, x, :], axes=1)
    return float(np.sum(np.abs(sim - target))) + float(np.sum(np.abs(weights.sum(1) - 1.0)))


def _rate_bits(weights):
    mix = 0.5 * (weights[0] + weights[1])
    total = 0.0
    for x in range(2):
        w = weights[x]
        keep = w > 0
        total += 0.5 * float(np.sum(w[keep] * np.log2(w[keep] / mix[keep])))
    return max(total, 0.0)


def classical_protocol(eps, solver="CLARABEL"):
    """Solve ``min I(X;S)`` subject to exact reproduction of the target behaviour."""
    import cvxpy as cp

    eps = _check_eps(eps)
    m = strategy_tensor()
    target = chsh_dist(eps).behaviour
    w = cp.Variable((2, 16), nonneg=True)
    mix = 0.5 * (w[0] + w[1])
    objective = 0.5 * cp.sum(cp.rel_entr(w[0], mix)) + 0.5 * cp.sum(cp.rel_entr(w[1], mix))
    cons = [cp.sum(w, axis=1) == 1]
    for a, b, x, y in product(range(2), repeat=4):
        cons.append(w[x] @ m[:, a, b, x, y] == target[a, b, x, y])
    prob = cp.Problem(cp.Minimize(objective), cons)
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError as exc:
        raise NumericalFailure("convex solver failed", eps=eps, error=str(exc)) from exc
    if w.value is None:
        raise InfeasibleError("no feasible protocol", eps=eps, mismatch=np.inf, status=prob.status)
    weights = np.clip(w.value, 0.0, None)
    weights /= weights.sum(axis=1, keepdims=True)
    mis = mismatch_l1(weights, eps)
    if mis > C.CHSH_FEASIBILITY_TOL:
        raise InfeasibleError("protocol misses the target", eps=eps, mismatch=mis)
    return ChshProtocol(eps, weights, min(_rate_bits(weights), 1.0), mis)


def classical_cost(eps):
    """Minimum ``I(X;U)`` in bits over classical protocols with preshared randomness."""
    return classical_protocol(eps).rate


def ic_lower_bound(eps, n_max=C.IC_DEFAULT_NMAX):
    """``max_n (2^n (1 - h((1+eps^n)/2)) - 1) / (2^n - 1)`` over ``n = 1..n_max``, floored at 0.

    >>> ic_lower_bound(1.0)
    1.0
    """
    eps = _check_eps(eps)
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    n = np.arange(1, int(n_max) + 1, dtype=float)
    two = 2.0 ** n
    vals = (two * (1.0 - binary_entropy((1.0 + eps ** n) / 2.0)) - 1.0) / (two - 1.0)
    return float(max(0.0, vals.max()))


@dataclass(frozen=True)
class SweepRow:
    eps: float
    p: float
    classical_cost: float
    ic_lower_bound: float
    one_minus_h_eps: float


def one_minus_h(eps):
    """``1 - h(eps)``, reported next to the classical curve as a comparison only."""
    return 1.0 - float(binary_entropy(eps))


def curve_sweep(eps_grid, n_max=C.IC_DEFAULT_NMAX):
    """Rows ``(eps, p, classical_cost, ic_lower_bound, 1 - h(eps))`` sorted by ``eps``."""
    grid = sorted(_check_eps(e) for e in eps_grid)

    def row(e):
        return SweepRow(e, 0.5 * (1.0 + e), classical_cost(e), ic_lower_bound(e, n_max), one_minus_h(e))

    return parallel_map(row, grid)


def local_membership_lp(behaviour):
    """Independent LP membership test of a behaviour in the local polytope."""
    v = local_vertices()
    b = np.asarray(behaviour, dtype=float).ravel()
    a_eq = np.vstack([v.T, np.ones((1, 16))])
    b_eq = np.append(b, 1.0)
    res = linprog(np.zeros(16), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * 16, method="highs")
    return res.status == 0
