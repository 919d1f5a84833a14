"""Classical channels that reproduce the mutual-information curve of a qubit ensemble.

Notation. The ensemble is ``X=0 -> rho_0`` (Bloch vector ``s``) with
probability ``p`` and ``X=1 -> rho_1`` (Bloch vector ``r``) otherwise. With

    d = |s - r|^2,   c = <r|s - r>,   R = |r|^2,   Delta = R d - c^2,

the binary channel ``D_{a,b}`` sends ``X=0`` to output 0 with probability ``a``
and ``X=1`` to output 0 with probability ``b``. For every ``theta`` in [0, 1]
the pair ``(a_theta, b_theta)`` satisfies

    a c = (d + c) b - d / 2,
    b (1 - b) d / (a - b)^2 + R = 1 / theta,

so that the second derivative of ``H(D_{a,b})`` in ``p`` is
``-d * sum_k theta^(k+1) Z^k``. Mixing ``D_{a_1,b_1}`` with the family
``D_{a_{u^2}, b_{u^2}}`` (``u`` uniform on [0, 1]) in proportions
``1 - Delta/d`` and ``Delta/d`` then reproduces ``I(X;F)`` for all ``p``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import constants as C
from . import kernels
from .errors import DomainError, NumericalFailure, ValidationError
from .infotheory import binary_entropy
from .qmath import bloch_to_density
from .search import project_simplex


def _bloch(v, name):
    v = np.asarray(v, dtype=float)
    bloch_to_density(v)  # shape and norm validation
    return v


@dataclass(frozen=True)
class MatchParams:
    r: np.ndarray
    s: np.ndarray
    d: float
    c: float
    delta: float
    weight_disc: float
    a1: float
    b1: float

    @classmethod
    def from_bloch(cls, r, s):
        r, s = _bloch(r, "r"), _bloch(s, "s")
        diff = s - r
        d = float(diff @ diff)
        c = float(r @ diff)
        delta = max(0.0, float(r @ r) * d - c * c)
        if d == 0.0:
            return cls(r, s, 0.0, 0.0, 0.0, 1.0, 0.5, 0.5)
        a1, b1 = solve_ab(1.0, r, s)
        return cls(r, s, d, c, delta, 1.0 - delta / d, a1, b1)


@dataclass(frozen=True)
class MICurve:
    """Mutual information (bits) sampled at ``grid`` values of ``p = P(X=0)``."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.shape != v.shape or g.ndim != 1:
            raise ValidationError("grid and values must be 1-D arrays of equal length")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def max_concavity_violation(self):
        """Largest positive discrete second difference (0 for a concave curve)."""
        if self.grid.size < 3:
            return 0.0
        g, v = self.grid, self.values
        slopes = np.diff(v) / np.diff(g)
        return float(max(0.0, np.max(np.diff(slopes) * np.diff(g)[1:])))


def mi_curve_quantum(r, s, grid):
    """``I(X;F) = h(lambda_p) - p H(rho_0) - (1 - p) H(rho_1)`` on ``grid``."""
    r, s = _bloch(r, "r"), _bloch(s, "s")
    p = np.asarray(grid, dtype=float)
    if np.array_equal(r, s):
        return MICurve(p, np.zeros_like(p))
    mix = np.linalg.norm(np.outer(1.0 - p, r) + np.outer(p, s), axis=1)
    lam = 0.5 * (1.0 + np.minimum(mix, 1.0))
    h_s = binary_entropy(0.5 * (1.0 + min(np.linalg.norm(s), 1.0)))
    h_r = binary_entropy(0.5 * (1.0 + min(np.linalg.norm(r), 1.0)))
    return MICurve(p, np.maximum(binary_entropy(lam) - p * h_s - (1.0 - p) * h_r, 0.0))


def binary_channel(a, b):
    return np.array([[a, 1.0 - a], [b, 1.0 - b]])


def channel_mi_curve(w, grid):
    """``I(X;C)`` for a binary-input channel ``w`` at each ``p = P(X=0)`` in ``grid``."""
    w = np.asarray(w, dtype=float)
    p = np.asarray(grid, dtype=float)
    px = np.stack([p, 1.0 - p], axis=1)
    out = px @ w
    h_out = kernels.shannon_rows(out, C.ENTROPY_ZERO_CUT)
    h_rows = kernels.shannon_rows(w, C.ENTROPY_ZERO_CUT)
    return MICurve(p, np.maximum(h_out - px @ h_rows, 0.0))


def _ab_closed(theta, d, c, delta):
    # t = a - b >= 0 solves d / (4 t^2) + Delta / d = 1 / theta given the linear relation.
    theta = np.asarray(theta, dtype=float)
    t = d * np.sqrt(theta) / (2.0 * np.sqrt(d - theta * delta))
    return 0.5 + t * (c + d) / d, 0.5 + t * c / d


def ab_residuals(theta, a, b, r, s):
    """Residuals of the linear relation and of the ``1/theta`` constraint.

    The constraint is reported as ``theta * (b(1-b) d + R (a-b)^2) - (a-b)^2``,
    which is finite at ``theta = 0`` and ``a = b``.
    """
    r, s = np.asarray(r, float), np.asarray(s, float)
    diff = s - r
    d, c, R = diff @ diff, r @ diff, r @ r
    lin = a * c - (d + c) * b + d / 2.0
    dd = (a - b) ** 2
    cons = theta * (b * (1.0 - b) * d + R * dd) - dd
    return float(lin), float(cons)


def solve_ab(theta, r, s):
    """The pair ``(a_theta, b_theta)`` in [0, 1]^2 on the branch ``a >= b``.

    Eliminating ``a`` through the linear relation turns the constraint into
    a quadratic in ``t = a - b`` whose nonnegative root is
    ``t = d sqrt(theta) / (2 sqrt(d - theta Delta))``; this branch is
    continuous in ``theta``, gives ``(1/2, 1/2)`` at ``theta = 0``, and ends
    at the values ``a_1, b_1`` at ``theta = 1``.

    >>> solve_ab(1.0, [0, 0, 0], [0, 0, 1])
    (1.0, 0.5)
    """
    r, s = _bloch(r, "r"), _bloch(s, "s")
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta={theta} outside [0, 1]")
    diff = s - r
    d = float(diff @ diff)
    if d == 0.0:
        raise DomainError("solve_ab needs r != s")
    c = float(r @ diff)
    delta = max(0.0, float(r @ r) * d - c * c)
    if d - theta * delta <= 0.0:
        raise NumericalFailure("no root in [0,1]^2", theta=theta, r=r, s=s)
    a, b = _ab_closed(theta, d, c, delta)
    a, b = float(a), float(b)
    slack = 1e-12
    if not (np.isfinite(a) and np.isfinite(b)) or min(a, b) < -slack or max(a, b) > 1 + slack:
        raise NumericalFailure("no root in [0,1]^2", theta=theta, r=r, s=s, a=a, b=b)
    return min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)


def quadrature_nodes(n_quad):
    """Composite midpoint nodes and weights for ``u`` uniform on [0, 1]."""
    if n_quad < 1:
        raise ValidationError("n_quad must be >= 1")
    return (np.arange(n_quad) + 0.5) / n_quad, np.full(n_quad, 1.0 / n_quad)


def build_matching_channel(r, s, n_quad=200):
    """Binary-input channel with ``2 (n_quad + 1)`` outputs matching ``I(X;F)``.

    Output block 0 is ``D_{a_1,b_1}`` with weight ``1 - Delta/d``; block
    ``k + 1`` is ``D_{a_{u_k^2}, b_{u_k^2}}`` with weight ``Delta/(d n_quad)``
    at the midpoint node ``u_k``. For ``r = s`` the constant one-output
    channel is returned.
    """
    mp = MatchParams.from_bloch(r, s)
    if mp.d == 0.0:
        return np.ones((2, 1))
    u, wq = quadrature_nodes(n_quad)
    a, b = _ab_closed(u ** 2, mp.d, mp.c, mp.delta)
    a = np.concatenate([[mp.a1], np.clip(a, 0.0, 1.0)])
    b = np.concatenate([[mp.b1], np.clip(b, 0.0, 1.0)])
    weights = np.concatenate([[mp.weight_disc], (1.0 - mp.weight_disc) * wq])
    w = np.empty((2, 2 * a.size))
    w[0, 0::2], w[0, 1::2] = weights * a, weights * (1.0 - a)
    w[1, 0::2], w[1, 1::2] = weights * b, weights * (1.0 - b)
    return w


def matching_dictionary(r, s, n_quad, grid):
    """Curves of the individual binary blocks used by ``build_matching_channel``."""
    mp = MatchParams.from_bloch(r, s)
    if mp.d == 0.0:
        return [MICurve(np.asarray(grid, float), np.zeros(len(grid)))]
    u, _ = quadrature_nodes(n_quad)
    a, b = _ab_closed(u ** 2, mp.d, mp.c, mp.delta)
    pairs = [(mp.a1, mp.b1)] + list(zip(np.clip(a, 0, 1), np.clip(b, 0, 1)))
    return [channel_mi_curve(binary_channel(ai, bi), grid) for ai, bi in pairs]


def _entropy_nats_curve(r, s, p):
    z = np.linalg.norm(np.outer(1.0 - p, r) + np.outer(p, s), axis=1)
    return binary_entropy(0.5 * (1.0 + z)) * np.log(2.0)


def second_derivative_check(r, s, p, step=C.FINITE_DIFF_STEP):
    """Series form of ``d^2 H(F) / dp^2`` (nats) next to a central second difference.

    The series ``-d [ (Delta/d) sum Z^k/(2k+3) + (1 - Delta/d) sum Z^k ]`` is
    truncated once a term drops below ``SERIES_TERM_TOL``.
    """
    r, s = _bloch(r, "r"), _bloch(s, "s")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} must lie strictly inside (0, 1)")
    diff = s - r
    d = float(diff @ diff)
    if d == 0.0:
        return 0.0, 0.0
    c = float(r @ diff)
    delta = max(0.0, float(r @ r) * d - c * c)
    ps = np.array([p - step, p, p + step])
    z = d * ps ** 2 + 2.0 * c * ps + float(r @ r)
    if z.max() >= 1.0 - C.SERIES_Z_MARGIN:
        raise DomainError(f"Z={z.max():.9f} too close to 1 for the series")
    s_odd, s_geo, _ = kernels.curvature_series(float(z[1]), C.SERIES_TERM_TOL)
    closed = -(delta * s_odd + (d - delta) * s_geo)
    hv = _entropy_nats_curve(r, s, ps)
    fd = (hv[2] - 2.0 * hv[1] + hv[0]) / step ** 2
    return float(closed), float(fd)


def _fit_lp(a, y):
    # minimise t  s.t.  -t <= A w - y <= t,  w >= 0,  sum w <= 1
    m, k = a.shape
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    ones = np.ones((m, 1))
    a_ub = np.vstack([np.hstack([a, -ones]), np.hstack([-a, -ones]), np.append(np.ones(k), 0.0)[None]])
    b_ub = np.concatenate([y, -y, [1.0]])
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * (k + 1), method="highs")
    if res.status != 0:
        raise NumericalFailure("mixture LP failed", message=res.message)
    return np.clip(res.x[:k], 0.0, None)


def _fit_subgradient(a, y, iters):
    m, k = a.shape
    w = np.full(k, 1.0 / k)
    best_w, best = w.copy(), np.inf
    for it in range(iters):
        dev = a @ w - y
        i = int(np.argmax(np.abs(dev)))
        if abs(dev[i]) < best:
            best, best_w = abs(dev[i]), w.copy()
        g = np.sign(dev[i]) * a[i]
        gn = np.linalg.norm(g)
        if gn == 0.0:
            break
        w = project_simplex(w - abs(dev[i]) / (gn ** 2 * np.sqrt(it + 1.0)) * g)
    return best_w


def curve_fit_mixture(target, dictionary, method="lp", iters=5000):
    """Nonnegative weights (sum <= 1) minimising the max grid deviation from ``target``.

    ``method="lp"`` solves the min-max problem as a linear program;
    ``method="subgradient"`` runs projected subgradient steps on the simplex.
    Returns ``(weights, residual)`` with the residual evaluated directly.
    """
    if not dictionary:
        raise ValidationError("dictionary is empty")
    for cur in dictionary:
        if cur.grid.shape != target.grid.shape or np.any(cur.grid != target.grid):
            raise ValidationError("all curves must share the target grid")
    a = np.stack([cur.values for cur in dictionary], axis=1)
    y = target.values
    w = _fit_lp(a, y) if method == "lp" else _fit_subgradient(a, y, iters)
    return w, float(np.max(np.abs(a @ w - y)))
