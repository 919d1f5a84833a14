"""Channel nets and a numerical check of the max-min / min-max exchange.

For a c-q ensemble ``x -> rho_x`` with law ``p(x)``, a channel
``q(y, z | x)`` and dictionary channels ``C_j`` (matrices ``W_j[x, c]``),

    T_j(q) = [I(F;Y) - I(F;Z)] - [I(C_j;Y) - I(C_j;Z)].

Because ``H(F)`` and ``H(C_j)`` cancel, ``T_j`` is a difference of two
averages of ``psi_j(post) = S(sum_x post_x rho_x) - H(post W_j)`` over the
posteriors ``p(x|z)`` and ``p(x|y)``.
"""
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import linprog, minimize

from . import constants as C
from .errors import NumericalFailure, ResourceError, ValidationError
from .infotheory import CqEnsemble, entropy_rows, validate_channel, vn_entropies
from .search import multistart, project_simplex, spawn_rngs


@dataclass(frozen=True)
class ChannelNet:
    in_size: int
    out_size: int
    delta: float
    lattice: np.ndarray  # admissible rows, (L, out_size)

    @property
    def size(self):
        return len(self.lattice) ** self.in_size

    def members(self):
        """All member channels as an array (size, in_size, out_size)."""
        idx = np.indices((len(self.lattice),) * self.in_size).reshape(self.in_size, -1).T
        return self.lattice[idx]

    def covering_radius(self, channels):
        """Per channel, the largest row L1 distance to the nearest net member."""
        ch = np.asarray(channels, dtype=float)
        d = np.abs(ch[..., None, :] - self.lattice).sum(-1).min(-1)
        return d.max(-1)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def simplex_lattice(out_size, n):
    """All probability vectors with entries in ``{0, 1/n, ..., 1}``."""
    return np.array(list(_compositions(n, out_size)), dtype=float) / n


def build_epsnet(in_size, out_size, delta):
    """Every channel whose rows lie on the simplex lattice of spacing ``<= delta / (2 out_size)``."""
    if in_size < 1 or out_size < 1:
        raise ValidationError("alphabet sizes must be positive")
    if not 0.0 < delta <= 2.0:
        raise ValidationError(f"delta={delta} outside (0, 2]")
    n = int(np.ceil(2.0 * out_size / delta - 1e-9))
    per_row = comb(n + out_size - 1, out_size - 1)
    if per_row ** in_size > C.EPSNET_MAX_MEMBERS:
        raise ResourceError(f"net would have {per_row ** in_size} members")
    return ChannelNet(in_size, out_size, float(delta), simplex_lattice(out_size, n))


def net_covering_check(net, samples=1000, seed=0):
    """Largest row distance from ``samples`` random channels to the net (<= delta when covering)."""
    rng = np.random.default_rng(seed)
    ch = rng.dirichlet(np.ones(net.out_size), size=(samples, net.in_size))
    return float(net.covering_radius(ch).max())


def _diff_classical(px, w, q):
    """``I(C;Y) - I(C;Z)`` for channel(s) ``w`` (..., nx, nc) and ``q[x, y, z]``."""
    pxy = px[:, None] * q.sum(2)
    pxz = px[:, None] * q.sum(1)
    pcy = np.einsum("...xc,xy->...cy", w, pxy)
    pcz = np.einsum("...xc,xz->...cz", w, pxz)
    flat = lambda a: a.reshape(a.shape[:-2] + (-1,))
    hy = entropy_rows(pxy.sum(0)[None])[0]
    hz = entropy_rows(pxz.sum(0)[None])[0]
    return hy - hz - entropy_rows(flat(pcy)) + entropy_rows(flat(pcz))


def _random_q(rng, nx, ny, nz):
    return rng.dirichlet(np.ones(ny * nz), size=nx).reshape(nx, ny, nz)


def net_uniform_approx_check(net, e: CqEnsemble, trials=100, seed=0, ny=2, nz=2):
    """``max_trials min_j |D_q(W) - D_q(C_j)|`` with ``D_q(W) = I(C;Y) - I(C;Z)``.

    Trials draw a random channel ``W`` and a random ``q(y,z|x)`` from the seed,
    so two nets checked with the same seed see the same trials.
    """
    if net.in_size != e.dist.size:
        raise ValidationError("net input size must equal the ensemble alphabet")
    members = net.members()
    worst = 0.0
    for rng in spawn_rngs(seed, trials):
        w = rng.dirichlet(np.ones(net.out_size), size=net.in_size)
        q = _random_q(rng, net.in_size, ny, nz)
        target = _diff_classical(e.dist, w, q)
        worst = max(worst, float(np.min(np.abs(_diff_classical(e.dist, members, q) - target))))
    return worst


class Bracket:
    """Evaluates ``T_j(q)`` for an ensemble and a dictionary of channels."""

    def __init__(self, e: CqEnsemble, dictionary):
        if not dictionary:
            raise ValidationError("dictionary is empty")
        self.e = e
        self.dictionary = [validate_channel(w) for w in dictionary]
        for w in self.dictionary:
            if w.shape[0] != e.dist.size:
                raise ValidationError("dictionary channels must take the ensemble alphabet as input")

    def psi(self, posts):
        """``psi_j`` at posterior rows ``posts`` (k, nx) -> (J, k)."""
        mixed = np.tensordot(posts, self.e.states, axes=1)
        s = vn_entropies(mixed)
        h = np.stack([entropy_rows(posts @ w) for w in self.dictionary])
        return s[None] - h

    def side(self, qm):
        """``sum_y p(y) psi_j(p(.|y))`` for a channel ``qm[x, y]``; array of length J."""
        pxy = self.e.dist[:, None] * np.asarray(qm, dtype=float)
        py = pxy.sum(0)
        keep = py > 0
        return self.psi((pxy[:, keep] / py[keep]).T) @ py[keep]

    def terms(self, q):
        """``T_j(q)`` for ``q[x, y, z] = q(y, z | x)``; returns an array of length J."""
        q = np.asarray(q, dtype=float)
        return self.side(q.sum(1)) - self.side(q.sum(2))


def _marginal_search(objective, nx, n_out, restarts, seed, starts=()):
    """Maximise ``objective`` over channels ``x -> {0..n_out-1}`` given as (nx, n_out)."""
    shape = (nx, n_out)
    project = lambda v: project_simplex(v.reshape(shape)).ravel()
    f = lambda v: objective(v.reshape(shape))
    res = multistart(f, lambda rng: rng.dirichlet(np.ones(shape[1]), size=nx).ravel(), restarts,
                     seed, project, maximize=True)
    best_x, best_v = res.x.reshape(shape), res.value
    for x0 in starts:
        r = multistart(f, lambda rng, x0=x0: np.asarray(x0).ravel(), 1, seed, project, maximize=True)
        if r.value > best_v:
            best_x, best_v = r.x.reshape(shape), r.value
    return best_v, best_x


def product_channel(qy, qz):
    """``q(y, z | x) = q(y|x) q(z|x)``."""
    return np.asarray(qy)[:, :, None] * np.asarray(qz)[:, None, :]


def _pool_lp(tmat):
    """``min_lambda max_i lambda . T[i]`` over the simplex; returns (value, lambda)."""
    m, k = tmat.shape
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    a_ub = np.hstack([tmat, -np.ones((m, 1))])
    a_eq = np.append(np.ones(k), 0.0)[None]
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * k + [(None, None)], method="highs")
    if res.status != 0:
        raise NumericalFailure("pool LP failed", message=res.message)
    lam = np.clip(res.x[:k], 0.0, None)
    return float(res.x[-1]), lam / lam.sum()


def _pool_mixture_lp(tmat):
    """``max_w min_j sum_i w_i T[i, j]`` over the simplex; returns (value, w)."""
    m, k = tmat.shape
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-tmat.T, np.ones((k, 1))])
    a_eq = np.append(np.ones(m), 0.0)[None]
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(k), A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    if res.status != 0:
        raise NumericalFailure("pool mixture LP failed", message=res.message)
    w = np.clip(res.x[:m], 0.0, None)
    return float(res.x[-1]), w / w.sum()


def mixture_channel(weights, channels):
    """``q0`` on ``Y0 = (U, Y_U)``, ``Z0 = (U, Z_U)`` with ``P(U = i) = weights[i]``.

    ``T_j(q0) = sum_i weights[i] T_j(channels[i])`` exactly; the midpoint
    channel is the case of two equal weights.
    """
    w = np.asarray(weights, dtype=float)
    chans = [np.asarray(c, dtype=float) for c in channels]
    if len(chans) != w.size or any(c.shape != chans[0].shape for c in chans):
        raise ValidationError("need one channel of a common shape per weight")
    nx, ny, nz = chans[0].shape
    q0 = np.zeros((nx, ny * w.size, nz * w.size))
    for i, (wi, c) in enumerate(zip(w, chans)):
        q0[:, i * ny:(i + 1) * ny, i * nz:(i + 1) * nz] = wi * c
    return q0


@dataclass
class MinimaxReport:
    maxmin: float
    minmax: float
    lam: np.ndarray
    q_maxmin: np.ndarray
    rounds: int


def _epigraph_polish(br, qy, qz):
    """SLSQP on ``max t`` s.t. ``T_j >= t``; returns (min_j T_j, [qy | qz]) at a feasible point."""
    nx, n = qy.shape
    k = nx * n

    def unpack(v):
        return v[:k].reshape(nx, n), v[k:2 * k].reshape(nx, n)

    def terms(v):
        a, b = unpack(v)
        return br.side(b) - br.side(a)

    x0 = np.concatenate([qy.ravel(), qz.ravel()])
    x0 = np.append(x0, terms(x0).min())
    cons = [{"type": "ineq", "fun": lambda v: terms(v) - v[-1]},
            {"type": "eq", "fun": lambda v: np.concatenate([m.sum(1) - 1.0 for m in unpack(v)])}]
    res = minimize(lambda v: -v[-1], x0, method="SLSQP", constraints=cons,
                   bounds=[(0.0, 1.0)] * (2 * k) + [(None, None)], options={"maxiter": 300, "ftol": 1e-14})
    a, b = unpack(res.x)
    a, b = project_simplex(a), project_simplex(b)
    # report the value at the projected, exactly feasible channel
    return float(np.min(br.side(b) - br.side(a))), np.hstack([a, b])


def maxmin_minmax_check(e: CqEnsemble, dictionary, grid_q=2, restarts=20, seed=0,
                        max_rounds=50, tol=1e-7, polish=5):
    """Estimate ``max_q min_j T_j`` and ``min_lambda max_q lambda . T`` with ``|Y| = |Z| = grid_q``.

    ``T_j`` depends on ``q(y,z|x)`` only through its marginals ``q(y|x)`` and
    ``q(z|x)``, so both searches run over that pair. The max-min side is a
    multi-start pattern search. The min-max side is a double-oracle loop: an
    LP over a growing pool of channels proposes ``lambda``, and the best
    response to it splits into independent searches over ``q(z|x)``
    (maximising the ``Z`` average) and ``q(y|x)`` (minimising the ``Y``
    average). The pool always contains the max-min maximiser, so the
    returned ``maxmin`` never exceeds ``minmax``. The max-min value is the
    better of the direct search and the optimal mixture of pool channels,
    lifted to one channel by ``mixture_channel``; in the latter case
    ``q_maxmin`` has alphabets ``|Y| = |Z| = grid_q`` times the support size.
    """
    br = Bracket(e, dictionary)
    nx = e.dist.size
    n = int(grid_q)
    if n < 1:
        raise ValidationError("grid_q must be >= 1")
    j = len(br.dictionary)
    split = lambda v: (v[:, :n], v[:, n:])

    def best_response(lam, seed_r, starts=()):
        vz, qz = _marginal_search(lambda m: float(lam @ br.side(m)), nx, n, restarts, seed_r,
                                  [s[1] for s in starts])
        vy, qy = _marginal_search(lambda m: -float(lam @ br.side(m)), nx, n, restarts, seed_r + 1,
                                  [s[0] for s in starts])
        return vz + vy, (qy, qz)

    if j == 1:
        v, (qy, qz) = best_response(np.ones(1), seed)
        return MinimaxReport(v, v, np.ones(1), product_channel(qy, qz), 0)

    def worst_term(v):
        qy, qz = split(v)
        return float(np.min(br.side(qz) - br.side(qy)))

    def pair_search(objective, seed_p, starts=()):
        shape = (nx, 2 * n)
        project = lambda v: np.hstack(
            [project_simplex(v.reshape(shape)[:, :n]), project_simplex(v.reshape(shape)[:, n:])]
        ).ravel()
        f = lambda v: objective(v.reshape(shape))
        sampler = lambda rng: np.hstack([rng.dirichlet(np.ones(n), size=nx),
                                         rng.dirichlet(np.ones(n), size=nx)]).ravel()
        res = multistart(f, sampler, restarts, seed_p, project, maximize=True)
        best = (res.value, res.x.reshape(shape))
        for qy, qz in starts:
            r = multistart(f, lambda rng, x0=np.hstack([qy, qz]): x0.ravel(), 1, seed_p, project,
                           maximize=True)
            if r.value > best[0]:
                best = (r.value, r.x.reshape(shape))
        return best

    terms = lambda pair: br.side(pair[1]) - br.side(pair[0])
    mm_val, mm_v = pair_search(worst_term, seed)
    pool = [split(mm_v)]
    pool_t = [terms(pool[0])]
    upper = np.inf
    lam_best = np.full(j, 1.0 / j)
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        lower, lam = _pool_lp(np.array(pool_t))
        val, pair = best_response(lam, seed + 2 * rounds, starts=pool)
        if val < upper:
            upper, lam_best = val, lam
        pool.append(pair)
        pool_t.append(terms(pair))
        if val - lower <= tol:
            break
    # min_j T_j has kinks where compass moves stall; polish the best candidates
    # on the smooth epigraph form  max t  s.t.  T_j(q) >= t.
    order = np.argsort([-t.min() for t in pool_t])[:polish]
    for pair in [split(mm_v)] + [pool[i] for i in order]:
        v, x = _epigraph_polish(br, *pair)
        if v > mm_val:
            mm_val, mm_v = v, x
    q_best = product_channel(*split(mm_v))
    # A mixture of pool channels lives on larger alphabets (U, Y_U), (U, Z_U)
    # and can beat every channel with |Y| = |Z| = grid_q.
    _, w = _pool_mixture_lp(np.array(pool_t))
    keep = np.flatnonzero(w > 1e-12)
    lifted = mixture_channel(w[keep] / w[keep].sum(), [product_channel(*pool[i]) for i in keep])
    lifted_val = float(np.min(br.terms(lifted)))
    if lifted_val > mm_val:
        mm_val, q_best = lifted_val, lifted
    return MinimaxReport(float(mm_val), float(max(upper, mm_val)), lam_best, q_best, rounds)


def envelope_minmax(e: CqEnsemble, dictionary, lam, n_grid=2001):
    """Binary-input reference: ``max_q lambda . T`` as concave minus convex envelope of ``psi`` at ``p(x=0)``.

    Exact for ``|X| = 2`` and any ``|Y|, |Z| >= 2`` up to the grid resolution.
    """
    if e.dist.size != 2:
        raise ValidationError("the envelope reference needs a binary input")
    br = Bracket(e, dictionary)
    g = np.linspace(0.0, 1.0, n_grid)
    psi = np.asarray(lam) @ br.psi(np.stack([g, 1.0 - g], axis=1))
    q0 = e.dist[0]
    lo = np.flatnonzero(g <= q0)
    hi = np.flatnonzero(g >= q0)
    a, b = g[lo][:, None], g[hi][None]
    w = np.where(b > a, (b - q0) / np.where(b > a, b - a, 1.0), 1.0)
    chords = psi[lo][:, None] * w + psi[hi][None] * (1.0 - w)
    return float(chords.max() - chords.min())


def midpoint_channel(q1, q2):
    """``q0`` on ``Y0 = (U, Y_U)``, ``Z0 = (U, Z_U)`` with ``U`` a fair coin independent of X."""
    q1, q2 = np.asarray(q1, dtype=float), np.asarray(q2, dtype=float)
    if q1.shape != q2.shape or q1.ndim != 3:
        raise ValidationError("q1 and q2 must share a shape (nx, ny, nz)")
    return mixture_channel([0.5, 0.5], [q1, q2])


def convexity_midpoint_check(q1, q2, e: CqEnsemble, dictionary):
    """``max_j |T_j(q0) - (T_j(q1) + T_j(q2)) / 2|`` for the midpoint channel ``q0``."""
    br = Bracket(e, dictionary)
    q0 = midpoint_channel(q1, q2)
    if q0.shape[0] != e.dist.size:
        raise ValidationError("channel input alphabet must match the ensemble")
    return float(np.max(np.abs(br.terms(q0) - 0.5 * (br.terms(q1) + br.terms(q2)))))
