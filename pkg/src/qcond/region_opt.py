"""Auxiliary-register optimisation and Gray-Wyner region sampling.

The auxiliary ``C`` (classical) or ``F`` (quantum) is always attached to
``X`` alone, so the chain ``C - X - YZ`` holds by construction.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ValidationError
from .infotheory import entropy_of, validate_prob, vn_entropies
from .qmath import random_density
from .search import multistart, project_simplex, spawn_rngs

#: Enumerate every deterministic channel only up to this many.
DETERMINISTIC_CAP = 1 << 14


@dataclass(frozen=True)
class TripleDist:
    """Joint law ``q(x, y, z)`` as an array of shape ``(|X|, |Y|, |Z|)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 3:
            raise ValidationError(f"expected a 3-way joint distribution, got shape {p.shape}")
        p = validate_prob(p, "q(x,y,z)")
        if np.any(p.sum(axis=(1, 2)) <= 0):
            raise ValidationError("every x must have positive probability")
        object.__setattr__(self, "p", p)

    @property
    def sizes(self):
        return self.p.shape

    @classmethod
    def from_flat(cls, sizes, flat):
        sizes = tuple(int(n) for n in sizes)
        flat = np.asarray(flat, dtype=float)
        if len(sizes) != 3 or flat.size != int(np.prod(sizes)):
            raise ValidationError("sizes must be [nx, ny, nz] matching the number of probabilities")
        return cls(flat.reshape(sizes))

    @classmethod
    def random(cls, sizes, rng):
        return cls(rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes))


@dataclass
class OptResult:
    value: float
    argmax: object
    restarts_used: int
    converged: bool


def _classical_objective(q):
    qxy = q.p.sum(axis=2)
    qxz = q.p.sum(axis=1)
    hy = entropy_of(qxy.sum(0))
    hz = entropy_of(qxz.sum(0))

    def diff(w):
        # I(C;Y) - I(C;Z) = H(Y) - H(Z) - H(CY) + H(CZ); H(C) cancels.
        return hy - hz - entropy_of(w.T @ qxy) + entropy_of(w.T @ qxz)

    return diff


def classical_diff(q: TripleDist, w):
    """``I(C;Y) - I(C;Z)`` for the channel ``w[x, c]``."""
    return _classical_objective(q)(np.asarray(w, dtype=float))


def deterministic_channels(n_in, card):
    """All maps ``x -> c`` as 0/1 matrices (``card ** n_in`` of them)."""
    eye = np.eye(card)
    for assign in product(range(card), repeat=n_in):
        yield eye[list(assign)]


def opt_classical_diff(q: TripleDist, restarts=20, seed=0, card=None):
    """Best ``I(C;Y) - I(C;Z)`` found over channels ``p(c|x)`` with ``|C| = |X|``.

    One extra local search starts from the best deterministic channel when
    those are few enough to enumerate.
    """
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    nx = q.sizes[0]
    card = nx if card is None else card
    diff = _classical_objective(q)
    shape = (nx, card)
    project = lambda v: project_simplex(v.reshape(shape)).ravel()
    f = lambda v: diff(v.reshape(shape))
    res = multistart(f, lambda rng: rng.dirichlet(np.ones(card), size=nx).ravel(),
                     restarts, seed, project, maximize=True)
    best_x, best_v, conv = res.x, res.value, res.converged
    if card ** nx <= DETERMINISTIC_CAP:
        det = max(deterministic_channels(nx, card), key=diff)
        polished = multistart(f, lambda rng: det.ravel(), 1, seed, project, maximize=True)
        if polished.value > best_v:
            best_x, best_v, conv = polished.x, polished.value, polished.converged
    return OptResult(max(best_v, 0.0), best_x.reshape(shape), restarts, conv)


def states_from_params(v, n, dim):
    """Map ``n * dim**2`` reals to states ``L L^dag / tr`` with ``L`` lower triangular."""
    v = np.asarray(v, dtype=float).reshape(n, dim * dim)
    lower = np.tril_indices(dim, -1)
    nl = len(lower[0])
    L = np.zeros((n, dim, dim), dtype=np.complex128)
    idx = np.arange(dim)
    L[:, idx, idx] = v[:, :dim]
    L[:, lower[0], lower[1]] = v[:, dim:dim + nl] + 1j * v[:, dim + nl:]
    rho = L @ np.conj(np.swapaxes(L, 1, 2))
    tr = np.trace(rho, axis1=1, axis2=2).real
    tr = np.where(tr > 0, tr, 1.0)
    return rho / tr[:, None, None]


def _normalise_blocks(v, n):
    # sigma_x does not depend on the scale of L_x; pin each block to the unit sphere
    b = v.reshape(n, -1)
    norms = np.linalg.norm(b, axis=1, keepdims=True)
    return (b / np.where(norms > 0, norms, 1.0)).ravel()


def _quantum_objective(q, dim):
    nx = q.sizes[0]
    qxy = q.p.sum(axis=2)
    qxz = q.p.sum(axis=1)
    py, pz = qxy.sum(0), qxz.sum(0)
    # conditional weights p(x|y) and p(x|z); zero-probability outcomes drop out
    cy = np.divide(qxy, py, out=np.zeros_like(qxy), where=py > 0).T
    cz = np.divide(qxz, pz, out=np.zeros_like(qxz), where=pz > 0).T
    cond = np.vstack([cy, cz])
    sign = np.concatenate([-py, pz])

    def diff_states(states):
        mixed = np.tensordot(cond, states, axes=1)
        return float(sign @ vn_entropies(mixed))

    def diff(v):
        # I(F;Y) - I(F;Z) = sum_z p(z) S(sigma_z) - sum_y p(y) S(sigma_y)
        return diff_states(states_from_params(v, nx, dim))

    return diff, diff_states


def quantum_diff(q: TripleDist, states):
    """``I(F;Y) - I(F;Z)`` for explicit states ``sigma_x`` stacked as (n, d, d)."""
    states = np.asarray(states, dtype=np.complex128)
    return _quantum_objective(q, states.shape[1])[1](states)


def opt_quantum_diff(q: TripleDist, dim, restarts=20, seed=0):
    """Best ``I(F;Y) - I(F;Z)`` found over ensembles of ``dim``-dimensional states."""
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    nx = q.sizes[0]
    if dim == 1:
        return OptResult(0.0, np.ones((nx, 1, 1), dtype=np.complex128), restarts, True)
    f, _ = _quantum_objective(q, dim)
    res = multistart(f, lambda rng: rng.normal(size=nx * dim * dim), restarts, seed,
                     project=lambda v: _normalise_blocks(v, nx), maximize=True)
    return OptResult(max(res.value, 0.0), states_from_params(res.x, nx, dim), restarts, res.converged)


def _flat_joint(j):
    j = validate_prob(np.asarray(j, dtype=float), "joint distribution")
    if j.ndim < 1:
        raise ValidationError("joint distribution needs at least one variable")
    return j


def _axis_maps(shape):
    """For each variable i, the index of x_i for every flattened joint symbol."""
    grids = np.indices(shape).reshape(len(shape), -1)
    return list(grids)


def _gw_points_classical(j, channels):
    shape = j.shape
    flat = j.ravel()
    maps = _axis_maps(shape)
    hx = entropy_of(flat)
    h_marg = [entropy_of(j.sum(axis=tuple(a for a in range(j.ndim) if a != i))) for i in range(j.ndim)]
    pts = []
    for w in channels:
        pxc = flat[:, None] * w
        pc = pxc.sum(0)
        hc = entropy_of(pc)
        coords = [hc + hx - entropy_of(pxc)]
        for i, m in enumerate(maps):
            pic = np.zeros((shape[i], w.shape[1]))
            np.add.at(pic, m, pxc)
            coords.append(entropy_of(pic) - hc)
        pts.append(coords)
    out = np.array(pts)
    return np.maximum(out, 0.0), hx, h_marg


def gw_classical_region(j, card, samples=200, seed=0):
    """Points ``(I(X;C), H(X_1|C), ..., H(X_m|C))`` of random and deterministic channels.

    Returned as an array of shape ``(n_points, m + 1)``. When the number of
    deterministic channels exceeds ``DETERMINISTIC_CAP`` a seeded sample of
    them is used, always including the constant channel and, when
    ``card >= |X|``, the identity.
    """
    if card < 1:
        raise ValidationError("card must be >= 1")
    j = _flat_joint(j)
    n = j.size
    rng = np.random.default_rng(seed)
    chans = [rng.dirichlet(np.ones(card), size=n) for _ in range(samples)]
    eye = np.eye(card)
    if card ** n <= DETERMINISTIC_CAP:
        chans.extend(deterministic_channels(n, card))
    else:
        chans.append(eye[np.zeros(n, dtype=int)])
        if card >= n:
            chans.append(eye[np.arange(n)])
        chans.extend(eye[rng.integers(card, size=n)] for _ in range(DETERMINISTIC_CAP))
    return _gw_points_classical(j, chans)[0]


def gw_quantum_point(j, states):
    """``(I(X;F), H(X_1|F), ..., H(X_m|F))`` for states keyed on the joint symbol.

    ``states`` has one state per flattened joint symbol, shape ``(j.size, d, d)``,
    or one per value of the first variable, shape ``(j.shape[0], d, d)``.
    """
    j = _flat_joint(j)
    states = np.asarray(states, dtype=np.complex128)
    flat = j.ravel()
    maps = _axis_maps(j.shape)
    if states.shape[0] == j.shape[0] and j.size != j.shape[0]:
        states = states[maps[0]]
    if states.shape[0] != j.size:
        raise ValidationError("need one state per joint symbol or per value of X_1")
    keep = flat > 0
    avg = np.tensordot(flat[keep], states[keep], axes=1)
    ents = vn_entropies(np.concatenate([avg[None], states[keep]]))
    holevo_all = ents[0] - flat[keep] @ ents[1:]
    coords = [holevo_all]
    for i, m in enumerate(maps):
        pi = np.bincount(m, weights=flat, minlength=j.shape[i])
        mixed = np.zeros((j.shape[i],) + states.shape[1:], dtype=np.complex128)
        np.add.at(mixed, m[keep], flat[keep, None, None] * states[keep])
        pos = pi > 0
        mixed = mixed[pos] / pi[pos, None, None]
        s_i = vn_entropies(mixed)
        coords.append(entropy_of(pi) - (ents[0] - pi[pos] @ s_i))
    return np.maximum(np.array(coords), 0.0)


def gw_quantum_sample(j, dim, samples=200, seed=0, diagonal=False):
    """Region points from random ensembles of ``dim``-dimensional states.

    With ``diagonal=True`` the states are diagonal (classical) in a fixed basis.
    """
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    j = _flat_joint(j)
    if dim == 1:
        return gw_quantum_point(j, np.ones((j.size, 1, 1)))[None]
    pts = []
    for rng in spawn_rngs(seed, samples):
        if diagonal:
            diag = rng.dirichlet(np.ones(dim), size=j.size)
            states = np.zeros((j.size, dim, dim), dtype=np.complex128)
            states[:, np.arange(dim), np.arange(dim)] = diag
        else:
            rank = int(rng.integers(1, dim + 1))
            states = np.stack([random_density(dim, rng, rank) for _ in range(j.size)])
        pts.append(gw_quantum_point(j, states))
    return np.array(pts)


def hull_distance(point, cloud, iters=10000, tol=1e-15):
    """Euclidean distance from ``point`` to the convex hull of ``cloud``.

    Pairwise Frank-Wolfe over the hull weights with exact line search,
    started at the nearest cloud point.
    """
    x = np.asarray(point, dtype=float).ravel()
    v = np.asarray(cloud, dtype=float)
    if v.ndim != 2 or v.shape[0] == 0:
        raise ValidationError("cloud must be a nonempty (n, dim) array")
    if v.shape[1] != x.size:
        raise ValidationError(f"dimension mismatch: point {x.size}, cloud {v.shape[1]}")
    gram_x = v @ x
    sq = np.einsum("ij,ij->i", v, v)
    start = int(np.argmin(sq - 2.0 * gram_x))
    w = np.zeros(v.shape[0])
    w[start] = 1.0
    y = v[start].copy()
    for _ in range(iters):
        resid = y - x
        g = v @ resid
        s = int(np.argmin(g))
        support = np.flatnonzero(w > 0)
        a = support[int(np.argmax(g[support]))]
        if g[a] - g[s] <= tol:
            break
        d = v[s] - v[a]
        dd = d @ d
        if dd == 0.0:
            break
        gamma = min(max(-(resid @ d) / dd, 0.0), w[a])
        if gamma == 0.0:
            break
        w[s] += gamma
        w[a] -= gamma
        y = y + gamma * d
    return float(np.linalg.norm(y - x))


def region_dominance_defect(points, h_marg):
    """Smallest ``coords[0] + coords[i] - H(X_i)`` over points and i (should be >= 0)."""
    pts = np.asarray(points, dtype=float)
    return float(np.min(pts[:, :1] + pts[:, 1:] - np.asarray(h_marg)[None]))


def marginal_entropies(j):
    j = _flat_joint(j)
    return [entropy_of(j.sum(axis=tuple(a for a in range(j.ndim) if a != i))) for i in range(j.ndim)]
