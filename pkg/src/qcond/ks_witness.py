"""A 24-vector Kochen-Specker system in dimension 4 as an entropic separation witness.

Vertices are labelled ``(theta, i)`` with ``theta`` one of six row names and
``i`` in 1..4. The integer vectors below are kept exactly; orthogonality is
decided on them, and only entropies use the normalised forms.
"""
import csv
import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import ConstructionError, ValidationError
from .infotheory import CqEnsemble, entropy_of
from .qmath import projector
from .region_opt import gw_quantum_point
from .search import parallel_map, spawn_rngs

THETAS = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")

INT_VECTORS = np.array([
    [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1],
    [0, 1, 1, 0], [1, 0, 0, -1], [1, 0, 0, 1], [0, 1, -1, 0],
    [1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1],
    [1, -1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1],
    [-1, 1, 1, 1], [1, 1, 1, -1], [1, -1, 1, 1], [1, 1, -1, 1],
    [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1],
], dtype=np.int64)

# The 18 bases that mix rows, as (row letter index, position) pairs.
_A, _B, _G, _D, _E, _Z = range(6)
SUBSETS = (
    ((_A, 1), (_A, 4), (_B, 1), (_B, 4)), ((_G, 1), (_G, 4), (_D, 1), (_D, 4)),
    ((_E, 1), (_E, 4), (_Z, 1), (_Z, 4)), ((_A, 2), (_A, 3), (_B, 2), (_B, 3)),
    ((_G, 2), (_G, 3), (_D, 2), (_D, 3)), ((_E, 2), (_E, 3), (_Z, 2), (_Z, 3)),
    ((_A, 1), (_A, 3), (_Z, 2), (_Z, 4)), ((_B, 2), (_B, 4), (_G, 1), (_G, 3)),
    ((_D, 2), (_D, 4), (_E, 1), (_E, 3)), ((_A, 2), (_A, 4), (_Z, 1), (_Z, 3)),
    ((_B, 1), (_B, 3), (_G, 2), (_G, 4)), ((_D, 1), (_D, 3), (_E, 2), (_E, 4)),
    ((_A, 1), (_A, 2), (_D, 3), (_D, 4)), ((_B, 1), (_B, 2), (_E, 3), (_E, 4)),
    ((_G, 1), (_G, 2), (_Z, 3), (_Z, 4)), ((_A, 3), (_A, 4), (_D, 1), (_D, 2)),
    ((_B, 3), (_B, 4), (_E, 1), (_E, 2)), ((_G, 3), (_G, 4), (_Z, 1), (_Z, 2)),
)


def vertex(theta, i):
    """Vertex index of ``theta_i`` (``theta`` an index 0..5, ``i`` in 1..4)."""
    return 4 * theta + (i - 1)


@dataclass(frozen=True)
class KsSystem:
    labels: tuple
    int_vectors: np.ndarray
    norms: np.ndarray
    vectors: np.ndarray
    subsets: tuple
    rows: tuple
    adjacency: np.ndarray

    @property
    def cliques(self):
        return self.subsets + self.rows

    def states(self):
        return np.stack([projector(v) for v in self.vectors])

    def perturbed(self, index, amount, rng=None):
        """Copy whose normalised vector ``index`` is nudged by ``amount`` (no revalidation)."""
        rng = rng or np.random.default_rng(0)
        vecs = self.vectors.copy()
        v = vecs[index] + amount * rng.normal(size=4)
        vecs[index] = v / np.linalg.norm(v)
        return dataclasses.replace(self, vectors=vecs)


def build_ks(int_vectors=None):
    """Assemble and self-check the system; ``int_vectors`` overrides the table (test hook)."""
    iv = np.array(INT_VECTORS if int_vectors is None else int_vectors, dtype=np.int64)
    if iv.shape != (24, 4):
        raise ConstructionError(f"expected 24 integer 4-vectors, got shape {iv.shape}")
    sq = np.einsum("ij,ij->i", iv, iv)
    if np.any(sq == 0):
        raise ConstructionError("zero vector in the table")
    norms = np.sqrt(sq.astype(float))
    vectors = iv / norms[:, None]
    labels = tuple((t, i) for t in THETAS for i in range(1, 5))
    subsets = tuple(tuple(vertex(t, i) for t, i in s) for s in SUBSETS)
    rows = tuple(tuple(vertex(t, i) for i in range(1, 5)) for t in range(6))
    gram = iv @ iv.T
    adjacency = (gram == 0)
    np.fill_diagonal(adjacency, False)
    for clique in subsets + rows:
        block = gram[np.ix_(clique, clique)]
        if np.any(block[~np.eye(4, dtype=bool)] != 0):
            raise ConstructionError(f"clique {[labels[k] for k in clique]} is not orthogonal")
    if np.max(np.abs(np.linalg.norm(vectors, axis=1) - 1.0)) > 1e-12:
        raise ConstructionError("normalisation failed")
    clique_edges = np.zeros_like(adjacency)
    for clique in subsets + rows:
        for a in clique:
            for b in clique:
                if a != b:
                    clique_edges[a, b] = True
    if not np.array_equal(clique_edges, adjacency):
        raise ConstructionError("edge set differs from the union of the 24 cliques")
    counts = np.zeros(24, dtype=int)
    for s in subsets:
        counts[list(s)] += 1
    if np.any(counts != 3):
        raise ConstructionError("every vertex must lie in exactly three of the 18 subsets")
    return KsSystem(labels, iv, norms, vectors, subsets, rows, adjacency)


def export_csv(system, fh):
    """Write ``theta,i,v1,v2,v3,v4,normalization`` rows; ``psi = v / normalization``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["theta", "i", "v1", "v2", "v3", "v4", "normalization"])
    for (t, i), v, n in zip(system.labels, system.int_vectors, system.norms):
        w.writerow([t, i, *map(int, v), "%.17g" % n])


def _masks(adjacency):
    adj = np.asarray(adjacency, dtype=bool)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValidationError("adjacency must be a square matrix")
    if adj.shape[0] > 64:
        raise ValidationError("independence_number supports at most 64 vertices")
    adj = adj | adj.T
    np.fill_diagonal(adj, False)
    return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in adj]


def _clique_cover_bound(cand, nbr, order):
    bound = 0
    rest = cand
    while rest:
        bound += 1
        common = rest
        for v in order:
            bit = 1 << v
            if common & bit:
                common &= nbr[v]
                rest &= ~bit
        # ``common`` shrinks to the neighbours shared by all picked vertices
    return bound


def independence_number(adjacency):
    """Exact maximum independent-set size by branch and bound.

    Vertices are branched in order of descending degree; a greedy clique
    cover of the remaining candidates bounds what they can still add.
    """
    nbr = _masks(adjacency)
    n = len(nbr)
    order = sorted(range(n), key=lambda v: -bin(nbr[v]).count("1"))
    best = 0

    def grow(cand, size):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + _clique_cover_bound(cand, nbr, order) <= best:
            return
        v = next(u for u in order if cand >> u & 1)
        grow(cand & ~(1 << v) & ~nbr[v], size + 1)
        grow(cand & ~(1 << v), size)

    grow((1 << n) - 1, 0)
    return best


def ks_distribution(system=None):
    """Joint law ``p(x, m, y)`` of shape (24, 6, 18): uniform X, M its row, Y a containing subset."""
    system = system or build_ks()
    j = np.zeros((24, 6, 18))
    for k, s in enumerate(system.subsets):
        for x in s:
            j[x, x // 4, k] = 1.0 / 72.0
    return j


def ks_ensemble(system=None):
    system = system or build_ks()
    return CqEnsemble(np.full(24, 1.0 / 24.0), system.states())


def ks_region_point(system=None):
    """``(I(XMY;F), H(X|F), H(M|F), H(Y|F))`` with ``F`` keyed on X."""
    system = system or build_ks()
    return gw_quantum_point(ks_distribution(system), system.states())


def ks_entropy_point(system=None):
    """``(H(X|F), H(M|F), H(Y|F))`` in bits."""
    return ks_region_point(system)[1:]


TARGET = np.array([np.log2(6.0), np.log2(6.0), np.log2(18.0)])


def clique_average_check(system):
    """Largest ``|(1/4) sum_{clique} rho - I/4|`` entry over the 24 bases."""
    states = np.stack([projector(v) for v in system.vectors])
    eye = np.eye(4) / 4.0
    return float(max(np.max(np.abs(states[list(c)].mean(axis=0) - eye)) for c in system.cliques))


def _gap_symbols(system):
    # joint symbols s = (x, y) with p(s) = 1/72; M is a function of X
    xs, ys = [], []
    for k, s in enumerate(system.subsets):
        for x in s:
            xs.append(x)
            ys.append(k)
    xs, ys = np.array(xs), np.array(ys)
    return xs, xs // 4, ys


def _onehot(idx, n):
    m = np.zeros((idx.size, n))
    m[np.arange(idx.size), idx] = 1.0
    return m


class _GapObjective:
    """Squared distance of ``(H(X|C), H(M|C), H(Y|C))`` from the target, with gradient."""

    def __init__(self, system, card):
        xs, ms, ys = _gap_symbols(system)
        self.n = xs.size
        self.card = card
        self.p = np.full(self.n, 1.0 / self.n)
        self.maps = [_onehot(xs, 24), _onehot(ms, 6), _onehot(ys, 18)]

    def channel(self, theta):
        t = theta.reshape(self.n, self.card)
        e = np.exp(t - t.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)

    def triple(self, w):
        psc = self.p[:, None] * w
        hc = entropy_of(psc.sum(0))
        return np.array([entropy_of(m.T @ psc) - hc for m in self.maps])

    def __call__(self, theta):
        w = self.channel(theta)
        psc = self.p[:, None] * w
        pc = psc.sum(0)
        logc = np.log2(np.maximum(pc, 1e-300))
        hc = -pc @ logc
        val = 0.0
        grad_w = np.zeros_like(w)
        for m, target in zip(self.maps, TARGET):
            pvc = m.T @ psc
            logv = np.log2(np.maximum(pvc, 1e-300))
            hv = -np.sum(pvc * logv) - hc
            err = hv - target
            val += err * err
            # dH(V|C)/dw(c|s) = -p(s) log2 p(v(s)|c)
            grad_w += 2.0 * err * (-(self.p[:, None]) * (m @ logv - logc[None]))
        grad = w * (grad_w - np.sum(w * grad_w, axis=1, keepdims=True))
        return val, grad.ravel()


def classical_gap_search(card=6, restarts=50, seed=0, system=None, maxiter=500):
    """Smallest distance to ``(log2 6, log2 6, log2 18)`` found over channels ``p(c|x,m,y)``.

    Each restart runs L-BFGS-B on softmax logits with the analytic gradient.
    Returns ``(best_distance, best_channel)`` with the channel indexed by the
    72 joint symbols ``(x, y)`` of positive probability.
    """
    if card < 1:
        raise ValidationError("card must be >= 1")
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    system = system or build_ks()
    obj = _GapObjective(system, card)
    if card == 1:
        w = np.ones((obj.n, 1))
        return float(np.linalg.norm(obj.triple(w) - TARGET)), w

    def run(rng):
        theta0 = rng.normal(scale=2.0, size=obj.n * card)
        res = minimize(obj, theta0, jac=True, method="L-BFGS-B", options={"maxiter": maxiter})
        w = obj.channel(res.x)
        return float(np.linalg.norm(obj.triple(w) - TARGET)), w

    runs = parallel_map(run, spawn_rngs(seed, restarts))
    k = int(np.argmin([r[0] for r in runs]))
    return runs[k]


def gap_triple(channel, system=None):
    """``(H(X|C), H(M|C), H(Y|C))`` for a channel on the 72 joint symbols."""
    system = system or build_ks()
    obj = _GapObjective(system, np.asarray(channel).shape[1])
    return obj.triple(np.asarray(channel, dtype=float))
