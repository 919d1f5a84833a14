import numpy as np
import pytest

from qcond import epsnet_minimax as em
from qcond.errors import ResourceError, ValidationError
from qcond.infotheory import CqEnsemble, holevo, mutual_information, validate_channel
from qcond.qmath import random_density


def _instance(seed, dict_size=3):
    rng = np.random.default_rng(seed)
    q = rng.uniform(0.2, 0.8)
    e = CqEnsemble([q, 1 - q], [random_density(2, rng) for _ in range(2)])
    return e, [rng.dirichlet(np.ones(2), size=2) for _ in range(dict_size)]


def _terms_direct(e, dictionary, q):
    """T_j from explicit joints: Holevo quantities for F and plain MI for C_j."""
    pxyz = e.dist[:, None, None] * q

    def holevo_given(pxo):
        po = pxo.sum(0)
        keep = po > 0
        states = [np.tensordot(pxo[:, o] / po[o], e.states, axes=1) for o in np.flatnonzero(keep)]
        return holevo(CqEnsemble(po[keep] / po[keep].sum(), states))

    quantum = holevo_given(pxyz.sum(2)) - holevo_given(pxyz.sum(1))
    out = []
    for w in dictionary:
        jxyzc = pxyz[..., None] * w[:, None, None, :]
        out.append(quantum - (mutual_information(jxyzc.sum(2), (2,), (1,))
                              - mutual_information(jxyzc.sum(1), (2,), (1,))))
    return np.array(out)


def test_net_sizes_and_members():
    net = em.build_epsnet(1, 2, 1.0)
    assert net.size == 5
    coarse = em.build_epsnet(2, 2, 2.0)
    assert len(coarse.lattice) == 3 and coarse.size == 9
    for m in em.build_epsnet(2, 3, 0.5).members():
        validate_channel(m)
    with pytest.raises(ResourceError):
        em.build_epsnet(6, 6, 0.01)
    with pytest.raises(ValidationError):
        em.build_epsnet(2, 2, 0.0)


@pytest.mark.parametrize("delta", [0.1, 0.2, 0.5])
def test_net_covering(delta):
    net = em.build_epsnet(2, 2, delta)
    assert em.net_covering_check(net, samples=1000, seed=1) <= delta


def test_net_uniform_approximation():
    e, _ = _instance(3)
    coarse = em.net_uniform_approx_check(em.build_epsnet(2, 2, 0.5), e, trials=100, seed=4)
    fine = em.net_uniform_approx_check(em.build_epsnet(2, 2, 0.25), e, trials=100, seed=4)
    assert fine <= coarse + 1e-6
    mid = em.net_uniform_approx_check(em.build_epsnet(2, 2, 0.2), e, trials=100, seed=0)
    assert 0.0 < mid < 0.05
    with pytest.raises(ValidationError):
        em.net_uniform_approx_check(em.build_epsnet(3, 2, 0.5), e, trials=1)


def test_bracket_matches_direct_entropies(rng):
    e, dic = _instance(7)
    br = em.Bracket(e, dic)
    for _ in range(10):
        q = rng.dirichlet(np.ones(6), size=2).reshape(2, 2, 3)
        assert np.allclose(br.terms(q), _terms_direct(e, dic, q), atol=1e-12)


def test_midpoint_identity(rng):
    e, dic = _instance(11)
    worst = 0.0
    for _ in range(100):
        q1 = rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2)
        q2 = rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2)
        worst = max(worst, em.convexity_midpoint_check(q1, q2, e, dic))
    assert worst <= 1e-9
    br = em.Bracket(e, dic)
    assert np.allclose(br.terms(em.midpoint_channel(q1, q1)), br.terms(q1), atol=1e-12)
    flat = CqEnsemble([0.4, 0.6], np.ones((2, 1, 1)))
    assert em.convexity_midpoint_check(q1, q2, flat, dic) <= 1e-9
    with pytest.raises(ValidationError):
        em.midpoint_channel(q1, q2[:, :1])


def test_singleton_dictionary_has_no_gap():
    e, dic = _instance(5, dict_size=1)
    rep = em.maxmin_minmax_check(e, dic, restarts=4, seed=1)
    assert rep.maxmin == rep.minmax


def test_self_matching_dictionary_vanishes(rng):
    w = rng.dirichlet(np.ones(2), size=2)
    e = CqEnsemble([0.3, 0.7], [np.diag(row) for row in w])
    rep = em.maxmin_minmax_check(e, [w], restarts=3, seed=0)
    assert abs(rep.maxmin) < 1e-9 and abs(rep.minmax) < 1e-9


def test_pool_lp_small():
    val, lam = em._pool_lp(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert abs(val - 0.5) < 1e-9 and np.allclose(lam, 0.5)


def _lambda_grid_minmax(e, dic, step=0.05, n_grid=401):
    """min over a lambda grid on the 2-simplex of the binary envelope value."""
    br = em.Bracket(e, dic)
    g = np.linspace(0, 1, n_grid)
    psi = br.psi(np.stack([g, 1 - g], axis=1))
    q0 = e.dist[0]
    lo, hi = np.flatnonzero(g <= q0), np.flatnonzero(g >= q0)
    a, b = g[lo][:, None], g[hi][None]
    w = np.where(b > a, (b - q0) / np.where(b > a, b - a, 1.0), 1.0)
    best = np.inf
    ticks = np.arange(0, 1 + step / 2, step)
    for l1 in ticks:
        for l2 in ticks[ticks <= 1 - l1 + 1e-12]:
            lam = np.array([l1, l2, max(0.0, 1 - l1 - l2)])
            f = lam @ psi
            chords = f[lo][:, None] * w + f[hi][None] * (1 - w)
            best = min(best, chords.max() - chords.min())
    return best


@pytest.mark.slow
@pytest.mark.parametrize("seed", [101, 102])
def test_minimax_against_grid_oracle(seed):
    e, dic = _instance(seed)
    rep = em.maxmin_minmax_check(e, dic, restarts=20, seed=seed)
    assert rep.maxmin <= rep.minmax + 2e-3
    assert abs(rep.maxmin - rep.minmax) <= 5e-3
    env = em.envelope_minmax(e, dic, rep.lam)
    assert rep.maxmin <= env + 1e-6
    grid = _lambda_grid_minmax(e, dic)
    assert abs(grid - rep.maxmin) <= 5e-3


def test_mixture_channel_is_linear_in_T(rng):
    e, dic = _instance(13)
    br = em.Bracket(e, dic)
    qs = [rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    lifted = em.mixture_channel(w, qs)
    assert lifted.shape == (2, 6, 6)
    assert np.allclose(lifted.sum(axis=(1, 2)), 1.0)
    assert np.allclose(br.terms(lifted), sum(wi * br.terms(q) for wi, q in zip(w, qs)), atol=1e-12)
    with pytest.raises(ValidationError):
        em.mixture_channel([1.0], qs)


def test_reported_maxmin_is_attained():
    e, dic = _instance(104)
    rep = em.maxmin_minmax_check(e, dic, restarts=8, seed=3)
    assert abs(np.min(_terms_direct(e, dic, rep.q_maxmin)) - rep.maxmin) < 1e-10
