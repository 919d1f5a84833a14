import numpy as np
import pytest

from qcond import chsh_bounds as cb
from qcond.errors import DomainError
from qcond.infotheory import binary_entropy


def test_instance_examples():
    assert np.allclose(cb.chsh_dist(0.0).behaviour, 0.25)
    pr = cb.chsh_dist(1.0).behaviour
    for x in range(2):
        for y in range(2):
            win = [(a, a ^ (x * y)) for a in range(2)]
            assert all(pr[a, b, x, y] == 0.5 for a, b in win)
    for eps in (0.0, 0.3, 1.0):
        inst = cb.chsh_dist(eps)
        b = inst.behaviour
        assert np.allclose(b.sum(axis=(0, 1)), 1.0)
        assert np.allclose(b.sum(axis=1), 0.5)
        assert np.allclose(inst.joint.sum(axis=(0, 1)), 0.25)
        assert inst.win_probability == pytest.approx((1 + eps) / 2)
    with pytest.raises(DomainError):
        cb.chsh_dist(1.5)


def _x_known_protocol():
    # U carries X: Alice outputs a shared bit r, Bob outputs r xor (x y)
    w = np.zeros((2, 16))
    for s, (alpha, beta) in enumerate(cb.STRATEGIES):
        for x in range(2):
            for r in range(2):
                if alpha == (r, r) and beta == (r, r ^ x):
                    w[x, s] += 0.5
    return w


def test_endpoint_one_sandwich():
    w = _x_known_protocol()
    assert cb.mismatch_l1(w, 1.0) == 0.0
    assert cb._rate_bits(w) == pytest.approx(1.0)
    cost = cb.classical_cost(1.0)
    assert cost <= 1.0 + 1e-9
    assert cost >= cb.ic_lower_bound(1.0) - 1e-3
    assert abs(cost - 1.0) <= 1e-3


def test_zero_cost_inside_local_polytope():
    assert cb.classical_cost(0.0) <= 1e-4
    assert cb.local_membership_lp(cb.chsh_dist(0.5).behaviour)
    assert cb.classical_cost(0.5) <= 1e-3
    assert cb.local_polytope_distance(cb.chsh_dist(0.5).behaviour) <= 1e-6
    assert not cb.local_membership_lp(cb.chsh_dist(0.6).behaviour)
    assert cb.local_polytope_distance(cb.chsh_dist(0.6).behaviour) > 1e-3


def test_protocol_is_feasible():
    p = cb.classical_protocol(0.8)
    assert p.mismatch <= 1e-6
    assert np.all(p.weights >= 0) and np.allclose(p.weights.sum(1), 1)
    assert 0 < p.rate <= 1


def test_ic_bound_examples():
    assert cb.ic_lower_bound(1.0, 7) == 1.0
    assert cb.ic_lower_bound(0.0) == 0.0
    direct = max((2 ** n * (1 - binary_entropy((1 + 0.8 ** n) / 2)) - 1) / (2 ** n - 1)
                 for n in range(1, 21))
    assert direct > 0
    assert cb.ic_lower_bound(0.8, 20) == pytest.approx(direct, abs=1e-15)
    vals = [cb.ic_lower_bound(0.9, n) for n in range(1, 30)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_sweep_rows():
    assert cb.curve_sweep([]) == []
    rows = cb.curve_sweep([1.0, 0.5])
    assert [r.eps for r in rows] == [0.5, 1.0]
    assert rows[0].classical_cost <= 1e-3 and rows[0].ic_lower_bound <= rows[0].classical_cost
    assert rows[1].ic_lower_bound == 1.0 and abs(rows[1].classical_cost - 1.0) <= 1e-3
    assert rows[1].p == 1.0
    assert rows[1].one_minus_h_eps == 1.0


def test_sweep_monotone_and_dominated():
    rows = cb.curve_sweep(np.linspace(0, 1, 21))
    costs = [r.classical_cost for r in rows]
    assert all(b >= a - 2e-3 for a, b in zip(costs, costs[1:]))
    assert all(r.ic_lower_bound <= r.classical_cost + 2e-3 for r in rows)


def test_separation_witness():
    eps = 1 / np.sqrt(2)
    assert cb.classical_cost(eps) >= 0.01
    assert 0.0 <= cb.ic_lower_bound(eps, 20) <= cb.classical_cost(eps)
