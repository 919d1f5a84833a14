import numpy as np
import pytest

from qcond.curve_match import (MatchParams, ab_residuals, binary_channel, build_matching_channel,
                               channel_mi_curve, curve_fit_mixture, matching_dictionary,
                               mi_curve_quantum, second_derivative_check, solve_ab)
from qcond.errors import DomainError, ValidationError
from qcond.infotheory import CqEnsemble, binary_entropy, holevo
from qcond.qmath import bloch_to_density, random_bloch

GRID = np.linspace(0, 1, 101)


def _pair(rng):
    return random_bloch(rng), random_bloch(rng)


def test_quantum_curve_matches_holevo(rng):
    for _ in range(10):
        r, s = _pair(rng)
        cur = mi_curve_quantum(r, s, GRID)
        rho0, rho1 = bloch_to_density(s), bloch_to_density(r)
        for p, v in zip(GRID[::10], cur.values[::10]):
            assert abs(v - holevo(CqEnsemble([p, 1 - p], [rho0, rho1]))) < 1e-12
        assert abs(cur.values[0]) < 1e-9 and abs(cur.values[-1]) < 1e-9
        assert cur.max_concavity_violation() <= 1e-8


def test_quantum_curve_examples():
    r = np.array([0.1, -0.2, 0.3])
    assert np.all(mi_curve_quantum(r, r, GRID).values == 0)
    v = mi_curve_quantum([0, 0, -1], [0, 0, 1], [0.5]).values[0]
    assert abs(v - 1.0) < 1e-12
    v = mi_curve_quantum([0, 0, 0], [0, 0, 1], [0.5]).values[0]
    assert abs(v - (binary_entropy(0.75) - 0.5)) < 1e-12


def test_solve_ab_examples(rng):
    assert solve_ab(0.0, [0, 0, 0], [0, 0, 1]) == (0.5, 0.5)
    a, b = solve_ab(1.0, [0, 0, 0], [0, 0, 1])
    assert abs(a - 1.0) < 1e-12 and abs(b - 0.5) < 1e-12
    for _ in range(20):
        r, s = _pair(rng)
        mp = MatchParams.from_bloch(r, s)
        # closed forms for theta = 1
        surd = np.sqrt(mp.d * (1 - r @ r) + mp.c ** 2)
        a1 = 0.5 + (mp.c + mp.d) / (2 * surd)
        b1 = 0.5 + mp.c / (2 * surd)
        assert abs(mp.a1 - a1) < 1e-12 and abs(mp.b1 - b1) < 1e-12
        for theta in rng.uniform(0, 1, size=5):
            a, b = solve_ab(theta, r, s)
            assert 0 <= a <= 1 and 0 <= b <= 1
            lin, quad = ab_residuals(theta, a, b, r, s)
            assert abs(lin) <= 1e-10 and abs(quad) <= 1e-10


def test_solve_ab_errors_and_continuity(rng):
    r, s = _pair(rng)
    with pytest.raises(DomainError):
        solve_ab(1.5, r, s)
    with pytest.raises(DomainError):
        solve_ab(0.5, r, r)
    for theta in np.linspace(0, 1 - 1e-4, 50):
        a0, b0 = solve_ab(theta, r, s)
        a1, b1 = solve_ab(theta + 1e-4, r, s)
        assert max(abs(a1 - a0), abs(b1 - b0)) <= 1e-2


def _match_error(r, s, n_quad):
    w = build_matching_channel(r, s, n_quad)
    return np.max(np.abs(mi_curve_quantum(r, s, GRID).values - channel_mi_curve(w, GRID).values))


def test_matching_channel_examples():
    r = np.array([0.3, 0.0, 0.1])
    w = build_matching_channel(r, r, 50)
    assert w.shape == (2, 1)
    assert np.all(channel_mi_curve(w, GRID).values == 0)
    w = build_matching_channel([0, 0, 0], [0, 0, 1], 50)
    d = channel_mi_curve(binary_channel(1.0, 0.5), GRID).values
    assert np.max(np.abs(channel_mi_curve(w, GRID).values - d)) < 1e-12
    assert _match_error([0, 0, 0], [0, 0, 1], 50) < 1e-12
    assert _match_error([0, 0, -1], [0, 0, 1], 50) < 1e-12
    assert w.shape == (2, 102)


def test_matching_is_channel_and_converges(rng):
    for _ in range(5):
        r, s = _pair(rng)
        w = build_matching_channel(r, s, 200)
        assert w.min() >= 0 and np.allclose(w.sum(1), 1.0)
        errs = [_match_error(r, s, n) for n in (25, 50, 100, 200)]
        assert all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= 1e-5


@pytest.mark.parametrize("r,s,p", [
    ([0, 0, 0], [0, 0, 1], 0.5),
    ([0, 0, 0.2], [0.3, 0, 0], 0.3),
])
def test_second_derivative_examples(r, s, p):
    closed, fd = second_derivative_check(r, s, p)
    assert abs(closed - fd) <= 1e-5


def test_second_derivative_edge_cases():
    assert second_derivative_check([0.1, 0, 0], [0.1, 0, 0], 0.4) == (0.0, 0.0)
    with pytest.raises(DomainError):
        second_derivative_check([0, 0, -1], [0, 0, 1], 0.0)
    with pytest.raises(DomainError):
        second_derivative_check([0, 0, 1], [0, 1, 0], 1e-5)


def test_curve_fit_examples(rng):
    r, s = _pair(rng)
    dic = matching_dictionary(r, s, 20, GRID)
    w, res = curve_fit_mixture(dic[3], dic)
    assert res <= 1e-9 and abs(w[3] - 1) < 1e-6
    avg = type(dic[0])(GRID, 0.5 * (dic[1].values + dic[5].values))
    assert curve_fit_mixture(avg, dic)[1] <= 1e-6
    assert curve_fit_mixture(avg, dic, method="subgradient")[1] <= 1e-2
    target = mi_curve_quantum(r, s, GRID)
    w, res = curve_fit_mixture(target, matching_dictionary(r, s, 200, GRID))
    assert res <= 1e-4
    assert w.min() >= 0 and w.sum() <= 1 + 1e-6
    with pytest.raises(ValidationError):
        curve_fit_mixture(target, [])
