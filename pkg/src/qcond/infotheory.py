"""Entropic quantities in bits for classical distributions and classical-quantum ensembles.

Distributions are numpy arrays; a joint distribution is an n-dimensional
array with one axis per variable. A channel is a row-stochastic matrix
``W[x, c] = p(c|x)``.
"""
from dataclasses import dataclass

import numpy as np

from . import constants as C
from . import kernels
from .errors import ValidationError
from .qmath import validate_density


def validate_prob(p, name="distribution"):
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        raise ValidationError(f"{name} is empty")
    if not np.all(np.isfinite(p)):
        raise ValidationError(f"{name} has non-finite entries")
    if p.min() < -C.PROB_NEG_TOL:
        raise ValidationError(f"{name} has negative entry {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > C.PROB_SUM_TOL:
        raise ValidationError(f"{name} sums to {total:.15g}")
    return np.clip(p, 0.0, None)


def validate_channel(w):
    w = np.asarray(w, dtype=float)
    if w.ndim != 2:
        raise ValidationError(f"channel must be a 2-D row-stochastic matrix, got shape {w.shape}")
    for x, row in enumerate(w):
        validate_prob(row, f"channel row {x}")
    return np.clip(w, 0.0, None)


@dataclass(frozen=True)
class CqEnsemble:
    """A classical-quantum channel ``x -> states[x]`` together with an input law."""

    dist: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        dist = validate_prob(self.dist, "ensemble distribution")
        states = np.asarray(self.states, dtype=np.complex128)
        if states.ndim != 3 or states.shape[1] != states.shape[2]:
            raise ValidationError(f"states must have shape (n, d, d), got {states.shape}")
        if dist.ndim != 1 or states.shape[0] != dist.shape[0]:
            raise ValidationError("need exactly one state per symbol")
        for rho in states:
            validate_density(rho)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "states", states)

    @property
    def dim(self):
        return self.states.shape[1]

    def average_state(self):
        return np.tensordot(self.dist, self.states, axes=1)

    def with_dist(self, dist):
        return CqEnsemble(dist, self.states)


def entropy_of(p):
    """Shannon entropy in bits of any array of probabilities (no validation)."""
    return float(kernels.shannon_rows(np.asarray(p, dtype=float).reshape(1, -1), C.ENTROPY_ZERO_CUT)[0])


def entropy_rows(p):
    p = np.asarray(p, dtype=float)
    return kernels.shannon_rows(p.reshape(-1, p.shape[-1]), C.ENTROPY_ZERO_CUT).reshape(p.shape[:-1])


def vn_entropies(stack):
    """Von Neumann entropies in bits of a stack (k, d, d) (no validation)."""
    stack = np.asarray(stack, dtype=np.complex128)
    return kernels.vn_entropy_batch(stack, C.JACOBI_OFF_TOL, C.JACOBI_MAX_SWEEPS, C.ENTROPY_ZERO_CUT)


def binary_entropy(x):
    """h(x) in bits, elementwise, with h(0) = h(1) = 0."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    m = (x > 0) & (x < 1)
    xm = x[m]
    out[m] = -(xm * np.log2(xm) + (1 - xm) * np.log2(1 - xm))
    return out if out.ndim else float(out)


def binary_entropy_nats(x):
    return binary_entropy(x) * np.log(2.0)


def shannon_entropy(p):
    """Entropy in bits of a probability vector.

    >>> shannon_entropy([0.5, 0.5])
    1.0
    """
    return entropy_of(validate_prob(p))


def von_neumann_entropy(rho):
    rho = validate_density(rho)
    return float(vn_entropies(rho[None])[0])


def holevo(e: CqEnsemble):
    """``H(sum_x p(x) rho_x) - sum_x p(x) H(rho_x)`` in bits."""
    ents = vn_entropies(np.concatenate([e.average_state()[None], e.states]))
    return max(0.0, float(ents[0] - e.dist @ ents[1:]))


def cond_entropy_cq(e: CqEnsemble):
    """H(X|F) for the classical input X of a c-q ensemble."""
    return entropy_of(e.dist) - holevo(e)


def _validate_joint(j, ndim=None):
    j = np.asarray(j, dtype=float)
    if ndim is not None and j.ndim != ndim:
        raise ValidationError(f"expected a {ndim}-way joint distribution, got {j.ndim} axes")
    return validate_prob(j, "joint distribution")


def marginal(j, axes):
    """Marginal on the listed axes, in their original order."""
    axes = tuple(sorted(axes))
    drop = tuple(a for a in range(j.ndim) if a not in axes)
    return j.sum(axis=drop) if drop else j


def joint_entropy(j, axes=None):
    return entropy_of(j if axes is None else marginal(j, axes))


def conditional_entropy(j, target, given=()):
    """H(target | given) for axis tuples of a joint distribution."""
    target, given = tuple(target), tuple(given)
    both = joint_entropy(j, target + given)
    return both - (joint_entropy(j, given) if given else 0.0)


def mutual_information(j, a=(0,), b=(1,), given=()):
    """I(A;B|given) in bits; defaults to I(X;Y) of a 2-way joint.

    >>> mutual_information([[0.5, 0.0], [0.0, 0.5]])
    1.0
    """
    j = _validate_joint(j)
    if j.ndim < 2:
        raise ValidationError("mutual information needs at least two variables")
    return _mi(j, tuple(a), tuple(b), tuple(given))


def _mi(j, a, b, given=()):
    h = lambda axes: joint_entropy(j, axes) if axes else 0.0
    return h(a + given) + h(b + given) - h(a + b + given) - h(given)


def channel_mi(px, w):
    """I(X;C) for input law ``px`` through channel ``w`` (no validation)."""
    joint = np.asarray(px)[:, None] * np.asarray(w)
    return entropy_of(joint.sum(0)) + entropy_of(px) - entropy_of(joint)


def markov_residual_cq(j, states):
    """Residual I(F;Y|X) of a register attached to a classical pair (X, Y).

    ``states`` is indexed by x alone, shape (nx, d, d), in which case the
    chain F - X - Y holds by construction and the residual vanishes; or by
    (x, y), shape (nx, ny, d, d), where the residual measures how much F
    depends on Y beyond X.
    """
    j = _validate_joint(j, 2)
    states = np.asarray(states, dtype=np.complex128)
    nx, ny = j.shape
    if states.ndim == 3:
        states = np.broadcast_to(states[:, None], (nx, ny) + states.shape[1:])
    if states.shape[:2] != (nx, ny):
        raise ValidationError("states must be indexed by x or by (x, y)")
    px = j.sum(1)
    total = 0.0
    for x in range(nx):
        if px[x] <= 0:
            continue
        cond = j[x] / px[x]
        mix = np.tensordot(cond, states[x], axes=1)
        ents = vn_entropies(np.concatenate([mix[None], states[x]]))
        total += px[x] * (ents[0] - cond @ ents[1:])
    return max(0.0, float(total))
