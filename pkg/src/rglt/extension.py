"""Extension operator ``E_{r,s}^t``: zero-pad every ``r x s`` block to ``t x t``.

Two independent constructions are provided and must agree bit for bit:

* :func:`extend_matrix` -- blockwise padding, by direct index placement;
* :func:`extend_via_permutation` -- ``Q_{r,t,N} [[X, O], [O, O]] Q_{s,t,N}^T``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .linalg import perm_Q
from .rng import SplitMix64

__all__ = ['ExtensionSpec', 'selector', 'extend_block', 'extend_matrix',
           'extend_via_permutation', 'block_count', 'IDENTITIES', 'identity_suite']


@dataclass(frozen=True)
class ExtensionSpec:
    """Original block size ``(r, s)`` and target size ``t >= max(r, s)``."""
    r: int
    s: int
    t: int

    def __post_init__(self):
        if min(self.r, self.s) < 1:
            raise ArgumentError("block sizes must be positive")
        if self.t < max(self.r, self.s):
            raise ArgumentError(f"t={self.t} is smaller than max(r, s)={max(self.r, self.s)}")


def selector(a, t):
    """``pi_{a,t} = [I_a | O]``, an ``a x t`` matrix."""
    if a > t:
        raise ArgumentError(f"a={a} exceeds t={t}")
    return np.eye(a, t)


def extend_block(x, t):
    """``E_{r,s}^t(x) = pi_{r,t}^T x pi_{s,t}`` for a single ``r x s`` matrix."""
    x = np.atleast_2d(np.asarray(x))
    r, s = x.shape
    spec = ExtensionSpec(r, s, t)
    return selector(spec.r, t).T @ x @ selector(spec.s, t)


def block_count(X, r, s):
    """``N(n)`` for a d-level ``(r, s)``-block matrix ``X``."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] % r or X.shape[1] % s or X.shape[0] // r != X.shape[1] // s:
        raise ArgumentError(f"shape {X.shape} is not that of an (r, s) = ({r}, {s}) block matrix")
    return X.shape[0] // r


def extend_matrix(X, r, s, t):
    """Blockwise extension of a d-level ``(r, s)``-block matrix to ``t x t`` blocks."""
    ExtensionSpec(r, s, t)
    N = block_count(X, r, s)
    X = np.asarray(X)
    out = np.zeros((N * t, N * t), dtype=X.dtype)
    # (N, r, N, s) view of the blocks, dropped into the top-left corner of (N, t, N, t)
    out.reshape(N, t, N, t)[:, :r, :, :s] = X.reshape(N, r, N, s)
    return out


def extend_via_permutation(X, r, s, t):
    """Extension through the permutation identity ``Q_r diag(X, O) Q_s^T``."""
    ExtensionSpec(r, s, t)
    N = block_count(X, r, s)
    X = np.asarray(X)
    padded = np.zeros((N * t, N * t), dtype=X.dtype)
    padded[:N * r, :N * s] = X
    return perm_Q(r, t, N) @ padded @ perm_Q(s, t, N).T


IDENTITIES = ('permutation_form', 'adjoint_block', 'adjoint_matrix', 'tower_block',
              'tower_matrix', 'product_block', 'product_matrix')


def _complex(rng, shape):
    size = int(np.prod(shape))
    return (rng.normal(size) + 1j * rng.normal(size)).reshape(shape)


def _draw_sizes(rng, count, high):
    return [int(v) + 1 for v in rng.integers(count, high)]


def identity_suite(instances=100, seed=0, max_n=4, max_block=3, max_t=5):
    """Worst deviation of every extension identity over seeded random instances.

    Each instance draws ``n <= max_n``, block sizes ``r, q, s <= max_block``,
    targets ``max(r, q, s) <= t <= u <= max_t`` and complex Gaussian
    ``x`` (r x s), ``X`` ((r, q)-block), ``Y`` ((q, s)-block). The identities:

    * ``permutation_form``: blockwise padding equals ``Q diag(X, O) Q^T`` (bitwise, so 0 or inf)
    * ``adjoint_block`` / ``adjoint_matrix``: ``E_{r,s}(x)^* = E_{s,r}(x^*)``
    * ``tower_block`` / ``tower_matrix``: ``E^u_{t,t}(E^t_{r,s}(x)) = E^u_{r,s}(x)``
    * ``product_block`` / ``product_matrix``: ``E_{r,s}(xy) = E_{r,q}(x) E_{q,s}(y)``

    Returns
    -------
    dict
        Identity name -> maximum absolute entrywise deviation.
    """
    rng = SplitMix64(seed)
    worst = dict.fromkeys(IDENTITIES, 0.0)

    def record(name, lhs, rhs):
        worst[name] = max(worst[name], float(np.abs(lhs - rhs).max(initial=0.0)))

    for _ in range(instances):
        n = _draw_sizes(rng, 1, max_n)[0]
        r, q, s = _draw_sizes(rng, 3, max_block)
        lo = max(r, q, s)
        t, u = sorted(lo + int(v) for v in rng.integers(2, max_t - lo + 1))
        x, y = _complex(rng, (r, q)), _complex(rng, (q, s))
        xs = _complex(rng, (r, s))
        X, Y = _complex(rng, (n * r, n * q)), _complex(rng, (n * q, n * s))
        XS = _complex(rng, (n * r, n * s))

        if not np.array_equal(extend_matrix(XS, r, s, t), extend_via_permutation(XS, r, s, t)):
            worst['permutation_form'] = float('inf')
        record('adjoint_block', extend_block(xs, t).conj().T, extend_block(xs.conj().T, t))
        record('adjoint_matrix', extend_matrix(XS, r, s, t).conj().T,
               extend_matrix(XS.conj().T, s, r, t))
        record('tower_block', extend_block(extend_block(xs, t), u), extend_block(xs, u))
        record('tower_matrix', extend_matrix(extend_matrix(XS, r, s, t), t, t, u),
               extend_matrix(XS, r, s, u))
        record('product_block', extend_block(x @ y, t), extend_block(x, t) @ extend_block(y, t))
        record('product_matrix', extend_matrix(X @ Y, r, s, t),
               extend_matrix(X, r, q, t) @ extend_matrix(Y, q, s, t))
    return worst
