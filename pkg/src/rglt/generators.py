"""Fundamental matrix-sequences of GLT theory, built densely.

Conventions: a d-level (r,s)-block matrix with level orders ``n`` has size
``N(n) r x N(n) s``; its blocks are indexed by d-indices in lexicographic
order, which is exactly the ordering produced by nested Kronecker products
``kron(A_1, ..., A_d, block)``.
"""
import numpy as np
import scipy.linalg

from .errors import ArgumentError, DomainError
from .expr import Expr
from .linalg import lex_indices, multi_index, n_total, perm_P
from .rng import SplitMix64
from .symbol import CoefficientFunction, SeparableSymbol, TrigPolySymbol

__all__ = ['toeplitz', 'diag_sampling', 'glt9_approximant', 'random_zero_distributed',
           'block_assemble', 'restrict_blocks', 'get_block']


def _real_if_exact(X):
    if np.iscomplexobj(X) and not np.any(X.imag):
        return X.real.copy()
    return X


def toeplitz(n, f):
    """Multilevel block Toeplitz matrix ``T_n(f) = [f_{i-j}]_{i,j=1}^n``.

    Parameters
    ----------
    n : int or tuple of int
        Level orders; ``len(n)`` must equal ``f.d``.
    f : TrigPolySymbol

    Returns
    -------
    ndarray of shape ``(N(n) f.r, N(n) f.s)``; real when every Fourier
    coefficient is real.

    Examples
    --------
    >>> lap = TrigPolySymbol({(0,): 2, (1,): -1, (-1,): -1})
    >>> toeplitz(4, lap)[:2]
    array([[ 2., -1.,  0.,  0.],
           [-1.,  2., -1.,  0.]])
    """
    n = multi_index(n)
    if len(n) != f.d:
        raise ArgumentError(f"level orders {n} do not match symbol dimension {f.d}")
    N = n_total(n)
    T = np.zeros((N * f.r, N * f.s), dtype=complex)
    for j, c in f.coeffs.items():
        if any(abs(jk) >= nk for jk, nk in zip(j, n)):
            continue
        # block (i, i - j): ones on the (-j_k)-th diagonal of every level
        factor = np.ones((1, 1))
        for jk, nk in zip(j, n):
            factor = np.kron(factor, np.eye(nk, k=-jk))
        T += np.kron(factor, c)
    return _real_if_exact(T)


def _as_coefficient(a, d):
    if isinstance(a, CoefficientFunction):
        return a
    if isinstance(a, (str, Expr)):
        return CoefficientFunction.scalar(a, d)
    return None


def _sample_coefficient(n, a):
    """Values ``a(i/n)`` for ``i = 1..n`` lexicographic, as ``(N, r, s)``."""
    n = multi_index(n)
    nodes = lex_indices(n) / np.array(n, dtype=float)
    cf = _as_coefficient(a, len(n))
    if cf is None:
        vals = np.array([np.atleast_2d(a(x if len(n) > 1 else x[0])) for x in nodes])
        bad = ~np.isfinite(vals).reshape(len(nodes), -1).all(axis=1)
        if bad.any():
            first = np.flatnonzero(bad)[0]
            i = tuple(int(v) for v in lex_indices(n)[first])
            raise DomainError(f"coefficient undefined at i={i} (x={tuple(float(v) for v in nodes[first])})")
        return vals
    try:
        return cf.evaluate(nodes)
    except DomainError:
        for i, x in zip(lex_indices(n), nodes):
            try:
                cf.evaluate(x)
            except DomainError as exc:
                raise DomainError(f"coefficient undefined at i={tuple(int(v) for v in i)}: {exc}") from None
        raise


def diag_sampling(n, a):
    """Block diagonal sampling matrix ``D_n(a) = diag_{i=1..n} a(i/n)``.

    ``a`` may be a :class:`CoefficientFunction`, an expression string, or a
    Python callable of the point ``x`` (a float when ``d = 1``).
    """
    vals = _sample_coefficient(n, a)
    return _real_if_exact(scipy.linalg.block_diag(*vals))


def glt9_approximant(n, kappa):
    """``sum_i D_n(a_i I_r) T_n(f_i)`` for a separable symbol ``sum_i a_i f_i``."""
    if isinstance(kappa, TrigPolySymbol):
        kappa = SeparableSymbol.from_trig(kappa)
    n = multi_index(n)
    N = n_total(n)
    out = np.zeros((N * kappa.r, N * kappa.s), dtype=complex)
    for a, f in kappa.terms:
        avals = _sample_coefficient(n, CoefficientFunction([[a]], len(n)))[:, 0, 0]
        out += np.repeat(avals, kappa.r)[:, None] * toeplitz(n, f)
    return _real_if_exact(out)


def random_zero_distributed(n, r, s, seed=0, rank_fraction=0.0, norm_eps=0.0):
    """Seeded ``R + E`` with ``rank(R) <= floor(c N(n) min(r,s))`` and ``||E||_2 <= eps``.

    ``R`` is a sum of single-entry spikes with magnitudes in ``[1, 2)`` at
    random positions; ``E`` is a Gaussian matrix rescaled to spectral norm
    exactly ``norm_eps``. Both come from one :class:`SplitMix64` stream, so
    the output is reproducible from ``seed``.
    """
    if not 0 <= rank_fraction <= 1:
        raise ArgumentError("rank_fraction must lie in [0, 1]")
    if norm_eps < 0:
        raise ArgumentError("norm_eps must be nonnegative")
    N = n_total(n)
    rows, cols = N * r, N * s
    rng = SplitMix64(seed)
    X = np.zeros((rows, cols))
    spikes = int(np.floor(rank_fraction * N * min(r, s)))
    if spikes:
        ri = rng.integers(spikes, rows)
        ci = rng.integers(spikes, cols)
        mag = rng.uniform(spikes, 1.0, 2.0)
        sign = np.where(rng.uniform(spikes) < 0.5, -1.0, 1.0)
        np.add.at(X, (ri, ci), sign * mag)
    if norm_eps > 0:
        G = rng.normal(rows * cols).reshape(rows, cols)
        X += norm_eps * G / np.linalg.norm(G, 2)
    return X


def get_block(X, i, j, r, s):
    """The ``r x s`` block at 0-based flat block position ``(i, j)``."""
    return X[i * r:(i + 1) * r, j * s:(j + 1) * s]


def restrict_blocks(X, r, s, rows, cols):
    """Restrict every ``r x s`` block of ``X`` to the same submatrix (0-based ``rows``/``cols``)."""
    if X.shape[0] % r or X.shape[1] % s:
        raise ArgumentError(f"shape {X.shape} is not a multiple of block size {(r, s)}")
    N = X.shape[0] // r
    if X.shape[1] // s != N:
        raise ArgumentError("row and column block counts differ")
    ri = (np.arange(N)[:, None] * r + np.asarray(rows)[None]).ravel()
    ci = (np.arange(N)[:, None] * s + np.asarray(cols)[None]).ravel()
    return X[np.ix_(ri, ci)]


def _part_sizes(parts, N):
    rho, varsigma = len(parts), len(parts[0])
    if any(len(row) != varsigma for row in parts):
        raise ArgumentError("parts must form a rectangular grid")
    r_sizes, s_sizes = [], []
    for i in range(rho):
        m = np.asarray(parts[i][0]).shape[0]
        if m % N:
            raise ArgumentError(f"row count {m} of part ({i}, 0) is not a multiple of N(n)={N}")
        r_sizes.append(m // N)
    for j in range(varsigma):
        m = np.asarray(parts[0][j]).shape[1]
        if m % N:
            raise ArgumentError(f"column count {m} of part (0, {j}) is not a multiple of N(n)={N}")
        s_sizes.append(m // N)
    for i in range(rho):
        for j in range(varsigma):
            shape = np.asarray(parts[i][j]).shape
            if shape != (N * r_sizes[i], N * s_sizes[j]):
                raise ArgumentError(f"part ({i}, {j}) has shape {shape}, expected "
                                    f"{(N * r_sizes[i], N * s_sizes[j])}")
    return r_sizes, s_sizes


def block_assemble(parts, n):
    """Assemble a grid of d-level block matrices and unscramble it.

    Parameters
    ----------
    parts : list of lists of ndarray
        ``parts[i][j]`` is a d-level ``(r_i, s_j)``-block matrix with level
        orders ``n``.
    n : int or tuple of int

    Returns
    -------
    B : ndarray
        Naive concatenation ``[A_ij]``.
    A : ndarray
        The d-level ``(r, s)``-block matrix (``r = sum r_i``, ``s = sum s_j``)
        whose block ``(I, J)`` is ``[a_{IJ, ij}]``, obtained as
        ``(P_{r,N} diag_i P_{r_i,N}^T) B (P_{s,N} diag_j P_{s_j,N}^T)^T``.
    """
    N = n_total(n)
    r_sizes, s_sizes = _part_sizes(parts, N)
    B = np.block([[np.asarray(p) for p in row] for row in parts])
    left = perm_P(sum(r_sizes), N) @ scipy.linalg.block_diag(*[perm_P(ri, N).T for ri in r_sizes])
    right = perm_P(sum(s_sizes), N) @ scipy.linalg.block_diag(*[perm_P(sj, N).T for sj in s_sizes])
    return B, left @ B @ right.T

