"""Dense linear algebra substrate.

Multi-indices, Kronecker products, the commutation permutations
``P_{k1,k2}`` and ``Q_{a,t,N}``, and thin wrappers around LAPACK that
enforce the contracts the rest of the package relies on (sorted spectra,
rank cutoffs, explicit errors instead of silent garbage).

Matrices are plain :class:`numpy.ndarray` objects. Block structure
(``d``, ``n``, ``r``, ``s``) is passed explicitly where it matters.
"""
from collections import namedtuple
from itertools import product

import numpy as np
import scipy.linalg

from .errors import (ArgumentError, DefinitenessError, IndexRangeError,
                     NumericalError)

__all__ = ['multi_index', 'n_total', 'lex_position', 'lex_indices', 'kron',
           'perm_P', 'perm_Q', 'zeta', 'SVDResult', 'svd', 'singular_values',
           'eig_hermitian', 'pinv', 'solve_spd', 'hermitian_matrix_function',
           'principal_submatrix', 'is_hermitian']

SVDResult = namedtuple('SVDResult', ['U', 'singular_values', 'V'])
SVDResult.__doc__ = """Singular value decomposition ``X = U @ diag(singular_values) @ V^*``."""

#: tolerance under which a matrix is accepted as Hermitian (relative to ||X||_F)
HERMITIAN_TOL = 1e-12


def multi_index(n):
    """Normalize ``n`` (int or sequence of ints) to a tuple of positive ints."""
    if np.isscalar(n):
        n = (n,)
    n = tuple(int(v) for v in n)
    if len(n) == 0:
        raise ArgumentError("multi-index must have at least one entry")
    if any(v < 1 for v in n):
        raise ArgumentError(f"multi-index entries must be >= 1, got {n}")
    return n


def n_total(n):
    """Return ``N(n) = n_1 * ... * n_d``.

    >>> n_total((2, 3, 4))
    24
    """
    return int(np.prod(multi_index(n)))


def lex_position(i, n):
    """1-based rank of the d-index ``i`` in the lexicographic range ``1..n``.

    >>> lex_position((2, 1), (2, 3))
    4
    """
    n = multi_index(n)
    i = tuple(int(v) for v in (i if not np.isscalar(i) else (i,)))
    if len(i) != len(n):
        raise ArgumentError(f"index {i} and level orders {n} differ in dimension")
    for ik, nk in zip(i, n):
        if not 1 <= ik <= nk:
            raise IndexRangeError(f"index {i} outside 1..{n}")
    return int(np.ravel_multi_index(tuple(v - 1 for v in i), n)) + 1


def lex_indices(n):
    """All d-indices ``1..n`` in lexicographic order, as an ``(N(n), d)`` int array."""
    n = multi_index(n)
    return np.array(list(product(*(range(1, k + 1) for k in n))), dtype=int).reshape(-1, len(n))


def kron(X, Y):
    """Tensor (Kronecker) product; block ``(i, j)`` of the result is ``X[i, j] * Y``."""
    return np.kron(np.asarray(X), np.asarray(Y))


def zeta(k1, k2):
    """The permutation ``zeta`` of ``1..k1*k2`` (1-based values) defining ``P_{k1,k2}``."""
    if k1 < 1 or k2 < 1:
        raise ArgumentError("k1 and k2 must be positive")
    i = np.arange(1, k1 * k2 + 1)
    return ((i - 1) % k1) * k2 + (i - 1) // k1 + 1


def perm_P(k1, k2):
    """Permutation matrix whose rows are ``e_{zeta(1)}^T, ..., e_{zeta(k1 k2)}^T``.

    Satisfies ``kron(Y, X) = P(m1, m2) @ kron(X, Y) @ P(n1, n2).T`` for
    ``X`` of size ``m1 x n1`` and ``Y`` of size ``m2 x n2``.
    """
    z = zeta(k1, k2)
    P = np.zeros((k1 * k2, k1 * k2))
    P[np.arange(k1 * k2), z - 1] = 1.0
    return P


def perm_Q(a, t, N):
    """``Q_{a,t,N} = P_{t,N} @ blockdiag(P_{a,N}^T, I_{N(t-a)})``, an ``Nt x Nt`` permutation."""
    if a < 1 or t < 1 or N < 1:
        raise ArgumentError("a, t, N must be positive")
    if a > t:
        raise ArgumentError(f"a={a} exceeds t={t}")
    inner = scipy.linalg.block_diag(perm_P(a, N).T, np.eye(N * (t - a)))
    return perm_P(t, N) @ inner


def _as_matrix(X):
    X = np.asarray(X)
    if X.ndim != 2:
        raise ArgumentError(f"expected a 2-d matrix, got shape {X.shape}")
    return X


def svd(X, full_matrices=True):
    """Singular value decomposition with nonincreasing singular values.

    Raises
    ------
    NumericalError
        If LAPACK fails to converge.
    """
    X = _as_matrix(X)
    if X.size == 0:
        m, n = X.shape
        return SVDResult(np.eye(m), np.zeros(0), np.eye(n))
    try:
        U, s, Vh = np.linalg.svd(X, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {X.shape} matrix: {exc}") from exc
    return SVDResult(U, s, Vh.conj().T)


def singular_values(X):
    """Singular values only, nonincreasing."""
    X = _as_matrix(X)
    if X.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(X, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {X.shape} matrix: {exc}") from exc


def is_hermitian(X, tol=HERMITIAN_TOL):
    X = _as_matrix(X)
    if X.shape[0] != X.shape[1]:
        return False
    scale = np.linalg.norm(X)
    return np.linalg.norm(X - X.conj().T) <= tol * max(scale, 1.0)


def eig_hermitian(X, eigenvectors=True, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues nondecreasing.

    ``X`` is symmetrized as ``(X + X^*)/2`` after checking that it is
    Hermitian to within ``tol * ||X||_F``.

    Returns
    -------
    lam : ndarray
        Real eigenvalues, sorted nondecreasing.
    Q : ndarray
        Unitary eigenvector matrix (only when ``eigenvectors`` is true).
    """
    X = _as_matrix(X)
    if not is_hermitian(X, tol):
        raise ArgumentError("matrix is not Hermitian within tolerance")
    Xs = 0.5 * (X + X.conj().T)
    try:
        if eigenvectors:
            return np.linalg.eigh(Xs)
        return np.linalg.eigvalsh(Xs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver did not converge: {exc}") from exc


def pinv(X, rel_tol=1e-12):
    """Moore-Penrose pseudoinverse ``V Sigma^dagger U^*``.

    Singular values ``sigma_i <= rel_tol * sigma_1`` are treated as zero.
    """
    X = _as_matrix(X)
    if rel_tol < 0:
        raise ArgumentError("rel_tol must be nonnegative")
    U, s, V = svd(X, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros(X.shape[::-1], dtype=np.result_type(X.dtype, float))
    keep = s > rel_tol * s[0]
    sinv = np.zeros_like(s)
    sinv[keep] = 1.0 / s[keep]
    return (V * sinv) @ U.conj().T


def solve_spd(A, B):
    """Solve ``A X = B`` for symmetric (Hermitian) positive definite ``A`` by Cholesky."""
    A = _as_matrix(A)
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError(f"matrix is not positive definite: {exc}") from exc
    return scipy.linalg.cho_solve(factor, np.asarray(B))


def hermitian_matrix_function(X, g):
    """Apply a scalar function to a Hermitian matrix: ``Q diag(g(lambda)) Q^*``."""
    lam, Q = eig_hermitian(X)
    try:
        glam = np.asarray(g(lam))
        if glam.shape != lam.shape:
            raise TypeError
    except (TypeError, ValueError):
        glam = np.array([g(v) for v in lam])
    return (Q * glam) @ Q.conj().T


def principal_submatrix(X, rows, cols):
    """Submatrix selected by strictly increasing 0-based ``rows`` and ``cols``."""
    X = _as_matrix(X)
    rows = np.asarray(rows, dtype=int)
    cols = np.asarray(cols, dtype=int)
    for name, idx, size in (('rows', rows, X.shape[0]), ('cols', cols, X.shape[1])):
        if idx.size and (idx.min() < 0 or idx.max() >= size):
            raise IndexRangeError(f"{name} out of range 0..{size - 1}")
        if np.any(np.diff(idx) <= 0):
            raise ArgumentError(f"{name} must be strictly increasing")
    return X[np.ix_(rows, cols)]
