"""Higher-order B-spline FE discretization of a 1D saddle-point system.

The system ``-(a u')' + v' = f``, ``-u' - rho v = g`` on ``(0, 1)`` with
homogeneous Dirichlet conditions is discretized with the interior
B-splines of degree ``p`` / smoothness ``C^k`` for ``u`` and degree ``q`` /
smoothness ``C^l`` for ``v``. This module assembles

* ``A11[i, j] = int a B'_{j+1,[p,k]} B'_{i+1,[p,k]}``
* ``A12[i, j] = int B'_{j+1,[q,l]} B_{i+1,[p,k]}``      (``A21 = A12^T``)
* ``A22[i, j] = -rho int B_{j+1,[q,l]} B_{i+1,[q,l]}``

and the Schur complement ``S = A22 - A12^T A11^{-1} A12``, together with the
block-Toeplitz symbols ``kappa``, ``xi`` and ``mu`` built from the reference
B-splines. B-spline indices follow the 1-based numbering ``B_1, ..., B_{dim}``.
"""
import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from .errors import ArgumentError, DefinitenessError, InvariantViolation, NumericalError
from .generators import toeplitz
from .linalg import singular_values, solve_spd
from .symbol import CoefficientFunction, SeparableSymbol, TrigPolySymbol

__all__ = ['eta', 'nu', 'SplineSpace', 'ReferenceSplines', 'FEProblem', 'basis_matrix',
           'bspline_eval', 'reference_splines', 'assemble_A11', 'assemble_A12',
           'assemble_A22', 'HatMatrices', 'expand_hats', 'schur_complement',
           'normalized_block_matrix', 'reference_blocks', 'fem_symbols', 'block_symbol',
           'ToeplitzCheck', 'toeplitz_equality_check']


def _ceil_div(a, b):
    return -(-a // b)


def eta(p, k):
    """Support length ``ceil((p+1)/(p-k))`` of the widest reference B-spline."""
    return _ceil_div(p + 1, p - k)


def nu(p, k):
    """``ceil((k+1)/(p-k))``: number of trailing element shifts lost to boundary splines."""
    return _ceil_div(k + 1, p - k)


def _check_degree(p, k):
    if p < 1 or not 0 <= k <= p - 1:
        raise ArgumentError(f"need p >= 1 and 0 <= k <= p-1, got p={p}, k={k}")


@dataclass(frozen=True)
class SplineSpace:
    """B-splines of degree ``p`` and smoothness ``C^k`` on ``n`` uniform elements."""
    p: int
    k: int
    n: int

    def __post_init__(self):
        _check_degree(self.p, self.k)
        if self.n < 1:
            raise ArgumentError("n must be >= 1")

    @property
    def knots(self):
        p, k, n = self.p, self.k, self.n
        interior = np.repeat(np.arange(1, n) / n, p - k)
        return np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])

    @property
    def dim_full(self):
        return self.n * (self.p - self.k) + self.k + 1

    @property
    def dim_0(self):
        return self.n * (self.p - self.k) + self.k - 1

    def support(self, i):
        """``[tau_i, tau_{i+p+1}]`` for the 1-based index ``i``."""
        t = self.knots
        return t[i - 1], t[i + self.p]

    def basis(self, x, deriv=0):
        """All ``dim_full`` B-splines (or derivatives) at the points ``x``."""
        return basis_matrix(self.knots, self.p, x, deriv)


def _degree0(knots, x):
    t = knots
    B = ((t[:-1] <= x[:, None]) & (x[:, None] < t[1:])).astype(float)
    # close the last nonempty interval on the right
    last = np.flatnonzero(t[:-1] < t[1:])[-1]
    B[x == t[last + 1], last] = 1.0
    return B


def _raise_degree(knots, B, deg, x):
    t = knots
    nb = len(t) - 1 - deg
    xc = x[:, None]
    dl = t[deg:deg + nb] - t[:nb]
    dr = t[deg + 1:deg + 1 + nb] - t[1:1 + nb]
    # 0/0 terms of the recursion are taken as 0
    with np.errstate(divide='ignore', invalid='ignore'):
        wl = np.where(dl > 0, (xc - t[:nb]) / np.where(dl > 0, dl, 1), 0.0)
        wr = np.where(dr > 0, (t[deg + 1:deg + 1 + nb] - xc) / np.where(dr > 0, dr, 1), 0.0)
    return wl * B[:, :nb] + wr * B[:, 1:nb + 1]


def basis_matrix(knots, p, x, deriv=0):
    """Cox-de Boor evaluation of every B-spline of degree ``p`` on ``knots``.

    Returns an array of shape ``(len(x), len(knots) - p - 1)``; column
    ``i - 1`` holds ``B_i`` (or ``B_i'`` when ``deriv = 1``).
    """
    knots = np.asarray(knots, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if deriv not in (0, 1):
        raise ArgumentError("deriv must be 0 or 1")
    if deriv == 1 and p == 0:
        return np.zeros((x.size, len(knots) - 1))
    top = p - deriv
    B = _degree0(knots, x)
    for deg in range(1, top + 1):
        B = _raise_degree(knots, B, deg, x)
    if deriv == 0:
        return B
    t = knots
    nb = len(t) - p - 1
    dl = t[p:p + nb] - t[:nb]
    dr = t[p + 1:p + 1 + nb] - t[1:1 + nb]
    cl = np.where(dl > 0, p / np.where(dl > 0, dl, 1), 0.0)
    cr = np.where(dr > 0, p / np.where(dr > 0, dr, 1), 0.0)
    return cl * B[:, :nb] - cr * B[:, 1:nb + 1]


def bspline_eval(knots, p, i, x, deriv=0):
    """Value (or first derivative) of the 1-based ``i``-th B-spline at ``x``."""
    knots = np.asarray(knots, dtype=float)
    count = len(knots) - p - 1
    if not 1 <= i <= count:
        raise ArgumentError(f"B-spline index {i} outside 1..{count}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((x_arr < knots[0]) | (x_arr > knots[-1])):
        raise ArgumentError(f"x outside [{knots[0]}, {knots[-1]}]")
    vals = basis_matrix(knots, p, x_arr, deriv)[:, i - 1]
    return float(vals[0]) if np.ndim(x) == 0 else vals


@dataclass(frozen=True)
class ReferenceSplines:
    """The ``p - k`` reference B-splines on knots ``0..eta`` of multiplicity ``p - k``."""
    p: int
    k: int

    def __post_init__(self):
        _check_degree(self.p, self.k)

    @property
    def count(self):
        return self.p - self.k

    @property
    def eta(self):
        return eta(self.p, self.k)

    @property
    def nu(self):
        return nu(self.p, self.k)

    @property
    def knots(self):
        return np.repeat(np.arange(self.eta + 1, dtype=float), self.p - self.k)

    def evaluate(self, y, deriv=0):
        """Values of ``beta_1..beta_{p-k}`` at ``y``, shape ``(len(y), p - k)``; zero off ``[0, eta]``."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros((y.size, self.count))
        inside = (y >= 0) & (y <= self.eta)
        if inside.any():
            out[inside] = basis_matrix(self.knots, self.p, y[inside], deriv)[:, :self.count]
        return out

    def support(self, t):
        """Support of ``beta_t`` (1-based)."""
        kn = self.knots
        return kn[t - 1], kn[t + self.p]


def reference_splines(p, k):
    return ReferenceSplines(p, k)


@dataclass
class FEProblem:
    """Parameters of the saddle-point discretization.

    ``m`` is the expansion parameter of the hat matrices; it defaults to
    ``max(k, l)`` and must satisfy ``m (p-k) >= k`` and ``m (q-l) >= l``.
    """
    p: int
    k: int
    q: int
    l: int
    a: object = '1'
    rho: float = 0.0
    n: int = 16
    m: int = None

    def __post_init__(self):
        _check_degree(self.p, self.k)
        _check_degree(self.q, self.l)
        if self.n < 1:
            raise ArgumentError("n must be >= 1")
        if self.m is None:
            self.m = max(self.k, self.l)
        if self.m < 0 or self.m * (self.p - self.k) < self.k or self.m * (self.q - self.l) < self.l:
            raise ArgumentError(f"m={self.m} violates m(p-k) >= k or m(q-l) >= l")
        if not isinstance(self.a, CoefficientFunction):
            self.a = CoefficientFunction.scalar(str(self.a))
        if not self.a.is_scalar or self.a.d != 1:
            raise ArgumentError("a must be a scalar function of x1")

    @property
    def N(self):
        return self.n * (self.p - self.k) + self.k - 1

    @property
    def M(self):
        return self.n * (self.q - self.l) + self.l - 1

    @property
    def space_u(self):
        return SplineSpace(self.p, self.k, self.n)

    @property
    def space_v(self):
        return SplineSpace(self.q, self.l, self.n)

    def to_dict(self):
        d = asdict(self)
        d['a'] = self.a.to_string()
        return d

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        keys = ('p', 'k', 'q', 'l', 'a', 'rho', 'n', 'm')
        unknown = set(data) - set(keys)
        if unknown:
            raise ArgumentError(f"unknown FE problem keys: {sorted(unknown)}")
        return cls(**{k: data[k] for k in keys if k in data})

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _quadrature(n, points):
    """Gauss-Legendre nodes and weights on the ``n`` elements ``[e/n, (e+1)/n]``."""
    xg, wg = np.polynomial.legendre.leggauss(points)
    h = 1.0 / n
    left = np.arange(n) * h
    x = (left[:, None] + 0.5 * h * (xg[None] + 1)).ravel()
    w = np.tile(0.5 * h * wg, n)
    return x, w


def _points_for(poly_degree, a, base):
    """At least ``base`` Gauss points, enough to integrate a degree-``poly_degree`` integrand times ``a``.

    Non-polynomial ``a`` gets a fixed 10-point rule per element.
    """
    extra = 0 if a is None else a.polynomial_degree()
    if extra is None:
        return 10
    return max(base, _ceil_div(poly_degree + extra + 1, 2))


def _symmetrize(A):
    return 0.5 * (A + A.T)


def assemble_A11(prob, points=None):
    """Stiffness block ``[int a phi_j' phi_i']`` of size ``N x N`` (exactly symmetric)."""
    p = prob.p
    g = points or _points_for(2 * (p - 1), prob.a, max(p, prob.q) + 1)
    x, w = _quadrature(prob.n, g)
    av = prob.a.evaluate(x[:, None])[:, 0, 0]
    D = prob.space_u.basis(x, deriv=1)[:, 1:-1]
    return _symmetrize(D.T @ ((w * av)[:, None] * D))


def assemble_A12(prob, points=None):
    """Coupling block ``[int psi_j' phi_i]`` of size ``N x M``."""
    g = points or max(prob.p, prob.q) + 1
    x, w = _quadrature(prob.n, g)
    B = prob.space_u.basis(x)[:, 1:-1]
    Dv = prob.space_v.basis(x, deriv=1)[:, 1:-1]
    return B.T @ (w[:, None] * Dv)


def assemble_A22(prob, points=None):
    """``-rho`` times the mass matrix of the ``psi`` basis, ``M x M``."""
    g = points or max(prob.p, prob.q) + 1
    x, w = _quadrature(prob.n, g)
    B = prob.space_v.basis(x)[:, 1:-1]
    return _symmetrize(-prob.rho * (B.T @ (w[:, None] * B)))


def assemble(prob):
    """``(A11, A12, A22)`` for ``prob``."""
    return assemble_A11(prob), assemble_A12(prob), assemble_A22(prob)


@dataclass
class HatMatrices:
    """Expanded FE blocks of sizes ``(n+m)(p-k)`` and ``(n+m)(q-l)``."""
    A11: np.ndarray = field(repr=False)
    A12: np.ndarray = field(repr=False)
    A22: np.ndarray = field(repr=False)

    @property
    def A(self):
        return np.block([[self.A11, self.A12], [self.A12.T, self.A22]])

    def normalized(self, n):
        """``[[A11/n, A12], [A12^T, n A22]]`` for the expanded blocks."""
        return np.block([[self.A11 / n, self.A12], [self.A12.T, n * self.A22]])

    def schur(self):
        return self.A22 - self.A12.T @ np.linalg.solve(self.A11, self.A12)


def expand_hats(prob, A11, A12, A22):
    """Pad the FE blocks with identity / zero blocks to the exact block-Toeplitz sizes."""
    lead_u = prob.m * (prob.p - prob.k) - prob.k
    lead_v = prob.m * (prob.q - prob.l) - prob.l
    if lead_u < 0 or lead_v < 0:
        raise ArgumentError(f"m={prob.m} too small for the expansion")
    H11 = scipy.linalg.block_diag(np.eye(lead_u), A11, np.ones((1, 1)))
    H22 = scipy.linalg.block_diag(np.eye(lead_v), A22, np.ones((1, 1)))
    H12 = np.zeros((H11.shape[0], H22.shape[0]))
    H12[lead_u:lead_u + A12.shape[0], lead_v:lead_v + A12.shape[1]] = A12
    return HatMatrices(H11, H12, H22)


def _factor_solve(A, B):
    """``A^{-1} B``: Cholesky when ``A`` is SPD, pivoted LU otherwise."""
    try:
        return solve_spd(A, B)
    except DefinitenessError:
        pass
    with warnings.catch_warnings():
        # an exactly singular pivot is reported below as NumericalError
        warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.size and diag.min() <= np.finfo(float).eps * diag.max() * A.shape[0]:
        raise NumericalError("A11 is singular; the Schur complement is undefined")
    return scipy.linalg.lu_solve((lu, piv), B)


def schur_complement(prob, A11, A12, A22, sym_tol=1e-11):
    """``A22 - A12^T A11^{-1} A12``, symmetrized after checking its asymmetry."""
    if A12.size == 0:
        return A22.copy()
    S = A22 - A12.T @ _factor_solve(A11, A12)
    dev = np.abs(S - S.T).max(initial=0.0)
    if dev > sym_tol * max(1.0, np.abs(S).max(initial=0.0)):
        raise InvariantViolation(f"Schur complement asymmetry {dev:.3g} exceeds tolerance")
    return _symmetrize(S)


def normalized_block_matrix(prob, A11=None, A12=None, A22=None):
    """``[[A11/n, A12], [A12^T, n A22]]`` (exactly symmetric)."""
    if A11 is None:
        A11, A12, A22 = assemble(prob)
    n = prob.n
    return np.block([[A11 / n, A12], [A12.T, n * A22]])


def reference_blocks(p, k, q, l, shift, points=None):
    """``(K^[s], H^[s], M^[s])`` for the integer shift ``s``.

    ``K[i, j] = int beta'_j(y) beta'_i(y - s)`` over the ``[p,k]`` references,
    ``H[i, j] = int beta'_{j,[q,l]}(y) beta_{i,[p,k]}(y - s)`` and
    ``M[i, j] = int beta_{j,[q,l]}(y) beta_{i,[q,l]}(y - s)``. Integration is
    Gauss-Legendre on unit cells, exact for the polynomial pieces.
    """
    ref_u, ref_v = ReferenceSplines(p, k), ReferenceSplines(q, l)
    g = points or max(p, q) + 1
    s = int(shift)

    def block(fj, fi, width_j, width_i, rows, cols):
        lo, hi = max(0, s), min(width_j, s + width_i)
        if lo >= hi:
            return np.zeros((rows, cols))
        xg, wg = np.polynomial.legendre.leggauss(g)
        cells = np.arange(lo, hi)
        y = (cells[:, None] + 0.5 * (xg[None] + 1)).ravel()
        w = np.tile(0.5 * wg, cells.size)
        Fj = fj(y)          # (len(y), cols)
        Fi = fi(y - s)      # (len(y), rows)
        return Fi.T @ (w[:, None] * Fj)

    K = block(lambda y: ref_u.evaluate(y, 1), lambda y: ref_u.evaluate(y, 1),
              ref_u.eta, ref_u.eta, ref_u.count, ref_u.count)
    H = block(lambda y: ref_v.evaluate(y, 1), lambda y: ref_u.evaluate(y, 0),
              ref_v.eta, ref_u.eta, ref_u.count, ref_v.count)
    M = block(lambda y: ref_v.evaluate(y, 0), lambda y: ref_v.evaluate(y, 0),
              ref_v.eta, ref_v.eta, ref_v.count, ref_v.count)
    return K, H, M


def fem_symbols(p, k, q, l, points=None):
    """Trig-poly symbols ``kappa_[p,k]``, ``xi_[p,k;q,l]`` and ``mu_[q,l]``.

    Fourier coefficient ``s`` of each symbol is the reference block with
    shift ``s``; shifts range over ``|s| < max(eta(p,k), eta(q,l))``.
    """
    width = max(eta(p, k), eta(q, l))
    K, H, M = {}, {}, {}
    for s in range(-width + 1, width):
        K[(s,)], H[(s,)], M[(s,)] = reference_blocks(p, k, q, l, s, points)
    pk, ql = p - k, q - l
    return (TrigPolySymbol(K, 1, pk, pk), TrigPolySymbol(H, 1, pk, ql), TrigPolySymbol(M, 1, ql, ql))


def _embed(f, rows, cols, r0, c0):
    """Place every coefficient of ``f`` at offset ``(r0, c0)`` of a ``rows x cols`` zero matrix."""
    coeffs = {}
    for j, c in f.coeffs.items():
        big = np.zeros((rows, cols), dtype=complex)
        big[r0:r0 + f.r, c0:c0 + f.s] = c
        coeffs[j] = big
    return TrigPolySymbol(coeffs, 1, rows, cols)


def block_symbol(prob):
    """``[[a kappa, xi], [xi^*, -rho mu]]`` as a two-term separable symbol."""
    kap, xi, mu = fem_symbols(prob.p, prob.k, prob.q, prob.l)
    pk, ql = prob.p - prob.k, prob.q - prob.l
    size = pk + ql
    rest = (_embed(xi, size, size, 0, pk) + _embed(xi.adjoint(), size, size, pk, 0)
            + _embed(mu.scale(-prob.rho), size, size, pk, pk))
    return SeparableSymbol([(prob.a.expr, _embed(kap, size, size, 0, 0)), (1.0, rest)])


@dataclass
class ToeplitzCheck:
    """Outcome of comparing an expanded FE block with its Toeplitz counterpart."""
    block: str
    max_interior_dev: float
    worst_entry: tuple
    rank_remainder: int
    rank_bound: int
    tol: float

    @property
    def rank_ok(self):
        return self.rank_remainder <= self.rank_bound

    @property
    def passed(self):
        return self.max_interior_dev <= self.tol and self.rank_ok


def toeplitz_equality_check(prob, block='12', tol=1e-12, rank_tol=1e-10):
    """Check that an expanded FE block equals ``T_{n+m}(symbol)`` up to a low-rank boundary term.

    ``block='12'`` compares ``A12_hat`` with ``T_{n+m}(xi)``; ``'11'``
    compares ``A11_hat / n`` with ``a T_{n+m}(kappa)`` (``a`` constant);
    ``'22'`` compares ``n A22_hat`` with ``T_{n+m}(-rho mu)``. The interior
    submatrix must match to ``tol``; the remainder rank is reported against
    ``(m + nu_row) r + (m + nu_col) c``.

    Raises
    ------
    InvariantViolation
        If the interior submatrix deviates by more than ``tol``.
    """
    p, k, q, l, n, m = prob.p, prob.k, prob.q, prob.l, prob.n, prob.m
    pk, ql = p - k, q - l
    if n <= nu(p, k) + nu(q, l) + 2 * m:
        raise ArgumentError("n too small for an interior submatrix")
    A11, A12, A22 = assemble(prob)
    hats = expand_hats(prob, A11, A12, A22)
    kap, xi, mu = fem_symbols(p, k, q, l)
    if block == '12':
        hat, T = hats.A12, toeplitz(n + m, xi)
        (r, nr), (c, nc) = (pk, nu(p, k)), (ql, nu(q, l))
    elif block == '11':
        if prob.a.polynomial_degree() != 0:
            raise ArgumentError("block '11' needs a constant coefficient a")
        a0 = float(prob.a.evaluate(np.zeros((1, 1)))[0, 0, 0])
        hat, T = hats.A11 / n, a0 * toeplitz(n + m, kap)
        (r, nr), (c, nc) = (pk, nu(p, k)), (pk, nu(p, k))
    elif block == '22':
        hat, T = n * hats.A22, toeplitz(n + m, mu.scale(-prob.rho))
        (r, nr), (c, nc) = (ql, nu(q, l)), (ql, nu(q, l))
    else:
        raise ArgumentError(f"unknown block {block!r}")
    rows = slice(m * r, (n + m - nr) * r)
    cols = slice(m * c, (n + m - nc) * c)
    diff = np.abs(hat[rows, cols] - T[rows, cols])
    dev = float(diff.max(initial=0.0))
    worst = tuple(int(v) for v in np.unravel_index(np.argmax(diff), diff.shape)) if diff.size else ()
    worst = (worst[0] + rows.start, worst[1] + cols.start) if worst else ()
    sv = singular_values(hat - T)
    rank = int(np.count_nonzero(sv > rank_tol * max(1.0, sv[0] if sv.size else 0.0)))
    report = ToeplitzCheck(block, dev, worst, rank, (m + nr) * r + (m + nc) * c, tol)
    if dev > tol:
        raise InvariantViolation(f"block {block}: interior deviates by {dev:.3g} at {worst} (tol {tol})")
    return report
