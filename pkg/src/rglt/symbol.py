"""GLT symbols ``kappa : [0,1]^d x [-pi,pi]^d -> C^{r x s}``.

Three representations are used:

* :class:`TrigPolySymbol` -- finite Fourier series ``sum_j f_j e^{i j.theta}``
  with matrix coefficients; these generate Toeplitz matrices.
* :class:`SeparableSymbol` -- finite sums ``sum_i a_i(x) f_i(theta)`` with
  scalar coefficient functions ``a_i`` and trig-poly factors ``f_i``.
  Closed under ``+``, scalar ``*``, matrix product, adjoint and extension.
* :class:`GridSampledSymbol` -- samples on a uniform midpoint grid. Used
  for anything not closed in the separable class (pseudoinverses, Schur
  symbols) and as the quadrature substrate of the distribution functionals.
"""
import json
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ArgumentError, DomainError
from .expr import Expr, Num, parse_coeff

__all__ = ['TrigPolySymbol', 'CoefficientFunction', 'SeparableSymbol',
           'GridSampledSymbol', 'eval_symbol', 'sym_add', 'sym_scale', 'sym_mul',
           'sym_adjoint', 'sym_extend', 'sample_symbol', 'sym_pinv_grid',
           'schur_symbol', 'fourier_coeffs_from_samples', 'midpoint_nodes',
           'symbol_from_json', 'symbol_to_json']


def _theta_array(theta, d):
    theta = np.asarray(theta, dtype=float)
    if d == 1 and (theta.ndim == 0 or theta.shape[-1] != 1):
        theta = theta[..., None]
    if theta.shape[-1] != d:
        raise ArgumentError(f"expected points with {d} coordinates, got shape {theta.shape}")
    return theta


class TrigPolySymbol:
    """Matrix-valued trigonometric polynomial ``f(theta) = sum_j f_j e^{i j.theta}``.

    Parameters
    ----------
    coeffs : dict
        Maps d-tuples ``j`` to ``r x s`` coefficient matrices. Zero
        coefficients are dropped.
    d, r, s : int, optional
        Required only when ``coeffs`` is empty.
    """

    def __init__(self, coeffs, d=None, r=None, s=None):
        clean = {}
        for j, c in coeffs.items():
            j = (int(j),) if np.isscalar(j) else tuple(int(v) for v in j)
            c = np.atleast_2d(np.asarray(c, dtype=complex))
            if d is None:
                d = len(j)
            if r is None:
                r, s = c.shape
            if len(j) != d or c.shape != (r, s):
                raise ArgumentError(f"coefficient {j} has inconsistent size {c.shape} / dimension {len(j)}")
            if np.any(c != 0):
                clean[j] = clean.get(j, 0) + c
        if d is None or r is None:
            raise ArgumentError("empty symbol needs explicit d, r, s")
        self.d, self.r, self.s = int(d), int(r), int(s)
        self.coeffs = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, M, d=1):
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        return cls({(0,) * d: M}, d, *M.shape)

    @classmethod
    def zero(cls, d=1, r=1, s=1):
        return cls({}, d, r, s)

    @classmethod
    def identity(cls, size, d=1):
        return cls.constant(np.eye(size), d)

    # -- access -------------------------------------------------------------
    @property
    def shape(self):
        return (self.r, self.s)

    def coefficient(self, j):
        """Fourier coefficient ``f_j`` (zero matrix when absent)."""
        j = (int(j),) if np.isscalar(j) else tuple(int(v) for v in j)
        return self.coeffs.get(j, np.zeros((self.r, self.s), dtype=complex))

    def degree(self):
        """Largest ``|j_k|`` per axis among nonzero coefficients."""
        if not self.coeffs:
            return (0,) * self.d
        J = np.abs(np.array(list(self.coeffs)))
        return tuple(int(v) for v in J.max(axis=0))

    def __call__(self, theta):
        return self.evaluate(theta)

    def evaluate(self, theta):
        """Evaluate at ``theta`` of shape ``(..., d)`` (or scalar when ``d = 1``)."""
        theta = _theta_array(theta, self.d)
        out_shape = theta.shape[:-1] + (self.r, self.s)
        if not self.coeffs:
            return np.zeros(out_shape, dtype=complex)
        J = np.array(list(self.coeffs), dtype=float)
        C = np.array(list(self.coeffs.values()))
        phase = np.exp(1j * (theta @ J.T))
        return np.einsum('...k,krs->...rs', phase, C)

    # -- algebra ------------------------------------------------------------
    def _check_same(self, other):
        if (self.d, self.r, self.s) != (other.d, other.r, other.s):
            raise ArgumentError(f"size mismatch: {(self.d, self.r, self.s)} vs {(other.d, other.r, other.s)}")

    def __add__(self, other):
        self._check_same(other)
        coeffs = dict(self.coeffs)
        for j, c in other.coeffs.items():
            coeffs[j] = coeffs.get(j, 0) + c
        return TrigPolySymbol(coeffs, self.d, self.r, self.s)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, alpha):
        return TrigPolySymbol({j: alpha * c for j, c in self.coeffs.items()}, self.d, self.r, self.s)

    def __matmul__(self, other):
        """Product ``f(theta) g(theta)`` by convolution of Fourier coefficients."""
        if self.d != other.d or self.s != other.r:
            raise ArgumentError(f"cannot multiply {self.shape} by {other.shape} symbols")
        coeffs = {}
        for j, a in self.coeffs.items():
            for k, b in other.coeffs.items():
                jk = tuple(u + v for u, v in zip(j, k))
                coeffs[jk] = coeffs.get(jk, 0) + a @ b
        return TrigPolySymbol(coeffs, self.d, self.r, other.s)

    def adjoint(self):
        """``f*(theta) = sum_j (f_{-j})^* e^{i j.theta}``."""
        return TrigPolySymbol({tuple(-v for v in j): c.conj().T for j, c in self.coeffs.items()},
                              self.d, self.s, self.r)

    def extend(self, t):
        """Pad every coefficient with zero rows/columns to ``t x t``."""
        if t < max(self.r, self.s):
            raise ArgumentError(f"t={t} smaller than block size {self.shape}")
        coeffs = {}
        for j, c in self.coeffs.items():
            big = np.zeros((t, t), dtype=complex)
            big[:self.r, :self.s] = c
            coeffs[j] = big
        return TrigPolySymbol(coeffs, self.d, t, t)

    def restrict(self, rows, cols):
        """Same submatrix (0-based ``rows``/``cols``) of every coefficient."""
        rows, cols = list(rows), list(cols)
        return TrigPolySymbol({j: c[np.ix_(rows, cols)] for j, c in self.coeffs.items()},
                              self.d, len(rows), len(cols))

    def is_hermitian(self, tol=1e-13):
        if self.r != self.s:
            return False
        for j, c in self.coeffs.items():
            other = self.coefficient(tuple(-v for v in j))
            if np.max(np.abs(other - c.conj().T)) > tol:
                return False
        return True

    # -- serialization ------------------------------------------------------
    def to_dict(self):
        items = sorted(self.coeffs.items())
        return {'d': self.d, 'r': self.r, 's': self.s,
                'coeffs': [{'j': list(j), 're': c.real.tolist(), 'im': c.imag.tolist()}
                           for j, c in items]}

    @classmethod
    def from_dict(cls, data):
        coeffs = {}
        for item in data['coeffs']:
            c = np.asarray(item['re'], dtype=float) + 1j * np.asarray(item.get('im', 0.0), dtype=float)
            coeffs[tuple(item['j'])] = c
        return cls(coeffs, data['d'], data['r'], data['s'])

    def __repr__(self):
        return f"TrigPolySymbol(d={self.d}, r={self.r}, s={self.s}, terms={len(self.coeffs)})"


class CoefficientFunction:
    """Matrix of real expressions ``a(x) in R^{r x s}`` over ``x in [0,1]^d``.

    Evaluation producing a non-finite value (e.g. division by zero) raises
    :class:`DomainError` naming the offending point.
    """

    def __init__(self, entries, d=1):
        if isinstance(entries, (str, Expr)):
            entries = [[entries]]
        rows = [[parse_coeff(e) if isinstance(e, str) else e for e in row] for row in entries]
        if not rows or any(len(row) != len(rows[0]) for row in rows):
            raise ArgumentError("coefficient function entries must form a rectangle")
        self.entries = rows
        self.r, self.s = len(rows), len(rows[0])
        self.d = max([d] + [e.max_var() for row in rows for e in row])

    @classmethod
    def scalar(cls, text, d=1):
        return cls([[text]], d)

    @classmethod
    def times_identity(cls, text, size, d=1):
        """``a(x) I_size`` for a scalar expression ``a``."""
        a = parse_coeff(text) if isinstance(text, str) else text
        return cls([[a if i == j else Num(0.0) for j in range(size)] for i in range(size)], d)

    @property
    def is_scalar(self):
        return self.r == self.s == 1

    @property
    def expr(self):
        if not self.is_scalar:
            raise ArgumentError("not a scalar coefficient function")
        return self.entries[0][0]

    def polynomial_degree(self):
        degs = [e.polynomial_degree() for row in self.entries for e in row]
        return None if any(v is None for v in degs) else max(degs)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Evaluate at points ``x`` of shape ``(..., d)``; returns ``(..., r, s)``."""
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        if x.shape[-1] < self.d:
            raise ArgumentError(f"expected {self.d} coordinates, got {x.shape[-1]}")
        xs = tuple(x[..., k] for k in range(x.shape[-1]))
        out = np.empty(x.shape[:-1] + (self.r, self.s))
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            for i, row in enumerate(self.entries):
                for j, e in enumerate(row):
                    out[..., i, j] = e.evaluate(xs)
        bad = ~np.isfinite(out)
        if np.any(bad):
            idx = np.argwhere(bad.reshape(x.shape[:-1] + (-1,)).any(axis=-1))
            point = x[tuple(idx[0])] if idx.size else x
            raise DomainError(f"coefficient function undefined at x={np.round(point, 15).tolist()}")
        return out

    def to_string(self):
        if self.is_scalar:
            return self.expr.to_string()
        return [[e.to_string() for e in row] for row in self.entries]

    def __repr__(self):
        return f"CoefficientFunction({self.to_string()!r})"


@dataclass
class SeparableSymbol:
    """``kappa(x, theta) = sum_i a_i(x) f_i(theta)``.

    ``terms`` is a list of ``(a_i, f_i)`` with ``a_i`` a scalar
    :class:`~rglt.expr.Expr` and ``f_i`` a :class:`TrigPolySymbol`. All
    ``f_i`` share ``(d, r, s)``.
    """
    terms: list
    d: int = None
    r: int = None
    s: int = None

    def __post_init__(self):
        terms = []
        for a, f in self.terms:
            if isinstance(a, str):
                a = parse_coeff(a)
            elif isinstance(a, CoefficientFunction):
                a = a.expr
            elif not isinstance(a, Expr):
                a = Num(float(a))
            terms.append((a, f))
        self.terms = terms
        for _, f in terms:
            dims = (f.d, f.r, f.s)
            if self.d is None:
                self.d, self.r, self.s = dims
            elif (self.d, self.r, self.s) != dims:
                raise ArgumentError(f"terms disagree in size: {(self.d, self.r, self.s)} vs {dims}")
        if self.d is None:
            raise ArgumentError("empty separable symbol needs explicit d, r, s")
        for a, _ in terms:
            if a.max_var() > self.d:
                raise ArgumentError(f"coefficient {a} uses more than {self.d} space variables")

    @classmethod
    def from_trig(cls, f, a=1.0):
        return cls([(a, f)])

    @classmethod
    def zero(cls, d=1, r=1, s=1):
        return cls([], d, r, s)

    @property
    def shape(self):
        return (self.r, self.s)

    def coefficient_values(self, x):
        """Values of every ``a_i`` at points ``x`` of shape ``(..., d)``; shape ``(..., terms)``."""
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        vals = []
        for a, _ in self.terms:
            vals.append(CoefficientFunction([[a]], self.d).evaluate(x)[..., 0, 0])
        if not vals:
            return np.zeros(x.shape[:-1] + (0,))
        return np.stack(vals, axis=-1)

    def evaluate(self, x, theta):
        """Evaluate at a single point or broadcastable arrays of points."""
        av = self.coefficient_values(x)
        theta = _theta_array(theta, self.d)
        out = np.zeros(np.broadcast_shapes(av.shape[:-1], theta.shape[:-1]) + (self.r, self.s),
                       dtype=complex)
        for i, (_, f) in enumerate(self.terms):
            out = out + av[..., i, None, None] * f.evaluate(theta)
        return out

    def __call__(self, x, theta):
        return self.evaluate(x, theta)

    def to_dict(self):
        return {'terms': [{'a': a.to_string(), 'f': f.to_dict()} for a, f in self.terms],
                'd': self.d, 'r': self.r, 's': self.s}

    @classmethod
    def from_dict(cls, data):
        terms = [(parse_coeff(str(t['a'])), TrigPolySymbol.from_dict(t['f'])) for t in data['terms']]
        return cls(terms, data.get('d'), data.get('r'), data.get('s'))


def _as_separable(kappa):
    if isinstance(kappa, SeparableSymbol):
        return kappa
    if isinstance(kappa, TrigPolySymbol):
        return SeparableSymbol.from_trig(kappa)
    raise ArgumentError(f"expected a symbol, got {type(kappa).__name__}")


def eval_symbol(kappa, x, theta):
    """Evaluate a separable or trig-poly symbol at ``(x, theta)``."""
    if isinstance(kappa, TrigPolySymbol):
        return kappa.evaluate(theta)
    return _as_separable(kappa).evaluate(x, theta)


def sym_add(kappa, xi):
    kappa, xi = _as_separable(kappa), _as_separable(xi)
    if (kappa.d, kappa.r, kappa.s) != (xi.d, xi.r, xi.s):
        raise ArgumentError(f"cannot add {kappa.shape} and {xi.shape} symbols")
    return SeparableSymbol(kappa.terms + xi.terms, kappa.d, kappa.r, kappa.s)


def sym_scale(alpha, kappa):
    # complex factors go into the Fourier coefficients; the a_i stay real
    kappa = _as_separable(kappa)
    return SeparableSymbol([(a, f.scale(alpha)) for a, f in kappa.terms], kappa.d, kappa.r, kappa.s)


def _mul_expr(a, b):
    if a == Num(1.0):
        return b
    if b == Num(1.0):
        return a
    return a * b


def sym_mul(kappa, xi):
    """Termwise product; trig factors multiplied by coefficient convolution."""
    kappa, xi = _as_separable(kappa), _as_separable(xi)
    if kappa.d != xi.d or kappa.s != xi.r:
        raise ArgumentError(f"cannot multiply {kappa.shape} by {xi.shape} symbols")
    terms = [(_mul_expr(a, b), f @ g) for a, f in kappa.terms for b, g in xi.terms]
    return SeparableSymbol(terms, kappa.d, kappa.r, xi.s)


def sym_adjoint(kappa):
    """Pointwise conjugate transpose (coefficient functions are real)."""
    kappa = _as_separable(kappa)
    return SeparableSymbol([(a, f.adjoint()) for a, f in kappa.terms], kappa.d, kappa.s, kappa.r)


def sym_extend(kappa, t):
    """Zero-pad the symbol to ``t x t`` values."""
    kappa = _as_separable(kappa)
    if t < max(kappa.r, kappa.s):
        raise ArgumentError(f"t={t} smaller than symbol size {kappa.shape}")
    return SeparableSymbol([(a, f.extend(t)) for a, f in kappa.terms], kappa.d, t, t)


def midpoint_nodes(count, low, high):
    h = (high - low) / count
    return low + h * (np.arange(count) + 0.5)


def _lex_nodes(counts, low, high):
    axes = [midpoint_nodes(c, low, high) for c in counts]
    return np.array(list(product(*axes))).reshape(-1, len(counts))


@dataclass
class GridSampledSymbol:
    """Samples of a symbol on the midpoint grid of ``[0,1]^d x [-pi,pi]^d``.

    ``axis_counts`` lists the ``d`` space counts followed by the ``d``
    frequency counts. ``samples`` has shape ``(Nx, Ntheta, r, s)`` with both
    node sets in lexicographic order.
    """
    d: int
    axis_counts: tuple
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.axis_counts = tuple(int(c) for c in self.axis_counts)
        if len(self.axis_counts) != 2 * self.d:
            raise ArgumentError("axis_counts needs d space counts and d frequency counts")
        nx, nt = self.node_counts
        if self.samples.shape[:2] != (nx, nt):
            raise ArgumentError(f"samples shape {self.samples.shape} does not match grid {(nx, nt)}")

    @property
    def node_counts(self):
        return (int(np.prod(self.axis_counts[:self.d])), int(np.prod(self.axis_counts[self.d:])))

    @property
    def shape(self):
        return self.samples.shape[2:]

    def x_nodes(self):
        return _lex_nodes(self.axis_counts[:self.d], 0.0, 1.0)

    def theta_nodes(self):
        return _lex_nodes(self.axis_counts[self.d:], -np.pi, np.pi)

    def flat(self):
        """All samples as an ``(Nx*Ntheta, r, s)`` array."""
        return self.samples.reshape((-1,) + self.shape)


def _grid_counts(axis_counts, d):
    counts = tuple(int(c) for c in axis_counts)
    if len(counts) != 2 * d:
        raise ArgumentError(f"need {2 * d} axis counts for d={d}, got {counts}")
    if any(c < 1 for c in counts):
        raise ArgumentError("axis counts must be >= 1")
    return counts


def sample_symbol(kappa, axis_counts, d=None):
    """Evaluate a symbol at the midpoint nodes of the grid.

    ``kappa`` may be a :class:`TrigPolySymbol`, a :class:`SeparableSymbol`
    or a callable ``(x_nodes, theta_nodes) -> (Nx, Ntheta, r, s)``.
    """
    if d is None:
        d = getattr(kappa, 'd', None) or len(axis_counts) // 2
    counts = _grid_counts(axis_counts, d)
    xs, ths = _lex_nodes(counts[:d], 0.0, 1.0), _lex_nodes(counts[d:], -np.pi, np.pi)
    if isinstance(kappa, TrigPolySymbol):
        vals = kappa.evaluate(ths)
        samples = np.broadcast_to(vals[None], (xs.shape[0],) + vals.shape).copy()
    elif isinstance(kappa, SeparableSymbol):
        try:
            av = kappa.coefficient_values(xs)
        except DomainError as exc:
            raise DomainError(f"sampling failed: {exc}") from exc
        samples = np.zeros((xs.shape[0], ths.shape[0], kappa.r, kappa.s), dtype=complex)
        for i, (_, f) in enumerate(kappa.terms):
            samples += av[:, i, None, None, None] * f.evaluate(ths)[None]
    else:
        samples = np.asarray(kappa(xs, ths))
    return GridSampledSymbol(d, counts, samples)


def sym_pinv_grid(g, rel_tol=1e-12):
    """Pointwise Moore-Penrose pseudoinverse of grid samples."""
    flat = g.flat()
    inv = np.linalg.pinv(flat, rcond=rel_tol)
    nx, nt = g.node_counts
    return GridSampledSymbol(g.d, g.axis_counts, inv.reshape((nx, nt) + inv.shape[1:]))


def schur_symbol(p, k, q, l, a, rho, axis_counts, rel_tol=1e-12):
    """Samples of ``-rho mu(theta) - xi(theta)^* kappa(theta)^{-1} xi(theta) / a(x)``.

    ``kappa``, ``xi``, ``mu`` are the B-spline FE symbols of
    :func:`rglt.fem.fem_symbols`. ``kappa^{-1}`` is taken pointwise through
    the SVD with cutoff ``rel_tol``; a rank-deficient node is an error.

    Raises
    ------
    DomainError
        If ``a`` vanishes or ``kappa`` is singular at a grid node.
    """
    from .fem import fem_symbols

    kap, xi, mu = fem_symbols(p, k, q, l)
    if not isinstance(a, CoefficientFunction):
        a = CoefficientFunction.scalar(str(a) if not isinstance(a, Expr) else a)
    counts = _grid_counts(axis_counts, 1)
    xs = midpoint_nodes(counts[0], 0.0, 1.0)
    ths = midpoint_nodes(counts[1], -np.pi, np.pi)
    av = a.evaluate(xs[:, None])[:, 0, 0]
    zero = np.flatnonzero(av == 0)
    if zero.size:
        raise DomainError(f"a(x) = 0 at grid node x={xs[zero[0]]!r}")
    K = kap.evaluate(ths)
    sv = np.linalg.svd(K, compute_uv=False)
    singular = np.flatnonzero(sv[:, -1] <= rel_tol * sv[:, 0])
    if singular.size:
        raise DomainError(f"kappa singular at grid node theta={ths[singular[0]]!r}")
    Kinv = np.linalg.pinv(K, rcond=rel_tol)
    X = xi.evaluate(ths)
    core = np.conj(np.swapaxes(X, -1, -2)) @ Kinv @ X
    samples = -rho * mu.evaluate(ths)[None] - core[None] / av[:, None, None, None]
    return GridSampledSymbol(1, counts, samples)


def fourier_coeffs_from_samples(f, cutoff, samples_per_axis, d=1):
    """Trapezoidal (DFT) approximation of Fourier coefficients ``|j_k| <= cutoff_k``.

    ``f`` maps an array of points ``(..., d)`` in ``[-pi, pi]^d`` to values of
    shape ``(..., r, s)`` (scalar outputs are promoted to ``1 x 1``).
    Exact for trigonometric polynomials of degree below ``samples - cutoff``.
    """
    cut = (int(cutoff),) * d if np.isscalar(cutoff) else tuple(int(c) for c in cutoff)
    S = (int(samples_per_axis),) * d if np.isscalar(samples_per_axis) else tuple(int(v) for v in samples_per_axis)
    if len(cut) != d or len(S) != d:
        raise ArgumentError("cutoff and samples_per_axis need one entry per axis")
    if any(sk <= 2 * ck for sk, ck in zip(S, cut)):
        raise ArgumentError("samples_per_axis must exceed 2*cutoff")
    axes = [-np.pi + 2 * np.pi * np.arange(sk) / sk for sk in S]
    mesh = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
    if d == 1:
        try:
            vals = np.asarray(f(mesh[..., 0]), dtype=complex)
        except Exception:
            vals = np.array([f(t) for t in mesh[..., 0]], dtype=complex)
    else:
        vals = np.asarray(f(mesh), dtype=complex)
    if vals.ndim == d:
        vals = vals[..., None, None]
    r, s = vals.shape[-2:]
    F = np.fft.fftn(vals, axes=tuple(range(d))) / np.prod(S)
    coeffs = {}
    for j in product(*(range(-c, c + 1) for c in cut)):
        # theta_0 = -pi shifts the DFT phase by e^{i j pi} = (-1)^j
        sign = (-1.0) ** (sum(j) % 2)
        coeffs[j] = sign * F[tuple(jk % sk for jk, sk in zip(j, S))]
    return TrigPolySymbol(coeffs, d, r, s)


def symbol_from_json(text_or_dict):
    """Load a TrigPolySymbol (``coeffs`` key) or SeparableSymbol (``terms`` key)."""
    data = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    if 'terms' in data:
        return SeparableSymbol.from_dict(data)
    return TrigPolySymbol.from_dict(data)


def symbol_to_json(kappa):
    return json.dumps(kappa.to_dict())
