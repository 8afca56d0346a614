"""Singular value and eigenvalue distribution functionals.

The matrix side of a distribution statement is the average
``(1/(d_n ^ e_n)) sum_i F(sigma_i(A_n))``; the symbol side is the
normalized integral of ``(1/(r ^ s)) sum_i F(sigma_i(kappa(x, theta)))``
over ``[0,1]^d x [-pi,pi]^d``, computed here by the midpoint rule on a
:class:`~rglt.symbol.GridSampledSymbol`. Eigenvalue mode is restricted to
Hermitian matrices and Hermitian-valued symbols.

A discrepancy sweep compares both sides over a family of test functions
and a list of sizes ``n``; its maximum error ``delta(n)`` should decrease
toward zero when the distribution statement holds.
"""
import csv
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .linalg import eig_hermitian, singular_values, svd
from .symbol import GridSampledSymbol, sample_symbol

__all__ = ['TestFunction', 'EmpiricalSpectrum', 'ACSEntry', 'empirical_functional',
           'symbol_values', 'symbol_functional', 'discrepancy_sweep', 'SweepTable',
           'zero_fraction', 'acs_split', 'make_test_family', 'default_family']

SINGULAR, EIGEN = 'singular', 'eigen'


@dataclass(frozen=True)
class TestFunction:
    """Triangular bump ``max(0, 1 - |y - center| / half_width)``."""
    __test__ = False  # keep pytest from collecting this class

    center: float
    half_width: float
    label: str = None

    def __post_init__(self):
        if self.half_width <= 0:
            raise ArgumentError("half_width must be positive")
        if self.label is None:
            object.__setattr__(self, 'label', f"bump(c={self.center:.6g},h={self.half_width:.6g})")

    def __call__(self, y):
        y = np.asarray(y)
        return np.maximum(0.0, 1.0 - np.abs(y - self.center) / self.half_width)

    @property
    def max_abs(self):
        return 1.0

    @property
    def lipschitz(self):
        return 1.0 / self.half_width


@dataclass
class EmpiricalSpectrum:
    """Sorted singular values or eigenvalues of one matrix.

    ``count_basis`` is ``min(d_n, e_n)`` for singular values and ``d_n``
    for eigenvalues.
    """
    values: np.ndarray
    count_basis: int
    mode: str = SINGULAR

    def __post_init__(self):
        self.values = np.sort(np.asarray(self.values, dtype=float))
        if self.mode not in (SINGULAR, EIGEN):
            raise ArgumentError(f"unknown mode {self.mode!r}")

    @classmethod
    def of(cls, A, mode=SINGULAR):
        A = np.asarray(A)
        if mode == SINGULAR:
            return cls(singular_values(A), min(A.shape), SINGULAR)
        if mode == EIGEN:
            return cls(eig_hermitian(A, eigenvectors=False), A.shape[0], EIGEN)
        raise ArgumentError(f"unknown mode {mode!r}")


def empirical_functional(spec, F):
    """``(1 / count_basis) * sum_i F(value_i)``."""
    if spec.count_basis == 0:
        return 0.0
    return float(np.sum(F(spec.values)) / spec.count_basis)


def symbol_values(g, mode=SINGULAR, tol=1e-10):
    """Pointwise singular values or eigenvalues of grid samples, shape ``(nodes, k)``."""
    flat = g.flat()
    if mode == SINGULAR:
        return np.linalg.svd(flat, compute_uv=False)
    if mode == EIGEN:
        if flat.shape[-1] != flat.shape[-2]:
            raise ArgumentError("eigen mode needs square symbol values")
        dev = np.abs(flat - np.conj(np.swapaxes(flat, -1, -2))).max(initial=0.0)
        scale = max(1.0, np.abs(flat).max(initial=0.0))
        if dev > tol * scale:
            raise ArgumentError(f"symbol samples are not Hermitian (deviation {dev:.3g})")
        return np.linalg.eigvalsh(0.5 * (flat + np.conj(np.swapaxes(flat, -1, -2))))
    raise ArgumentError(f"unknown mode {mode!r}")


def symbol_functional(g, F, mode=SINGULAR):
    """Midpoint-rule value of the normalized symbol integral for ``F``."""
    return float(np.mean(F(symbol_values(g, mode))))


SweepRow = namedtuple('SweepRow', ['n', 'test_fn', 'empirical', 'symbol', 'abs_err'])


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)

    def delta(self, n):
        """Maximum absolute error over the family at size ``n``."""
        errs = [row.abs_err for row in self.rows if row.n == n]
        if not errs:
            raise KeyError(n)
        return max(errs)

    @property
    def sizes(self):
        return list(dict.fromkeys(row.n for row in self.rows))

    def to_csv(self, path_or_file):
        """Write ``n,test_fn,empirical,symbol,abs_err`` with ``%.12g`` numbers and LF endings."""
        close = False
        if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, '__fspath__'):
            fh = open(path_or_file, 'w', newline='')
            close = True
        else:
            fh = path_or_file
        try:
            writer = csv.writer(fh, lineterminator='\n')
            writer.writerow(SweepRow._fields)
            for row in self.rows:
                n = row.n if np.isscalar(row.n) else 'x'.join(str(v) for v in row.n)
                writer.writerow([n, row.test_fn] + ['%.12g' % v for v in row[2:]])
        finally:
            if close:
                fh.close()


def discrepancy_sweep(matrices, symbol, family, mode=SINGULAR, axis_counts=None):
    """Compare empirical and symbol functionals for every ``(n, F)``.

    Parameters
    ----------
    matrices : iterable of (n, matrix or EmpiricalSpectrum)
    symbol : GridSampledSymbol, or a symbol sampled on ``axis_counts``
    family : list of TestFunction
    mode : {'singular', 'eigen'}
    """
    if not isinstance(symbol, GridSampledSymbol):
        if axis_counts is None:
            raise ArgumentError("axis_counts needed to sample a non-grid symbol")
        symbol = sample_symbol(symbol, axis_counts)
    svals = symbol_values(symbol, mode)
    sym_side = [float(np.mean(F(svals))) for F in family]
    table = SweepTable()
    for n, A in matrices:
        spec = A if isinstance(A, EmpiricalSpectrum) else EmpiricalSpectrum.of(A, mode)
        for F, s in zip(family, sym_side):
            e = empirical_functional(spec, F)
            table.rows.append(SweepRow(n, F.label, e, s, abs(e - s)))
    return table


def zero_fraction(spec, eps=0.0):
    """Fraction of the spectrum with ``|value| <= eps``."""
    if eps < 0:
        raise ArgumentError("eps must be nonnegative")
    if spec.values.size == 0:
        return 0.0
    return float(np.mean(np.abs(spec.values) <= eps))


@dataclass
class ACSEntry:
    """One splitting ``A - B = R + N`` by SVD truncation at ``threshold``."""
    level: object
    rank: int
    rank_fraction: float
    norm_bound: float
    threshold: float


def acs_split(A, B, norm_threshold, level=None, return_parts=False):
    """Split ``A - B`` into a low-rank part (singular values above the threshold) and a small-norm rest.

    Truncated SVD is the optimal rank/norm trade-off (Eckart-Young), so no
    other splitting can report a smaller rank for the same norm bound.
    """
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        raise ArgumentError(f"shape mismatch {A.shape} vs {B.shape}")
    if norm_threshold < 0:
        raise ArgumentError("norm_threshold must be nonnegative")
    D = A - B
    basis = min(D.shape)
    if return_parts:
        U, s, V = svd(D, full_matrices=False)
    else:
        s = singular_values(D)
    big = s > norm_threshold
    rank = int(np.count_nonzero(big))
    rest = s[~big]
    entry = ACSEntry(level, rank, rank / basis if basis else 0.0,
                     float(rest.max()) if rest.size else 0.0, float(norm_threshold))
    if not return_parts:
        return entry
    R = (U[:, big] * s[big]) @ V[:, big].conj().T
    return entry, R, D - R


def make_test_family(value_range, count):
    """Triangular bumps at equispaced centers spanning ``value_range``; half-width = spacing."""
    lo, hi = (float(v) for v in value_range)
    if not lo < hi:
        raise ArgumentError("need lo < hi")
    if count < 1:
        raise ArgumentError("count must be >= 1")
    if count == 1:
        return [TestFunction(0.5 * (lo + hi), 0.5 * (hi - lo))]
    centers = np.linspace(lo, hi, count)
    h = (hi - lo) / (count - 1)
    return [TestFunction(float(c), h) for c in centers]


def default_family(values, count=9):
    """Family spanning ``[min(values) - 1, max(values) + 1]``."""
    values = np.asarray(values, dtype=float)
    return make_test_family((values.min() - 1.0, values.max() + 1.0), count)
