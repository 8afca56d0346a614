from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rglt.errors import ArgumentError, DomainError
from rglt.generators import (block_assemble, diag_sampling, get_block, glt9_approximant,
                             random_zero_distributed, restrict_blocks, toeplitz)
from rglt.linalg import singular_values
from rglt.symbol import CoefficientFunction, SeparableSymbol, TrigPolySymbol

LAP = TrigPolySymbol({(0,): 2.0, (1,): -1.0, (-1,): -1.0})
SHIFT_PAIR = TrigPolySymbol({(0,): [[1.0, 0.0]], (-1,): [[0.0, 1.0]]})


def tridiag(n):
    return 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)


def random_trig(rng, r, s, degree=2, d=1):
    coeffs = {}
    for j in product(range(-degree, degree + 1), repeat=d):
        coeffs[j] = rng.standard_normal((r, s)) + 1j * rng.standard_normal((r, s))
    return TrigPolySymbol(coeffs, d, r, s)


def toeplitz_oracle(n, f):
    """Entry-by-entry ``[f_{i-j}]`` over lexicographic multi-indices."""
    idx = list(product(*(range(k) for k in n)))
    T = np.zeros((len(idx) * f.r, len(idx) * f.s), dtype=complex)
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            T[a * f.r:(a + 1) * f.r, b * f.s:(b + 1) * f.s] = f.coefficient(tuple(u - v for u, v in zip(i, j)))
    return T


def test_toeplitz_examples():
    assert np.array_equal(toeplitz(4, LAP), tridiag(4))
    assert np.array_equal(toeplitz(2, SHIFT_PAIR), [[1, 0, 0, 1], [0, 0, 1, 0]])
    T = toeplitz((2, 2), TrigPolySymbol({(1, 0): 1.0}))
    expected = np.zeros((4, 4))
    expected[2, 0] = expected[3, 1] = 1
    assert np.array_equal(T, expected)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=2), st.integers(1, 2), st.integers(1, 2),
       st.integers(0, 2 ** 32 - 1))
def test_toeplitz_matches_oracle(n, r, s, seed):
    rng = np.random.default_rng(seed)
    f = random_trig(rng, r, s, degree=2, d=len(n))
    T = toeplitz(tuple(n), f)
    assert np.array_equal(T, toeplitz_oracle(n, f))
    assert np.array_equal(T.conj().T, toeplitz(tuple(n), f.adjoint()))
    sq = f.restrict(range(min(r, s)), range(min(r, s)))
    h = toeplitz(tuple(n), sq + sq.adjoint())
    assert np.array_equal(h, h.conj().T)


def test_toeplitz_real_when_coefficients_real():
    assert not np.iscomplexobj(toeplitz(5, LAP))
    assert np.iscomplexobj(toeplitz(3, TrigPolySymbol({(1,): 1j})))


def test_toeplitz_dimension_mismatch():
    with pytest.raises(ArgumentError):
        toeplitz((2, 2), LAP)


def test_diag_sampling_examples():
    assert np.allclose(diag_sampling(4, "x1"), np.diag([0.25, 0.5, 0.75, 1.0]))
    assert np.allclose(diag_sampling((2, 2), CoefficientFunction.scalar("x1*x2", 2)),
                       np.diag([0.25, 0.5, 0.5, 1.0]))
    assert np.allclose(diag_sampling(2, CoefficientFunction.times_identity("x1", 2)),
                       np.diag([0.5, 0.5, 1.0, 1.0]))
    assert np.allclose(diag_sampling(3, lambda x: x ** 2), np.diag([1 / 9, 4 / 9, 1.0]))


def test_diag_sampling_product_exact():
    a, b = "1+x1", "cos(x1)"
    lhs = diag_sampling(7, f"({a})*({b})")
    assert np.array_equal(lhs, diag_sampling(7, a) @ diag_sampling(7, b))


def test_diag_sampling_domain_error():
    with pytest.raises(DomainError, match=r"i=\(2,\)"):
        diag_sampling(4, "1/(x1-0.5)")


def test_glt9_examples():
    assert np.allclose(glt9_approximant(4, LAP), tridiag(4))
    x_only = SeparableSymbol([("x1", TrigPolySymbol.constant(1.0))])
    assert np.allclose(glt9_approximant(3, x_only), np.diag([1 / 3, 2 / 3, 1.0]))
    both = SeparableSymbol([("x1", LAP)])
    assert np.allclose(glt9_approximant(3, both), np.diag([1 / 3, 2 / 3, 1.0]) @ tridiag(3))


def test_random_zero_distributed_contracts():
    assert not np.any(random_zero_distributed(10, 1, 1))
    E = random_zero_distributed(20, 2, 1, seed=3, norm_eps=0.1)
    assert singular_values(E)[0] <= 0.1 + 1e-14
    R = random_zero_distributed(50, 1, 1, seed=4, rank_fraction=0.1)
    s = singular_values(R)
    assert np.count_nonzero(s > 1e-12 * s[0]) <= 5
    assert np.array_equal(random_zero_distributed(8, 1, 2, seed=9, rank_fraction=0.5, norm_eps=0.2),
                          random_zero_distributed(8, 1, 2, seed=9, rank_fraction=0.5, norm_eps=0.2))
    with pytest.raises(ArgumentError):
        random_zero_distributed(4, 1, 1, rank_fraction=1.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_restriction_commutes_with_toeplitz(n, r, s, seed):
    rng = np.random.default_rng(seed)
    f = random_trig(rng, r, s)
    rows = sorted(rng.choice(r, size=rng.integers(1, r + 1), replace=False))
    cols = sorted(rng.choice(s, size=rng.integers(1, s + 1), replace=False))
    assert np.array_equal(restrict_blocks(toeplitz(n, f), r, s, rows, cols),
                          toeplitz(n, f.restrict(rows, cols)))


def test_block_assemble_single_part():
    X = np.arange(12.0).reshape(4, 3)
    B, A = block_assemble([[X]], 1)
    assert np.array_equal(A, X) and np.array_equal(B, X)


def test_block_assemble_scalar_example():
    c = np.array([[1.0, 2.0], [3.0, 4.0]])
    parts = [[c[i, j] * np.eye(2) for j in range(2)] for i in range(2)]
    _, A = block_assemble(parts, 2)
    expected = np.kron(np.eye(2), c)
    assert np.array_equal(A, expected)


def _assemble_oracle(parts, N, r_sizes, s_sizes):
    r, s = sum(r_sizes), sum(s_sizes)
    ro, so = np.cumsum([0] + r_sizes), np.cumsum([0] + s_sizes)
    A = np.zeros((N * r, N * s))
    for i, j, I, J in product(range(len(r_sizes)), range(len(s_sizes)), range(N), range(N)):
        blk = get_block(parts[i][j], I, J, r_sizes[i], s_sizes[j])
        A[I * r + ro[i]:I * r + ro[i + 1], J * s + so[j]:J * s + so[j + 1]] = blk
    return A


@pytest.mark.parametrize("n", [1, 2, 3, (2, 1)])
def test_block_assemble_exhaustive(n):
    N = int(np.prod(n))
    rng = np.random.default_rng(11)
    for r_sizes in product([1, 2], repeat=2):
        for s_sizes in product([1, 2], repeat=2):
            parts = [[rng.standard_normal((N * ri, N * sj)) for sj in s_sizes] for ri in r_sizes]
            B, A = block_assemble(parts, n)
            assert np.array_equal(B, np.block(parts))
            assert np.array_equal(A, _assemble_oracle(parts, N, list(r_sizes), list(s_sizes)))


def test_block_assemble_rejects_bad_shapes():
    with pytest.raises(ArgumentError):
        block_assemble([[np.zeros((3, 2))]], 2)
    with pytest.raises(ArgumentError):
        block_assemble([[np.zeros((2, 2)), np.zeros((2, 2))], [np.zeros((2, 2))]], 2)
