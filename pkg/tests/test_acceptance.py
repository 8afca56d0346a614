"""Acceptance suite: one test per criterion, each logging a single pass/fail line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
"acceptance criteria" section of the terminal summary.
"""
import time
from itertools import product

import numpy as np

from acceptance_log import report
from rglt.distribution import (EIGEN, SINGULAR, EmpiricalSpectrum, acs_split, default_family,
                               discrepancy_sweep, empirical_functional, make_test_family,
                               symbol_values, zero_fraction)
from rglt.extension import identity_suite
from rglt.fem import (FEProblem, assemble, block_symbol, expand_hats,
                      normalized_block_matrix, schur_complement, toeplitz_equality_check)
from rglt.generators import block_assemble, glt9_approximant, random_zero_distributed, toeplitz
from rglt.linalg import eig_hermitian, perm_P, pinv, principal_submatrix
from rglt.rng import SplitMix64
from rglt.symbol import (GridSampledSymbol, SeparableSymbol, TrigPolySymbol,
                         fourier_coeffs_from_samples, sample_symbol, schur_symbol)

LAPLACIAN = TrigPolySymbol({(0,): 2.0, (1,): -1.0, (-1,): -1.0})
SHIFT_PAIR = TrigPolySymbol({(0,): [[1.0, 0.0]], (-1,): [[0.0, 1.0]]})


def constant_symbol(value, nodes=64):
    return GridSampledSymbol(1, (1, nodes), np.full((1, nodes, 1, 1), value))


def test_extension_identities():
    t0 = time.perf_counter()
    worst = identity_suite(instances=100, seed=2024)
    elapsed = time.perf_counter() - t0
    ok = (worst['permutation_form'] == 0.0
          and all(v <= 1e-12 for k, v in worst.items() if k != 'permutation_form')
          and elapsed < 5.0)
    detail = ', '.join(f"{k}={v:.1e}" for k, v in worst.items()) + f"; {elapsed:.2f}s"
    assert report(1, "extension identity suite", ok, detail)


def _int_matrix(rng, rows, cols):
    # small complex integers keep every product exact in floating point
    re = rng.integers(rows * cols, 7).reshape(rows, cols) - 3.0
    im = rng.integers(rows * cols, 7).reshape(rows, cols) - 3.0
    return re + 1j * im


def test_tensor_permutation_identities():
    t0 = time.perf_counter()
    rng = SplitMix64(7)
    sizes = range(1, 4)
    failures = []
    cases = 0
    for m1, n1, m2, n2 in product(sizes, repeat=4):
        X, Y = _int_matrix(rng, m1, n1), _int_matrix(rng, m2, n2)
        Z = _int_matrix(rng, m2, n2)
        a, b = 2 - 1j, -3 + 2j
        checks = {
            'transpose': (np.kron(X, Y).T, np.kron(X.T, Y.T)),
            'assoc': (np.kron(X, np.kron(Y, Z)), np.kron(np.kron(X, Y), Z)),
            'bilinear_left': (np.kron(a * Y + b * Z, X), a * np.kron(Y, X) + b * np.kron(Z, X)),
            'bilinear_right': (np.kron(X, a * Y + b * Z), a * np.kron(X, Y) + b * np.kron(X, Z)),
            'swap': (np.kron(Y, X), perm_P(m1, m2) @ np.kron(X, Y) @ perm_P(n1, n2).T),
        }
        for q1, q2 in product(sizes, repeat=2):
            X2, Y2 = _int_matrix(rng, n1, q1), _int_matrix(rng, n2, q2)
            checks[f'mixed_{q1}{q2}'] = (np.kron(X, Y) @ np.kron(X2, Y2), np.kron(X @ X2, Y @ Y2))
        # row-block description of P_{k1,k2}
        k1, k2 = m1, m2
        E = np.eye(k2)
        stacked = np.vstack([np.kron(np.eye(k1), E[i:i + 1]) for i in range(k2)])
        summed = sum(np.kron(np.kron(E[:, i:i + 1], np.eye(k1)), E[i:i + 1]) for i in range(k2))
        checks['P_rows'] = (perm_P(k1, k2), stacked)
        checks['P_sum'] = (perm_P(k1, k2), summed)
        for name, (lhs, rhs) in checks.items():
            cases += 1
            if not np.array_equal(lhs, rhs):
                failures.append((name, m1, n1, m2, n2))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 2.0
    assert report(2, "tensor/permutation suite", ok,
                  f"{cases} exact comparisons, {len(failures)} mismatches; {elapsed:.2f}s")


def test_szego_scalar():
    t0 = time.perf_counter()
    family = make_test_family((-1.0, 5.0), 9)
    g = sample_symbol(LAPLACIAN, (1, 16384))
    deltas, oracle_dev = {}, 0.0
    spectra = []
    for n in (32, 128, 1024):
        ev = eig_hermitian(toeplitz(n, LAPLACIAN), eigenvectors=False)
        exact = np.sort(2 - 2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
        oracle_dev = max(oracle_dev, np.abs(ev - exact).max())
        spectra.append((n, EmpiricalSpectrum(ev, n, EIGEN)))
    table = discrepancy_sweep(spectra, g, family, EIGEN)
    deltas = {n: table.delta(n) for n in (32, 128, 1024)}
    elapsed = time.perf_counter() - t0
    ok = (deltas[1024] <= 0.02 and deltas[1024] < deltas[128] < deltas[32]
          and oracle_dev < 1e-12 and elapsed < 60)
    assert report(3, "Szego scalar", ok,
                  f"delta(32,128,1024)=({deltas[32]:.4g}, {deltas[128]:.4g}, {deltas[1024]:.4g}), "
                  f"closed-form eig dev {oracle_dev:.1e}; {elapsed:.1f}s")


def test_rectangular_toeplitz():
    n = 256
    T = toeplitz(n, SHIFT_PAIR)
    spec = EmpiricalSpectrum.of(T, SINGULAR)
    ones = np.abs(spec.values - 1.0) < 1e-10
    roots = np.abs(spec.values - np.sqrt(2)) < 1e-10
    structure = bool(np.all(ones | roots)) and int(ones.sum()) == 1
    g = sample_symbol(SHIFT_PAIR, (1, 64))
    family = default_family(symbol_values(g, SINGULAR).ravel().tolist() + [1.0])
    table = discrepancy_sweep([(n, spec)], g, family, SINGULAR)
    bound = max(F.max_abs for F in family) / n + 1e-10
    ok = structure and table.delta(n) <= bound
    assert report(4, "rectangular Toeplitz", ok,
                  f"values in {{1, sqrt2}} with one 1: {structure}; delta={table.delta(n):.3g} <= {bound:.3g}")


def test_pseudoinverse():
    n = 256
    Tp = pinv(toeplitz(n, SHIFT_PAIR))
    g = constant_symbol(1 / np.sqrt(2))
    family = default_family([1 / np.sqrt(2), 1.0])
    table = discrepancy_sweep([(n, Tp)], g, family, SINGULAR)
    ok = table.delta(n) <= 0.02
    assert report(5, "pseudoinverse", ok, f"delta(256)={table.delta(n):.3g} <= 0.02")


def test_zero_distributed():
    c, omega = 0.05, 0.01
    family = default_family([0.0])
    g = constant_symbol(0.0)
    correction = max(float(np.max(np.abs(F(np.linspace(-omega, omega, 201)) - F(0.0)))) for F in family)
    bound = 0.05 * max(F.max_abs for F in family) + correction
    fracs, deltas = {}, {}
    for n in (64, 128, 256):
        A = random_zero_distributed(n, 1, 1, seed=n, rank_fraction=c, norm_eps=omega)
        spec = EmpiricalSpectrum.of(A, SINGULAR)
        fracs[n] = zero_fraction(spec, 0.02)
        deltas[n] = discrepancy_sweep([(n, spec)], g, family, SINGULAR).delta(n)
    ok = all(f >= 0.95 for f in fracs.values()) and all(d <= bound for d in deltas.values())
    assert report(6, "zero-distributed", ok,
                  "zero_fraction=" + ','.join(f"{fracs[n]:.3f}" for n in fracs)
                  + "; delta=" + ','.join(f"{deltas[n]:.3g}" for n in deltas) + f" <= {bound:.3g}")


def test_acs_fourier_truncation():
    n = 256
    full = fourier_coeffs_from_samples(np.abs, n - 1, 16 * n)
    A = toeplitz(n, full)
    theta = np.linspace(-np.pi, np.pi, 8193)[:, None]
    exact = full.evaluate(theta)[:, 0, 0]
    cs, omegas = [], []
    for m in range(1, 6):
        fm = TrigPolySymbol({j: v for j, v in full.coeffs.items() if abs(j[0]) <= m})
        omega = float(np.abs(exact - fm.evaluate(theta)[:, 0, 0]).max())
        entry = acs_split(A, toeplitz(n, fm), omega, level=m)
        cs.append(entry.rank_fraction)
        omegas.append(omega)
    ok = all(c == 0 for c in cs) and all(b <= a for a, b in zip(omegas, omegas[1:]))
    assert report(7, "a.c.s. of Fourier truncations", ok,
                  "c(m)=" + ','.join(f"{c:g}" for c in cs)
                  + "; omega(m)=" + ','.join(f"{w:.4f}" for w in omegas))


def test_toeplitz_structure():
    t0 = time.perf_counter()
    details, ok = [], True
    for p, k, q, l, m in ((1, 0, 1, 0, 0), (2, 0, 1, 0, 0), (3, 1, 2, 1, 1)):
        rep = toeplitz_equality_check(FEProblem(p, k, q, l, '1', 0.0, 16, m))
        ok &= rep.max_interior_dev <= 1e-12 and rep.rank_ok
        details.append(f"({p},{k},{q},{l},{m}): dev {rep.max_interior_dev:.1e}, "
                       f"rank {rep.rank_remainder}<={rep.rank_bound}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    assert report(8, "Toeplitz structure of A12", ok, '; '.join(details) + f"; {elapsed:.2f}s")


def test_schur_branch():
    t0 = time.perf_counter()
    axis = (1, 512)
    g = schur_symbol(1, 0, 1, 0, '1', 0.0, axis)
    # independent route: the closed form -(1 + cos theta) / 2 on the same nodes
    closed = -(1 + np.cos(g.theta_nodes()[:, 0])) / 2
    oracle_dev = float(np.abs(g.samples[0, :, 0, 0] - closed).max())
    family = make_test_family((-1.5, 0.5), 9)
    spectra = []
    for n in (32, 256):
        prob = FEProblem(1, 0, 1, 0, '1', 0.0, n)
        S = schur_complement(prob, *assemble(prob))
        spectra.append((n, n * S))
    table = discrepancy_sweep(spectra, g, family, EIGEN)
    d32, d256 = table.delta(32), table.delta(256)
    elapsed = time.perf_counter() - t0
    # xi^* kappa^{-1} xi cancels near theta = 0 (kappa ~ 4e-5 at the first node)
    ok = d256 <= 0.05 and d256 < d32 and oracle_dev < 1e-10 and elapsed < 60
    assert report(9, "Schur complement branch", ok,
                  f"delta(32)={d32:.4g}, delta(256)={d256:.4g}; symbol vs closed form {oracle_dev:.1e}; "
                  f"{elapsed:.1f}s")


def test_block_branch():
    n = 256
    tables, hat_tables, family = {}, {}, None
    for m in (0, 1):
        prob = FEProblem(1, 0, 1, 0, '1', 1.0, n, m)
        A11, A12, A22 = assemble(prob)
        g = sample_symbol(block_symbol(prob), (1, 512))
        if family is None:
            family = default_family(symbol_values(g, EIGEN))
        tables[m] = discrepancy_sweep([(n, normalized_block_matrix(prob, A11, A12, A22))], g, family, EIGEN)
        hats = expand_hats(prob, A11, A12, A22)
        hat_tables[m] = discrepancy_sweep([(n, hats.normalized(n))], g, family, EIGEN)

    def spread(tabs):
        return max(abs(a.empirical - b.empirical) for a, b in zip(tabs[0].rows, tabs[1].rows))

    delta = max(t.delta(n) for t in tables.values())
    ok = delta <= 0.05 and spread(tables) <= 1e-3
    assert report(10, "block matrix branch", ok,
                  f"delta(256)={delta:.4g}; m=0 vs m=1 table spread {spread(tables):.2g} "
                  f"(expanded-matrix variant: {spread(hat_tables):.4g})")


def test_variable_coefficient():
    n = 256
    prob = FEProblem(1, 0, 1, 0, '1+x1', 0.0, n, 0)
    A11, A12, A22 = assemble(prob)
    hat11 = expand_hats(prob, A11, A12, A22).A11 / n
    kappa = SeparableSymbol([('1+x1', LAPLACIAN)])
    g = sample_symbol(kappa, (256, 256))
    family = default_family(symbol_values(g, SINGULAR))
    delta = discrepancy_sweep([(n, hat11)], g, family, SINGULAR).delta(n)
    approx = glt9_approximant(n + prob.m, kappa)
    entry = acs_split(hat11, approx, 0.05)
    ok = delta <= 0.05 and entry.rank_fraction <= 4 / n
    assert report(11, "variable coefficient", ok,
                  f"delta(256)={delta:.4g}; acs c={entry.rank_fraction:.4g} (rank {entry.rank}) <= {4 / n:.4g}")


def _interleave_oracle(parts, N, r_sizes, s_sizes):
    """Block (I, J) of the result gathers block (I, J) of every part, by explicit loops."""
    r, s = sum(r_sizes), sum(s_sizes)
    out = np.zeros((N * r, N * s))
    for I, J in product(range(N), repeat=2):
        row0 = 0
        for i, ri in enumerate(r_sizes):
            col0 = 0
            for j, sj in enumerate(s_sizes):
                blk = parts[i][j][I * ri:(I + 1) * ri, J * sj:(J + 1) * sj]
                out[I * r + row0:I * r + row0 + ri, J * s + col0:J * s + col0 + sj] = blk
                col0 += sj
            row0 += ri
    return out


def test_block_assembly_unscrambling():
    rng = SplitMix64(11)
    cases = mismatches = 0
    for n in (1, 2, 3):
        for rho, vsig in product((1, 2), repeat=2):
            for r_sizes in product((1, 2), repeat=rho):
                for s_sizes in product((1, 2), repeat=vsig):
                    parts = [[rng.integers(n * ri * n * sj, 100).reshape(n * ri, n * sj) + 1.0
                              for sj in s_sizes] for ri in r_sizes]
                    B, A = block_assemble(parts, n)
                    cases += 1
                    if not (np.array_equal(A, _interleave_oracle(parts, n, r_sizes, s_sizes))
                            and np.array_equal(B, np.block(parts))):
                        mismatches += 1
    assert report(12, "block assembly unscrambling", mismatches == 0,
                  f"{cases} exhaustive cases, {mismatches} mismatches")


def test_projection_robustness():
    n = 400
    k = int(np.floor(np.sqrt(n)))
    T = toeplitz(n, LAPLACIAN)
    rng = SplitMix64(5)
    drop = set()
    while len(drop) < k:
        drop.add(int(rng.integers(1, n)[0]))
    keep = sorted(set(range(n)) - drop)
    P = principal_submatrix(T, keep, keep)
    family = make_test_family((-1.0, 5.0), 9)
    full = EmpiricalSpectrum.of(T, EIGEN)
    cut = EmpiricalSpectrum.of(P, EIGEN)
    change = max(abs(empirical_functional(full, F) - empirical_functional(cut, F)) for F in family)
    bound = 2 * k / n * max(F.max_abs for F in family)
    assert report(13, "projection robustness", change <= bound,
                  f"max functional change {change:.4g} <= {bound:.4g} (deleted {k})")
