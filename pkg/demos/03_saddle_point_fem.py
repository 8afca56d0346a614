"""
A B-spline saddle-point system and its Schur complement
=======================================================

Discretizing a first-order system with B-splines gives a 2x2 block matrix
[[A11, A12], [A12^T, A22]]. After rescaling, its eigenvalues follow a 2x2
matrix-valued symbol, and n times the Schur complement follows
-rho mu(theta) - |xi(theta)|^2 / (a(x) kappa(theta)).
"""
# %%
import numpy as np

from rglt.fem import (FEProblem, assemble, fem_symbols, normalized_block_matrix, schur_complement,
                      toeplitz_equality_check)
from rglt.distribution import EIGEN, discrepancy_sweep, make_test_family
from rglt.symbol import schur_symbol

prob = FEProblem(p=1, k=0, q=1, l=0, a="1", rho=0.0, n=8)
A11, A12, A22 = assemble(prob)
print("A11 =\n", A11)
print("A12 =\n", A12)

# %%
kap, xi, mu = fem_symbols(1, 0, 1, 0)
for name, f in (("kappa", kap), ("xi", xi), ("mu", mu)):
    print(name, {j[0]: round(complex(c[0, 0]).real, 6) for j, c in sorted(f.coeffs.items())})

# %%
# Away from the boundary, the padded blocks are exactly Toeplitz.
check = toeplitz_equality_check(FEProblem(3, 1, 2, 1, n=12), '12')
print(check)

# %%
# n S_n against the Schur symbol; for p = q = 1 it reduces to -(1 + cos theta)/2.
g = schur_symbol(1, 0, 1, 0, "1", 0.0, (8, 2048))
family = make_test_family((-1.5, 0.5), 9)
mats = []
for n in (32, 128, 256):
    p = FEProblem(1, 0, 1, 0, n=n)
    mats.append((n, n * schur_complement(p, *assemble(p))))
table = discrepancy_sweep(mats, g, family, EIGEN)
for n in table.sizes:
    print(f"n={n:4d}  delta={table.delta(n):.3e}")

# %%
# The rescaled block matrix is exactly symmetric, also for a sign-changing a.
B = normalized_block_matrix(FEProblem(2, 0, 1, 0, a="x1-0.3", rho=0.5, n=10))
print("symmetric:", np.array_equal(B, B.T), " eigen range:", np.linalg.eigvalsh(B)[[0, -1]])
