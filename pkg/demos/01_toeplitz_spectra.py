"""
Spectra of Toeplitz matrices against their symbols
==================================================

The tridiagonal matrix tridiag(-1, 2, -1) is the Toeplitz matrix of the
trigonometric polynomial f(theta) = 2 - 2 cos(theta). As n grows, its
eigenvalues fill the range of f with the same density as f itself. This
script measures that convergence with triangular test functions.
"""
# %%
import numpy as np

from rglt import TrigPolySymbol, toeplitz, discrepancy_sweep, make_test_family, sample_symbol
from rglt.distribution import EIGEN, SINGULAR

lap = TrigPolySymbol({(0,): 2.0, (1,): -1.0, (-1,): -1.0})
print(toeplitz(5, lap))

# %%
# The eigenvalues are known in closed form: 2 - 2 cos(j pi / (n + 1)).
n = 64
lam = np.linalg.eigvalsh(toeplitz(n, lap))
closed = np.sort(2 - 2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
print("max deviation from closed form:", np.abs(lam - closed).max())

# %%
# Empirical averages (1/n) sum F(lambda_j) approach the symbol average
# (1/2pi) int F(f(theta)) dtheta. delta(n) is the worst gap over the family.
family = make_test_family((-1, 5), 9)
grid = sample_symbol(lap, (1, 8192))
table = discrepancy_sweep([(n, toeplitz(n, lap)) for n in (32, 128, 512)], grid, family, EIGEN)
for n in table.sizes:
    print(f"n={n:4d}  delta={table.delta(n):.2e}")

# %%
# A rectangular 1x2 symbol [1, e^{-i theta}]. Its singular value is sqrt(2)
# for every theta; the matrices have all singular values sqrt(2) except one 1.
pair = TrigPolySymbol({(0,): [[1.0, 0.0]], (-1,): [[0.0, 1.0]]})
T = toeplitz(6, pair)
print(T.shape, np.round(np.linalg.svd(T, compute_uv=False), 6))
table = discrepancy_sweep([(256, toeplitz(256, pair))], pair, make_test_family((0.5, 2.0), 7),
                          SINGULAR, (1, 64))
print("rectangular delta(256):", table.delta(256))
