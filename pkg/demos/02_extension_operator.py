"""
Padding rectangular blocks to square ones
=========================================

A matrix made of r x s blocks becomes a matrix of t x t blocks by zero
padding each block. The padding can be done index by index or through a
pair of permutation matrices; both must give the same bits. Padding keeps
the nonzero singular values and appends a predictable number of zeros.
"""
# %%
import numpy as np

from rglt.extension import extend_matrix, extend_via_permutation, identity_suite
from rglt.linalg import perm_P, kron

X = np.array([[1, 2, 3, 4], [5, 6, 7, 8]])  # two 1x2 blocks per row
print(extend_matrix(X, 1, 2, 2))

# %%
rng = np.random.default_rng(0)
n, r, s, t = 4, 2, 3, 4
A = rng.standard_normal((n * r, n * s))
E = extend_matrix(A, r, s, t)
print("bitwise equal routes:", np.array_equal(E, extend_via_permutation(A, r, s, t)))

sA = np.linalg.svd(A, compute_uv=False)
sE = np.linalg.svd(E, compute_uv=False)
print("leading singular values agree:", np.allclose(sE[:sA.size], sA))
print("appended zeros:", sE.size - sA.size, "expected", n * (t - min(r, s)))

# %%
# The permutation behind the second route swaps Kronecker factors.
Xs, Ys = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
P = perm_P(2, 3)
print("Y (x) X == P (X (x) Y) P^T:", np.allclose(kron(Ys, Xs), P @ kron(Xs, Ys) @ P.T))

# %%
# Seeded random check of the adjoint, tower and product rules.
for name, dev in identity_suite(instances=100, seed=0).items():
    print(f"{name:18s} {dev:.1e}")
