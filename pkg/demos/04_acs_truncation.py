"""
Approximating classes of sequences by Fourier truncation
========================================================

T_n(|theta|) is approached by T_n of its truncated Fourier series. The
difference splits into a part of small rank and a part of small norm; the
truncated SVD gives the best such split, so its numbers are canonical.
"""
# %%
import numpy as np

from rglt.distribution import acs_split
from rglt.generators import toeplitz
from rglt.symbol import TrigPolySymbol, fourier_coeffs_from_samples

n = 256
full = fourier_coeffs_from_samples(np.abs, n - 1, 16 * n)
T = toeplitz(n, full)
theta = np.linspace(-np.pi, np.pi, 4097)[:, None]

# %%
for m in range(1, 6):
    trunc = TrigPolySymbol({j: c for j, c in full.coeffs.items() if abs(j[0]) <= m}, 1, 1, 1)
    # sup of the symbol error bounds the norm of the Toeplitz difference
    omega = np.abs(full.evaluate(theta) - trunc.evaluate(theta)).max()
    entry = acs_split(T, toeplitz(n, trunc), omega, level=m)
    print(f"m={m}  omega={omega:.4f}  rank={entry.rank}  c={entry.rank_fraction:.4f}")
