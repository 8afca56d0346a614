"""Dense numerical toolkit for (rectangular) multilevel block GLT matrix-sequences.

Builds Toeplitz and diagonal-sampling matrices from trigonometric-polynomial
and separable symbols, pads rectangular blocks with the extension operator,
compares singular-value / eigenvalue distributions against symbols, and
assembles the B-spline finite-element saddle-point system with its Schur
complement.
"""
from .errors import (ArgumentError, DefinitenessError, DomainError, GLTError, IndexRangeError,
                     InvariantViolation, NumericalError, ParseError)
from .expr import parse_coeff
from .symbol import (CoefficientFunction, GridSampledSymbol, SeparableSymbol, TrigPolySymbol,
                     fourier_coeffs_from_samples, sample_symbol, schur_symbol)
from .generators import (block_assemble, diag_sampling, glt9_approximant, random_zero_distributed,
                         toeplitz)
from .extension import extend_matrix, extend_via_permutation
from .distribution import (EmpiricalSpectrum, TestFunction, acs_split, discrepancy_sweep,
                           make_test_family, zero_fraction)
from .fem import FEProblem, SplineSpace, expand_hats, fem_symbols, schur_complement

__version__ = '0.1.0'

__all__ = [
    'ArgumentError', 'DefinitenessError', 'DomainError', 'GLTError', 'IndexRangeError',
    'InvariantViolation', 'NumericalError', 'ParseError', 'parse_coeff',
    'CoefficientFunction', 'GridSampledSymbol', 'SeparableSymbol', 'TrigPolySymbol',
    'fourier_coeffs_from_samples', 'sample_symbol', 'schur_symbol',
    'block_assemble', 'diag_sampling', 'glt9_approximant', 'random_zero_distributed', 'toeplitz',
    'extend_matrix', 'extend_via_permutation',
    'EmpiricalSpectrum', 'TestFunction', 'acs_split', 'discrepancy_sweep', 'make_test_family',
    'zero_fraction', 'FEProblem', 'SplineSpace', 'expand_hats', 'fem_symbols', 'schur_complement',
]
