"""Matrix Market coordinate I/O with exact ``%.17g`` round-tripping."""
import numpy as np
import scipy.io

__all__ = ['write_matrix_market', 'read_matrix_market']

_HEADER_COMPLEX = "%%MatrixMarket matrix coordinate complex general"
_HEADER_REAL = "%%MatrixMarket matrix coordinate real general"


def write_matrix_market(path, X, comment=None):
    """Write a dense matrix in coordinate format (nonzeros only, 1-based).

    The ``real`` field is used when every imaginary part vanishes.
    """
    X = np.atleast_2d(np.asarray(X))
    rows, cols = np.nonzero(X)
    is_real = not np.iscomplexobj(X) or not np.any(X.imag)
    lines = [_HEADER_REAL if is_real else _HEADER_COMPLEX]
    if comment:
        lines.extend("%" + line for line in comment.splitlines())
    lines.append(f"{X.shape[0]} {X.shape[1]} {rows.size}")
    for i, j in zip(rows, cols):
        v = X[i, j]
        if is_real:
            lines.append("%d %d %.17g" % (i + 1, j + 1, np.real(v)))
        else:
            lines.append("%d %d %.17g %.17g" % (i + 1, j + 1, v.real, v.imag))
    with open(path, 'w', newline='\n') as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_market(path):
    """Read a coordinate Matrix Market file into a dense array."""
    M = scipy.io.mmread(path)
    return np.asarray(M.todense()) if hasattr(M, 'todense') else np.asarray(M)
