"""Dense vectors, positive diagonal matrices, and weighted norms.

Every quantity in this package is either a length-d vector or a d x d
diagonal matrix; a diagonal matrix is stored as the 1-d array of its
diagonal.  Both are float64 and returned read-only, so values can be
shared freely across threads and optimizer runs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "as_vector",
    "as_diagonal",
    "as_positive_diagonal",
    "weighted_norm_sq",
    "diag_apply",
    "diag_inverse",
]


class DimensionMismatchError(ValueError):
    """Operands have incompatible lengths."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def as_vector(x) -> np.ndarray:
    """Validate and return a read-only float64 vector.

    Requires length >= 1 and all entries finite; NaN/inf are rejected at
    the boundary so no downstream operation has to re-check.
    """
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a 1-d vector with d >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return _freeze(arr)


def as_diagonal(diag) -> np.ndarray:
    """Validate a diagonal (stored as its 1-d array); entries finite."""
    return as_vector(diag)


def as_positive_diagonal(diag, max_value: float = np.inf) -> np.ndarray:
    """Validate a diagonal whose entries must lie in (0, max_value].

    ``max_value=1.0`` covers inclusion-probability diagonals.
    """
    arr = as_diagonal(diag)
    if np.any(arr <= 0.0):
        raise ValueError("diagonal entries must be strictly positive")
    if np.any(arr > max_value):
        raise ValueError(f"diagonal entries must be <= {max_value}")
    return arr


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def weighted_norm_sq(x, diag) -> float:
    """Squared weighted norm sum_j D_j * x_j**2 for a positive diagonal D.

    Zero exactly when x is the zero vector.
    """
    xv = as_vector(x)
    dv = as_positive_diagonal(diag)
    _check_same_dim(xv, dv)
    return float(np.dot(dv, xv * xv))


def diag_apply(diag, x) -> np.ndarray:
    """Apply a diagonal matrix to a vector: (D x)_j = D_j * x_j."""
    dv = as_diagonal(diag)
    xv = as_vector(x)
    _check_same_dim(dv, xv)
    return _freeze(dv * xv)


def diag_inverse(diag) -> np.ndarray:
    """Entrywise reciprocal of a strictly positive diagonal."""
    dv = as_positive_diagonal(diag)
    return _freeze(1.0 / dv)
