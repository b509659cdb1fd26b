"""Dense complex linear-algebra kernel used by every other module.

A "matrix" throughout this package is a plain 2-D numpy array of
complex128; this module validates inputs and adds the few conventions
(deterministic SVD phases, column-major vec, floored log-determinant)
the rest of the toolkit relies on.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, InvalidInputError

__all__ = [
    "as_matrix",
    "svd",
    "kron",
    "vec",
    "vec_inverse",
    "hermitian_logdet2",
]

# Eigenvalues at or below this fraction of the largest eigenvalue count as
# zero, so rank-deficient determinants score -inf instead of producing NaN.
LOGDET_POSITIVITY_FLOOR = 1e-14

HERMITIAN_TOL = 1e-8


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D complex128 array, validating shape."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(
            f"{name} must be 2-D with at least one row and column, got shape {a.shape}"
        )
    if not np.isfinite(a).all():
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return a


def _normalize_column_phases(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Rotate each (u, v) column pair by the conjugate phase of u's
    # largest-magnitude entry; u diag(s) v^H is unchanged.
    idx = np.argmax(np.abs(u), axis=0)
    pivots = u[idx, np.arange(u.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return u / phases[None, :], v / phases[None, :]


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduced SVD with a deterministic phase convention.

    Returns ``(u, s, v)`` with ``m = u @ diag(s) @ v.conj().T``, singular
    values sorted descending and orthonormal columns in ``u`` and ``v``.
    Each column pair is rotated so the largest-magnitude entry of the
    ``u`` column is real positive, which pins the free joint phase.
    """
    a = as_matrix(m)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    u, v = _normalize_column_phases(u, vh.conj().T)
    return u, s, v


def kron(a, b) -> np.ndarray:
    """Kronecker product with input validation."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def vec(m) -> np.ndarray:
    """Column-major stacking of ``m`` into a column vector.

    vec([[1, 2], [3, 4]]) == [[1], [3], [2], [4]].
    """
    return as_matrix(m).reshape(-1, 1, order="F")


def vec_inverse(v, rows: int, cols: int) -> np.ndarray:
    """Undo :func:`vec`: reshape a stacked vector back to (rows, cols)."""
    a = as_matrix(v, "vector")
    if rows < 1 or cols < 1 or a.size != rows * cols:
        raise DimensionError(
            f"cannot reshape {a.size} entries into a {rows}x{cols} matrix"
        )
    return a.reshape((rows, cols), order="F")


def hermitian_logdet2(m) -> float:
    """log2 of det(m) for Hermitian m, or -inf when not safely positive.

    Any eigenvalue at or below ``LOGDET_POSITIVITY_FLOOR`` times the largest
    eigenvalue makes the result -inf. Raises for non-square input or input
    that is not Hermitian within ``HERMITIAN_TOL`` (relative to the largest
    entry magnitude).
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.conj().T).max()) > HERMITIAN_TOL * scale:
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    w = np.linalg.eigvalsh(a)
    top = w[-1]
    if top <= 0.0 or w[0] <= LOGDET_POSITIVITY_FLOOR * top:
        return float("-inf")
    return float(np.sum(np.log2(w)))
