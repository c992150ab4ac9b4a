"""Deterministic dense complex linear algebra with a single rank-tolerance policy.

All other modules route their rank decisions through one
:class:`TolerancePolicy` so that classifications (regular / degenerate,
summable / not) are reproducible: a quantity is "zero" exactly when it falls
below ``max(rows, cols) * relative_eps * largest_singular_value``.

Matrices are plain ``numpy`` arrays of ``complex128``; subspaces are
represented by matrices with Euclidean-orthonormal columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptySubspace, NotHermitian

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "as_matrix",
    "as_vector",
    "orthonormal_range_basis",
    "nullspace_basis",
    "intersect",
    "sum_span",
    "principal_angles",
    "operator_norm",
    "min_singular",
    "min_nonzero_singular",
    "hermitian_eig",
    "same_span",
]


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite complex 2-D array (vectors become columns)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix entries must be finite")
    return m


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.size and not np.all(np.isfinite(v)):
        raise DimensionMismatch("vector entries must be finite")
    return v


@dataclass(frozen=True)
class TolerancePolicy:
    """Rank rule: singular values below max(m,n)*relative_eps*sigma_max are zero."""

    relative_eps: float = 1e-12

    def __post_init__(self):
        if not self.relative_eps > 0:
            raise ValueError("relative_eps must be positive")

    def threshold(self, shape, largest_singular: float) -> float:
        m = max(int(shape[0]), int(shape[1])) if len(shape) == 2 else int(shape[0])
        return m * self.relative_eps * float(largest_singular)

    def rank(self, singular_values, shape) -> int:
        s = np.asarray(singular_values, dtype=float)
        if s.size == 0:
            return 0
        return int(np.count_nonzero(s > self.threshold(shape, s[0])))


DEFAULT_TOL = TolerancePolicy()


def _svd(a):
    return np.linalg.svd(a, full_matrices=False)


def orthonormal_range_basis(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Euclidean-orthonormal basis of the numerical column space of ``a``.

    The zero matrix (and any matrix with no columns) yields a basis with
    zero columns.
    """
    a = as_matrix(a)
    if a.shape[1] == 0 or a.shape[0] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    u, s, _ = _svd(a)
    r = tol.rank(s, a.shape)
    return np.ascontiguousarray(u[:, :r])


def nullspace_basis(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Euclidean-orthonormal basis of the numerical kernel of ``a``."""
    a = as_matrix(a)
    n = a.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = tol.rank(s, a.shape)
    return np.ascontiguousarray(vh[r:].conj().T)


def _check_same_rows(b1: np.ndarray, b2: np.ndarray):
    if b1.shape[0] != b2.shape[0]:
        raise DimensionMismatch(
            f"ambient dimensions differ: {b1.shape[0]} vs {b2.shape[0]}"
        )


def intersect(b1, b2, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the intersection of two spans.

    Inputs must be orthonormal bases in the same ambient dimension.  A vector
    lies in both spans iff it is ``b1 @ x = b2 @ y``, i.e. iff ``(x, -y)``
    solves ``[b1 | b2] (x; -y) = 0``.
    """
    b1, b2 = as_matrix(b1), as_matrix(b2)
    _check_same_rows(b1, b2)
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        return np.zeros((b1.shape[0], 0), dtype=np.complex128)
    k1 = b1.shape[1]
    null = nullspace_basis(np.hstack([b1, b2]), tol)
    if null.shape[1] == 0:
        return np.zeros((b1.shape[0], 0), dtype=np.complex128)
    return orthonormal_range_basis(b1 @ null[:k1], tol)


def sum_span(b1, b2, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the span of the union of two spans."""
    b1, b2 = as_matrix(b1), as_matrix(b2)
    _check_same_rows(b1, b2)
    return orthonormal_range_basis(np.hstack([b1, b2]), tol)


def principal_angles(b1, b2) -> np.ndarray:
    """Principal angles (radians, ascending) between two nonzero subspaces.

    Cosines are the singular values of ``b1^H b2``, clamped to [0, 1]; both
    inputs must be orthonormal bases.
    """
    b1, b2 = as_matrix(b1), as_matrix(b2)
    _check_same_rows(b1, b2)
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        raise EmptySubspace("principal angles need nonzero subspaces")
    cos = np.linalg.svd(b1.conj().T @ b2, compute_uv=False)
    cos = np.clip(cos.real, 0.0, 1.0)
    return np.arccos(cos)


def operator_norm(a) -> float:
    """Largest singular value; 0.0 for matrices with an empty axis."""
    a = as_matrix(a)
    if min(a.shape) == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def min_singular(a) -> float:
    """Smallest singular value; 0.0 for matrices with an empty axis."""
    a = as_matrix(a)
    if min(a.shape) == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def min_nonzero_singular(a, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Smallest singular value above the rank threshold (0.0 if none)."""
    a = as_matrix(a)
    if min(a.shape) == 0:
        return 0.0
    s = np.linalg.svd(a, compute_uv=False)
    keep = s[s > tol.threshold(a.shape, s[0])]
    return float(keep[-1]) if keep.size else 0.0


def hermitian_eig(a, tol: TolerancePolicy = DEFAULT_TOL):
    """Eigendecomposition of a (numerically) Hermitian matrix.

    Returns real eigenvalues in ascending order with orthonormal
    eigenvectors.  Raises :class:`NotHermitian` when the anti-Hermitian part
    exceeds the rank threshold.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("hermitian_eig needs a square matrix")
    if a.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    defect = operator_norm(a - a.conj().T)
    if defect > max(tol.threshold(a.shape, operator_norm(a)), 1e-13):
        raise NotHermitian(f"anti-Hermitian defect {defect:.3e}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    return w, v


def same_span(b1, b2, angle_tol: float = 1e-8) -> bool:
    """Subspace equality: equal dimensions and all principal angles tiny.

    Uses the sine of the largest principal angle, ||b1 - b2 b2^H b1||, which
    stays accurate for angles far below the arccos resolution limit.
    """
    b1, b2 = as_matrix(b1), as_matrix(b2)
    if b1.shape[1] != b2.shape[1]:
        return False
    if b1.shape[1] == 0:
        return True
    sine = operator_norm(b1 - b2 @ (b2.conj().T @ b1))
    return sine <= angle_tol
