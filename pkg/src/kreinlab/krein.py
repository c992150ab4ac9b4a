"""Krein-space structure: fundamental symmetries, subspace classification,
isotropic parts, and the regular-plus-neutral decomposition.

A finite-dimensional Krein space is modeled as ``C^n`` with a Hermitian
involution ``J``.  The indefinite inner product is ``<x, y> = y^H J x``
(linear in the first argument).  "Closed" has no finite-dimensional content;
the closed/non-closed dichotomy is rendered quantitatively as margins
(smallest singular values of Gram or concatenated-basis matrices) measured
over truncation ladders.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidStructure, NotRegular
from .num_core import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    as_vector,
    hermitian_eig,
    intersect,
    min_nonzero_singular,
    nullspace_basis,
    operator_norm,
    orthonormal_range_basis,
)

__all__ = [
    "KreinSpace",
    "Subspace",
    "Classification",
    "QprDecomposition",
    "kip",
    "ortho_companion",
    "classify",
    "isotropic_part",
    "decompose_qpr",
    "adapted_symmetry",
    "check_qpr_criterion",
]

_STRUCT_TOL = 1e-10


@dataclass(frozen=True)
class KreinSpace:
    """Ambient space C^dim together with a fundamental symmetry J."""

    J: np.ndarray
    tol: TolerancePolicy = DEFAULT_TOL

    def __post_init__(self):
        j = as_matrix(self.J)
        if j.shape[0] != j.shape[1]:
            raise InvalidStructure("fundamental symmetry must be square")
        n = j.shape[0]
        if operator_norm(j - j.conj().T) > _STRUCT_TOL:
            raise InvalidStructure("fundamental symmetry is not Hermitian")
        if operator_norm(j @ j - np.eye(n)) > _STRUCT_TOL:
            raise InvalidStructure("fundamental symmetry is not an involution")
        object.__setattr__(self, "J", j)

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    @property
    def signature(self) -> tuple[int, int]:
        """(n_plus, n_minus) counts of +1 / -1 eigenvalues of J."""
        w = np.linalg.eigvalsh(self.J)
        n_pos = int(np.count_nonzero(w > 0))
        return n_pos, self.dim - n_pos

    def kip(self, x, y) -> complex:
        """Indefinite inner product <x, y> = y^H J x."""
        x, y = as_vector(x), as_vector(y)
        if x.size != self.dim or y.size != self.dim:
            raise DimensionMismatch("vector length does not match space dimension")
        return complex(np.vdot(y, self.J @ x))

    def gram(self, basis) -> np.ndarray:
        """Hermitian Gram matrix B^H J B of a column basis."""
        b = as_matrix(basis)
        if b.shape[0] != self.dim:
            raise DimensionMismatch("basis rows do not match space dimension")
        g = b.conj().T @ self.J @ b
        return (g + g.conj().T) / 2.0

    def subspace(self, span) -> "Subspace":
        return Subspace.from_span(self, span)


def kip(x, y, space: KreinSpace) -> complex:
    return space.kip(x, y)


@dataclass(frozen=True)
class Subspace:
    """Subspace of a Krein space, held as a Euclidean-orthonormal column basis."""

    space: KreinSpace
    basis: np.ndarray

    def __post_init__(self):
        b = as_matrix(self.basis)
        if b.shape[0] != self.space.dim:
            raise DimensionMismatch("basis rows do not match space dimension")
        if b.shape[1] > self.space.dim:
            raise InvalidStructure("basis has more columns than the ambient dimension")
        if b.shape[1]:
            defect = operator_norm(b.conj().T @ b - np.eye(b.shape[1]))
            if defect > _STRUCT_TOL:
                raise InvalidStructure(f"basis is not orthonormal (defect {defect:.3e})")
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_span(cls, space: KreinSpace, span) -> "Subspace":
        """Build a subspace from an arbitrary spanning set of columns."""
        a = as_matrix(span)
        if a.shape[0] != space.dim:
            raise DimensionMismatch("spanning columns do not match space dimension")
        return cls(space, orthonormal_range_basis(a, space.tol))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def tol(self) -> TolerancePolicy:
        return self.space.tol

    def gram(self) -> np.ndarray:
        return self.space.gram(self.basis)


@dataclass(frozen=True)
class Classification:
    """Signature-based classification of a subspace.

    ``kind`` is one of positive, negative, neutral, indefinite-nondegenerate,
    degenerate.  ``regularity_margin`` is the smallest singular value of the
    Gram matrix, the quantitative proxy for regularity.  Margins within 10x
    of the rank threshold are flagged ``borderline`` rather than reclassified.
    """

    kind: str
    regular: bool
    regularity_margin: float
    isotropic_dim: int
    borderline: bool = False
    isotropic_basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=complex))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "regular": self.regular,
            "regularity_margin": self.regularity_margin,
            "isotropic_dim": self.isotropic_dim,
            "borderline": self.borderline,
        }


def _gram_split(s: Subspace):
    """Eigen-split of the Gram matrix into (values, vectors, zero mask, threshold).

    Gram entries are inner products of unit vectors through a unitary J, so
    the eigenvalues are bounded by 1 and the zero decision is taken relative
    to unit scale and the ambient dimension (a noise-only Gram must classify
    as zero).
    """
    g = s.gram()
    w, v = hermitian_eig(g, s.tol)
    if w.size == 0:
        return w, v, np.zeros(0, dtype=bool), 0.0
    n = s.space.dim
    scale = max(1.0, float(np.max(np.abs(w))))
    thr = s.tol.threshold((n, n), scale)
    zero = np.abs(w) <= thr
    return w, v, zero, thr


def classify(s: Subspace) -> Classification:
    """Classify a subspace from the eigenvalues of its Gram matrix B^H J B."""
    k = s.dim
    if k == 0:
        return Classification(
            kind="neutral",
            regular=True,
            regularity_margin=1.0,
            isotropic_dim=0,
            isotropic_basis=np.zeros((s.space.dim, 0), dtype=complex),
        )
    w, v, zero, thr = _gram_split(s)
    n_zero = int(np.count_nonzero(zero))
    n_pos = int(np.count_nonzero(w > thr))
    n_neg = k - n_zero - n_pos
    margin = float(np.min(np.abs(w)))
    if n_zero == k:
        kind = "neutral"
    elif n_zero > 0:
        kind = "degenerate"
    elif n_pos == k:
        kind = "positive"
    elif n_neg == k:
        kind = "negative"
    else:
        kind = "indefinite-nondegenerate"
    nonzero_abs = np.abs(w[~zero])
    borderline = bool(np.any(nonzero_abs <= 10.0 * thr)) if nonzero_abs.size else False
    return Classification(
        kind=kind,
        regular=(n_zero == 0),
        regularity_margin=margin,
        isotropic_dim=n_zero,
        borderline=borderline,
        isotropic_basis=s.basis @ v[:, zero],
    )


def ortho_companion(s: Subspace) -> Subspace:
    """Orthogonal companion S^perp in the indefinite product.

    Equals the Euclidean orthocomplement of J*S, i.e. the kernel of B^H J.
    """
    b = nullspace_basis(s.basis.conj().T @ s.space.J, s.tol)
    return Subspace(s.space, b)


def isotropic_part(s: Subspace) -> Subspace:
    """Isotropic part S intersect S^perp (a neutral subspace contained in S)."""
    comp = ortho_companion(s)
    return Subspace(s.space, intersect(s.basis, comp.basis, s.tol))


@dataclass(frozen=True)
class QprDecomposition:
    """Orthogonal direct split S = R (+) N with R regular, N neutral."""

    R: Subspace
    N: Subspace
    adapted_J: np.ndarray

    @property
    def regular_margin(self) -> float:
        return classify(self.R).regularity_margin


def decompose_qpr(s: Subspace) -> QprDecomposition:
    """Split S into its regular part and its isotropic (neutral) part.

    N is spanned by the Gram kernel; R is the Euclidean complement of N
    inside S, which in the coordinates of a diagonalizing fundamental
    decomposition is the complement in the associated Hilbert metric.  The
    Gram of R is diagonal with entries above the rank threshold, so R is
    regular by construction.
    """
    w, v, zero, _ = _gram_split(s)
    n_basis = s.basis @ v[:, zero]
    r_basis = s.basis @ v[:, ~zero]
    r = Subspace(s.space, r_basis)
    n = Subspace(s.space, n_basis)
    return QprDecomposition(R=r, N=n, adapted_J=adapted_symmetry(r))


def _signed_unit_columns(s: Subspace):
    """Columns u with <u, u> = +/-1 spanning a regular subspace.

    Obtained from the Gram eigen-split; raises NotRegular when any Gram
    eigenvalue sits at or below the rank threshold.
    """
    if s.dim == 0:
        return np.zeros((s.space.dim, 0), dtype=complex)
    w, v, zero, _ = _gram_split(s)
    if np.any(zero):
        raise NotRegular("subspace is degenerate within tolerance")
    return (s.basis @ v) / np.sqrt(np.abs(w))


def adapted_symmetry(r: Subspace) -> np.ndarray:
    """Fundamental symmetry J' with J' R = R and J' R^perp = R^perp.

    Built from signed spectral parts of the Gram matrices of R and of its
    orthogonal companion: if U collects inner-product-normalized eigenvector
    columns of both, then J' = U U^H J.  R must be regular.
    """
    space = r.space
    if r.dim and not classify(r).regular:
        raise NotRegular("adapted symmetry needs a regular subspace")
    comp = ortho_companion(r)
    cols = [_signed_unit_columns(r)]
    if comp.dim:
        cols.append(_signed_unit_columns(comp))
    u = np.hstack(cols)
    jp = u @ u.conj().T @ space.J
    n = space.dim
    if operator_norm(jp @ jp - np.eye(n)) > 1e-8 * max(1.0, operator_norm(jp) ** 2):
        raise NotRegular("adapted symmetry construction failed (companion degenerate)")
    return jp


@dataclass(frozen=True)
class QprCriterion:
    sum_with_companion_margin: float
    is_qpr: bool


def check_qpr_criterion(s: Subspace) -> QprCriterion:
    """Margin of the direct sum S + S^perp, the closedness proxy.

    S + S^perp decomposes directly as R (+) S^perp where R is the regular
    part of S; the reported margin is the smallest nonzero singular value of
    the concatenated basis [R | S^perp].  In finite dimension every subspace
    decomposes, so ``is_qpr`` is always true; the margin is what truncation
    ladders track.
    """
    dec = decompose_qpr(s)
    comp = ortho_companion(s)
    stacked = np.hstack([dec.R.basis, comp.basis])
    if stacked.shape[1] == 0:
        margin = 1.0
    else:
        margin = min_nonzero_singular(stacked, s.tol)
    return QprCriterion(sum_with_companion_margin=margin, is_qpr=True)
