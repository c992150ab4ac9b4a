"""Projections in Krein spaces: oblique, J-selfadjoint, and normal.

A projection is any idempotent P; its Krein adjoint is P^{*K} = J P^H J.
P is J-selfadjoint when P = P^{*K} and normal when P commutes with P^{*K}.
Flag tolerances scale with ||P|| and ||P||^2 because oblique projections can
have large norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotComplementary,
    NotIdempotent,
    NotRegular,
)
from .krein import (
    KreinSpace,
    Subspace,
    classify,
    decompose_qpr,
    ortho_companion,
)
from .num_core import (
    as_matrix,
    min_singular,
    nullspace_basis,
    operator_norm,
    orthonormal_range_basis,
    sum_span,
)

__all__ = [
    "ProjectionOp",
    "kadjoint",
    "oblique_projection",
    "selfadjoint_projection",
    "normal_projection",
    "check_order",
]

_COND_CAP = 1e12
_FLAG_EPS = 1e-9


def kadjoint(a, space: KreinSpace) -> np.ndarray:
    """Krein adjoint J A^H J; an involution pairing <Ax, y> = <x, A^{*K} y>."""
    a = as_matrix(a)
    if a.shape != (space.dim, space.dim):
        raise DimensionMismatch("operator shape does not match the space")
    return space.J @ a.conj().T @ space.J


@dataclass(frozen=True)
class ProjectionOp:
    """Square matrix certified idempotent, with cached range/kernel bases."""

    space: KreinSpace
    matrix: np.ndarray
    range_basis: np.ndarray
    kernel_basis: np.ndarray
    j_selfadjoint: bool
    normal: bool

    @classmethod
    def from_matrix(cls, space: KreinSpace, p) -> "ProjectionOp":
        p = as_matrix(p)
        n = space.dim
        if p.shape != (n, n):
            raise DimensionMismatch("projection shape does not match the space")
        norm = operator_norm(p)
        if operator_norm(p @ p - p) > _FLAG_EPS * (1.0 + norm):
            raise NotIdempotent("matrix is not idempotent within tolerance")
        rng = orthonormal_range_basis(p, space.tol)
        ker = nullspace_basis(p, space.tol)
        if rng.shape[1] + ker.shape[1] != n:
            raise NotIdempotent("range and kernel dimensions do not add up")
        stacked = np.hstack([rng, ker])
        if stacked.shape[1] and min_singular(stacked) <= space.tol.threshold(
            stacked.shape, 1.0
        ):
            raise NotIdempotent("range and kernel are not complementary")
        pk = kadjoint(p, space)
        j_sa = operator_norm(space.J @ p - p.conj().T @ space.J) <= _FLAG_EPS * max(
            1.0, norm
        )
        nrm = operator_norm(p @ pk - pk @ p) <= _FLAG_EPS * max(1.0, norm**2)
        return cls(
            space=space,
            matrix=p,
            range_basis=rng,
            kernel_basis=ker,
            j_selfadjoint=j_sa,
            normal=nrm,
        )

    @property
    def flags(self) -> dict:
        return {"j_selfadjoint": self.j_selfadjoint, "normal": self.normal}

    @property
    def rank(self) -> int:
        return self.range_basis.shape[1]

    def norm(self) -> float:
        return operator_norm(self.matrix)

    def krein_adjoint(self) -> "ProjectionOp":
        return ProjectionOp.from_matrix(self.space, kadjoint(self.matrix, self.space))

    def complement(self) -> "ProjectionOp":
        """1 - P, the projection with range and kernel swapped."""
        return ProjectionOp.from_matrix(
            self.space, np.eye(self.space.dim) - self.matrix
        )

    def range_subspace(self) -> Subspace:
        return Subspace(self.space, self.range_basis)

    def kernel_subspace(self) -> Subspace:
        return Subspace(self.space, self.kernel_basis)


def oblique_projection(range_s: Subspace, kernel_s: Subspace) -> ProjectionOp:
    """Unique projection with the given range and kernel.

    Requires dim range + dim kernel = dim H and trivial intersection; rejects
    near-singular pairings (condition number above 1e12) rather than
    regularizing them.
    """
    space = range_s.space
    if kernel_s.space.dim != space.dim:
        raise DimensionMismatch("range and kernel live in different spaces")
    n = space.dim
    if range_s.dim + kernel_s.dim != n:
        raise NotComplementary(
            f"dimensions do not add up: {range_s.dim} + {kernel_s.dim} != {n}"
        )
    if range_s.dim == 0:
        return ProjectionOp.from_matrix(space, np.zeros((n, n), dtype=complex))
    if kernel_s.dim == 0:
        return ProjectionOp.from_matrix(space, np.eye(n, dtype=complex))
    stacked = np.hstack([range_s.basis, kernel_s.basis])
    if min_singular(stacked) <= space.tol.threshold(stacked.shape, 1.0):
        raise NotComplementary("range and kernel intersect within tolerance")
    # Solve x - Br a in kernel, i.e. C^H (x - Br a) = 0 with C the Euclidean
    # complement of the kernel.
    c = nullspace_basis(kernel_s.basis.conj().T, space.tol)
    m = c.conj().T @ range_s.basis
    if np.linalg.cond(m) > _COND_CAP:
        raise NotComplementary("pairing is numerically singular")
    p = range_s.basis @ np.linalg.solve(m, c.conj().T)
    return ProjectionOp.from_matrix(space, p)


def selfadjoint_projection(r: Subspace) -> ProjectionOp:
    """J-selfadjoint projection onto a regular subspace, B (B^H J B)^{-1} B^H J."""
    space = r.space
    n = space.dim
    if r.dim == 0:
        return ProjectionOp.from_matrix(space, np.zeros((n, n), dtype=complex))
    cls = classify(r)
    if not cls.regular:
        raise NotRegular(
            f"subspace is not regular (margin {cls.regularity_margin:.3e})"
        )
    g = r.gram()
    if np.linalg.cond(g) > _COND_CAP:
        raise NotRegular("Gram matrix is numerically singular")
    p = r.basis @ np.linalg.solve(g, r.basis.conj().T @ space.J)
    return ProjectionOp.from_matrix(space, p)


def normal_projection(s: Subspace) -> ProjectionOp:
    """Normal projection onto an arbitrary subspace.

    Splits S = R (+) N into regular and neutral parts, picks a fundamental
    symmetry J' fixing R, and returns P_R plus the oblique projection with
    range N and kernel R (+) J'N (+) W, where W is the orthogonal companion
    of R (+) N (+) J'N.  The result Q satisfies Q^2 = Q, ran Q = S,
    Q Q^{*K} = Q^{*K} Q = P_R.
    """
    space = s.space
    dec = decompose_qpr(s)
    p_r = selfadjoint_projection(dec.R)
    if dec.N.dim == 0:
        return p_r
    jp = dec.adapted_J
    jn = orthonormal_range_basis(jp @ dec.N.basis, space.tol)
    core = sum_span(sum_span(dec.R.basis, dec.N.basis, space.tol), jn, space.tol)
    w = ortho_companion(Subspace(space, core))
    kernel = Subspace(
        space, sum_span(sum_span(dec.R.basis, jn, space.tol), w.basis, space.tol)
    )
    q_n = oblique_projection(dec.N, kernel)
    return ProjectionOp.from_matrix(space, p_r.matrix + q_n.matrix)


def check_order(p1: ProjectionOp, p2: ProjectionOp, tol_scale: float = _FLAG_EPS) -> dict:
    """Order relations between projections via matrix products.

    ``ran_contained``: ran P1 inside ran P2 (P2 P1 = P1); ``ker_contains``:
    ker P1 contains ker P2 (P1 P2 = P1); ``products_ok`` when both hold.
    """
    if p1.space.dim != p2.space.dim:
        raise DimensionMismatch("projections live in different spaces")
    scale = tol_scale * max(1.0, p1.norm() * p2.norm())
    ran_contained = operator_norm(p2.matrix @ p1.matrix - p1.matrix) <= scale
    ker_contains = operator_norm(p1.matrix @ p2.matrix - p1.matrix) <= scale
    return {
        "ran_contained": bool(ran_contained),
        "ker_contains": bool(ker_contains),
        "products_ok": bool(ran_contained and ker_contains),
    }
