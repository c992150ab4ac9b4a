"""Seeded random generators for spaces, subspaces, and projection families.

Used by the verification suites and the test suite so that property checks
run on the same distributions everywhere.
"""

from __future__ import annotations

import numpy as np

from .krein import KreinSpace, Subspace, classify, ortho_companion
from .num_core import orthonormal_range_basis
from .projections import ProjectionOp, selfadjoint_projection

__all__ = [
    "complex_randn",
    "random_unitary",
    "random_fundamental_symmetry",
    "random_subspace",
    "random_degenerate_subspace",
    "random_regular_subspace",
    "random_orthogonal_regular_family",
    "random_normal_block_family",
]


def complex_randn(rng, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_randn(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_fundamental_symmetry(rng, n: int, n_neg=None) -> KreinSpace:
    """Random J = U diag(+/-1) U^H with the given (or random) negative count."""
    if n_neg is None:
        n_neg = int(rng.integers(0, n + 1))
    signs = np.ones(n)
    signs[:n_neg] = -1.0
    u = random_unitary(rng, n)
    j = (u * signs) @ u.conj().T
    j = (j + j.conj().T) / 2.0
    return KreinSpace(j)


def random_subspace(rng, space: KreinSpace, dim: int) -> Subspace:
    return Subspace.from_span(space, complex_randn(rng, space.dim, dim))


def random_degenerate_subspace(rng, space: KreinSpace, dim: int) -> Subspace:
    """Subspace containing at least one neutral direction when J is indefinite.

    Mixes a +1 and a -1 eigenvector of J into a neutral vector and pads with
    random directions.
    """
    w, v = np.linalg.eigh(space.J)
    pos = v[:, w > 0]
    neg = v[:, w < 0]
    cols = []
    if pos.shape[1] and neg.shape[1]:
        cols.append((pos[:, 0] + neg[:, 0]) / np.sqrt(2.0))
    while len(cols) < dim:
        cols.append(complex_randn(rng, space.dim))
    return Subspace.from_span(space, np.column_stack(cols[:dim]))


def random_regular_subspace(
    rng, space: KreinSpace, dim: int, min_margin: float = 1e-6, tries: int = 50
) -> Subspace:
    for _ in range(tries):
        s = random_subspace(rng, space, dim)
        if s.dim == dim and classify(s).regularity_margin > min_margin:
            return s
    raise RuntimeError("could not draw a regular subspace")


def random_orthogonal_regular_family(
    rng, space: KreinSpace, sizes, min_margin: float = 1e-6
):
    """Pairwise K-orthogonal regular subspaces with the given dimensions.

    Each member is drawn inside the orthogonal companion of the span of the
    previous ones, so orthogonality is structural.
    """
    members = []
    avail = Subspace(space, np.eye(space.dim, dtype=complex))
    for k in sizes:
        if avail.dim < k:
            break
        for _ in range(80):
            coeff = complex_randn(rng, avail.dim, k)
            cand = Subspace.from_span(space, avail.basis @ coeff)
            if cand.dim == k and classify(cand).regularity_margin > min_margin:
                break
        else:
            raise RuntimeError("could not extend orthogonal regular family")
        members.append(cand)
        span = np.hstack([m.basis for m in members])
        avail = ortho_companion(Subspace(space, orthonormal_range_basis(span)))
    return members


def selfadjoint_family(members):
    return [selfadjoint_projection(m) for m in members]


def random_normal_block_family(rng, n_blocks: int, shuffle: bool = True):
    """Normal projections onto neutral lines of disjoint C^2 blocks.

    Returns (space, [Q_k]) on C^(2 n_blocks) with J = diag(1, -1) per block;
    each Q_k projects onto the neutral line spanned by (1, 1) of its block
    along the complementary structure, so the pairwise relations needed for
    normal sums hold exactly.
    """
    dim = 2 * n_blocks
    j = np.zeros((dim, dim))
    base = np.array([[0.5, 0.5], [0.5, 0.5]])
    mats = []
    order = rng.permutation(n_blocks) if shuffle else np.arange(n_blocks)
    for b in range(n_blocks):
        j[2 * b : 2 * b + 2, 2 * b : 2 * b + 2] = np.diag([1.0, -1.0])
    space = KreinSpace(j)
    for b in order:
        q = np.zeros((dim, dim), dtype=complex)
        q[2 * b : 2 * b + 2, 2 * b : 2 * b + 2] = base
        mats.append(ProjectionOp.from_matrix(space, q))
    return space, mats
