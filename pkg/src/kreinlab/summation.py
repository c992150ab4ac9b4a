"""Unordered (Moore-Smith) summation with certificates and row operators.

A family is certified summable only via an explicit tail envelope: a stated
bound on the sum of element norms from index k on.  At finite truncation the
net definition cannot be decided from finitely many terms, so families
without an envelope get a heuristic verdict (``not_summable`` when partial
norm sums blow past 1e6 times the first term, ``inconclusive`` otherwise).

Row operators realize x = {x_k} -> sum_k T_k x_k for a finite truncation of
an operator family, either under an absolute-summability envelope or under a
uniform bound on finite subset sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EnvelopeMissing
from .krein import KreinSpace
from .num_core import DEFAULT_TOL, TolerancePolicy, as_matrix, as_vector, operator_norm

__all__ = [
    "IndexedFamily",
    "MSCertificate",
    "RowOp",
    "ms_sum",
    "row_operator_abs",
    "row_operator_bounded",
    "subset_norm_bound",
    "range_membership_probe",
    "truncation_chain",
]

_DIVERGENCE_FACTOR = 1e6
_PROBE_BUDGET = 10000
_PERMUTATION_TRIALS = 20


class IndexedFamily:
    """Countable family of vectors or operators with a tail-norm envelope.

    ``element_at(k)`` returns the k-th element; ``tail_envelope(k)`` is a
    nonincreasing bound on the sum of norms of elements at indices >= k, or
    +inf when unknown.
    """

    def __init__(self, element_at, index_count, tail_envelope=None, dim=None):
        self._element_at = element_at
        self.index_count = index_count
        self._tail_envelope = tail_envelope
        self.dim = dim

    @classmethod
    def from_vectors(cls, vectors, dim=None) -> "IndexedFamily":
        vecs = [as_vector(v) for v in vectors]
        if vecs:
            dim = vecs[0].size
            if any(v.size != dim for v in vecs):
                raise DimensionMismatch("family vectors have mixed lengths")
        norms = [float(np.linalg.norm(v)) for v in vecs]
        tails = _suffix_sums(norms)
        return cls(
            element_at=lambda k: vecs[k],
            index_count=len(vecs),
            tail_envelope=lambda k: tails[min(k, len(vecs))],
            dim=dim,
        )

    @classmethod
    def from_operators(cls, mats) -> "IndexedFamily":
        ops = [as_matrix(m) for m in mats]
        norms = [operator_norm(m) for m in ops]
        tails = _suffix_sums(norms)
        return cls(
            element_at=lambda k: ops[k],
            index_count=len(ops),
            tail_envelope=lambda k: tails[min(k, len(ops))],
            dim=ops[0].shape[0] if ops else None,
        )

    def element(self, k):
        return self._element_at(k)

    def envelope(self, k) -> float:
        if self._tail_envelope is None:
            return math.inf
        return float(self._tail_envelope(k))

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.index_count) if isinstance(
            self.index_count, float
        ) else True


def _suffix_sums(norms):
    tails = [0.0] * (len(norms) + 1)
    for i in range(len(norms) - 1, -1, -1):
        tails[i] = tails[i + 1] + norms[i]
    return tails


@dataclass(frozen=True)
class MSCertificate:
    """Outcome of a Moore-Smith summability check."""

    status: str  # summable | not_summable | inconclusive
    F0_size: int
    tail_bound: float
    permutation_trials: int = 0
    max_permutation_discrepancy: float = 0.0


def _count_cap(fam: IndexedFamily, cap: int) -> int:
    if isinstance(fam.index_count, (int, np.integer)):
        return min(int(fam.index_count), cap)
    return cap


def _zero_like(fam: IndexedFamily):
    if fam.dim is not None:
        return np.zeros(fam.dim, dtype=complex)
    return np.zeros(0, dtype=complex)


def ms_sum(fam: IndexedFamily, eps: float, seed: int = 0):
    """Moore-Smith sum of a family, with a rearrangement-checked certificate.

    When the envelope drops below ``eps`` at some index k, the partial sum of
    the first k elements is returned together with a ``summable`` certificate
    whose discrepancy field records the worst deviation over random
    rearrangements of those k terms.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    cap = _count_cap(fam, 1 << 20)
    k = _first_index_below(fam, eps, cap)
    if k is not None:
        elems = [np.asarray(fam.element(i), dtype=complex) for i in range(k)]
        total = _zero_like(fam) if not elems else _ordered_sum(elems, range(k))
        rng = np.random.default_rng(seed)
        worst = 0.0
        trials = _PERMUTATION_TRIALS if k > 1 else 0
        for _ in range(trials):
            perm = rng.permutation(k)
            alt = _ordered_sum(elems, perm)
            worst = max(worst, float(np.linalg.norm((alt - total).ravel())))
        cert = MSCertificate(
            status="summable",
            F0_size=k,
            tail_bound=fam.envelope(k),
            permutation_trials=trials,
            max_permutation_discrepancy=worst,
        )
        return total, cert

    # No usable envelope: probe the scalar norm criterion on a prefix.  The
    # family diverges when partial norm sums blow past 1e6 times the first
    # term, or when dyadic norm blocks [P, 2P) stop decaying (Cauchy test).
    probe = _count_cap(fam, _PROBE_BUDGET)
    partial = _zero_like(fam)
    norm_sum = 0.0
    first = 0.0
    norms = np.zeros(probe)
    for i in range(probe):
        x = np.asarray(fam.element(i), dtype=complex)
        if partial.size == 0 and x.size:
            partial = np.zeros_like(x)
        partial = partial + x
        nrm = float(np.linalg.norm(x.ravel()))
        norms[i] = nrm
        norm_sum += nrm
        if first == 0.0 and nrm > 0.0:
            first = nrm
        if first > 0.0 and norm_sum > _DIVERGENCE_FACTOR * first:
            cert = MSCertificate(status="not_summable", F0_size=i + 1, tail_bound=math.inf)
            return partial, cert
    diverges = False
    if first > 0.0:
        p = 1
        last_block = first
        while 2 * p <= probe:
            last_block = float(np.sum(norms[p : 2 * p]))
            p *= 2
        diverges = p > 1 and last_block > 1e-3 * first
    status = "not_summable" if diverges else "inconclusive"
    return partial, MSCertificate(status=status, F0_size=probe, tail_bound=math.inf)


def _first_index_below(fam: IndexedFamily, eps: float, cap: int):
    if fam.envelope(0) < eps:
        return 0
    if fam.envelope(cap) >= eps:
        return None
    lo, hi = 0, cap  # envelope(lo) >= eps > envelope(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fam.envelope(mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def _ordered_sum(elems, order):
    total = np.zeros_like(elems[0])
    for i in order:
        total = total + elems[i]
    return total


@dataclass
class RowOp:
    """Applier for x = {x_k} -> sum_k T_k x_k over a finite operator list."""

    blocks: list
    norm_bound: float
    bound_kind: str  # abs_sum | subset_max
    subset_exact: bool = True
    adjoint_check_ratio: float = field(default=0.0)

    def __len__(self) -> int:
        return len(self.blocks)

    def as_matrix(self) -> np.ndarray:
        """Block-row matrix [T_0 T_1 ...] acting on the product space."""
        if not self.blocks:
            return np.zeros((0, 0), dtype=complex)
        return np.hstack(self.blocks)

    def apply(self, xs, eps: float = 1e-12, seed: int = 0):
        """Apply to a family of vectors; returns (sum, certificate)."""
        if isinstance(xs, IndexedFamily):
            xs = [xs.element(i) for i in range(_count_cap(xs, len(self.blocks)))]
        xs = [as_vector(x) for x in xs]
        if len(xs) != len(self.blocks):
            raise DimensionMismatch("family length does not match the operator list")
        terms = [t @ x for t, x in zip(self.blocks, xs)]
        fam = IndexedFamily.from_vectors(
            terms, dim=self.blocks[0].shape[0] if self.blocks else None
        )
        return ms_sum(fam, eps, seed=seed)

    def prefix_sums(self, xs):
        xs = [as_vector(x) for x in xs]
        out = []
        total = np.zeros(self.blocks[0].shape[0], dtype=complex) if self.blocks else np.zeros(0)
        for t, x in zip(self.blocks, xs):
            total = total + t @ x
            out.append(total.copy())
        return out


def row_operator_abs(mats) -> RowOp:
    """Row operator from an absolutely summable operator family.

    The certified bound is the norm sum; the assembled block-row matrix is
    checked against it.
    """
    blocks = [as_matrix(m) for m in mats]
    if any(b.shape != blocks[0].shape for b in blocks):
        raise DimensionMismatch("operator blocks have mixed shapes")
    total = float(sum(operator_norm(b) for b in blocks))
    if not math.isfinite(total):
        raise EnvelopeMissing("norm sum is not finite")
    return RowOp(blocks=blocks, norm_bound=total, bound_kind="abs_sum")


def subset_norm_bound(mats, budget: int = 15, seed: int = 0, trials: int = 2000):
    """Max of ||sum over F|| over finite subsets F of the list.

    Exact (Gray-code enumeration of all subsets) when the list length is at
    most ``budget``; otherwise the max over prefixes plus ``trials`` random
    subsets, reported as a certified lower bound.
    """
    blocks = [as_matrix(m) for m in mats]
    m = len(blocks)
    if m == 0:
        return 0.0, True
    if any(b.shape != blocks[0].shape for b in blocks):
        raise DimensionMismatch("operator blocks have mixed shapes")
    if m <= budget:
        best = 0.0
        acc = np.zeros_like(blocks[0])
        prev = 0
        for g in range(1, 1 << m):
            gray = g ^ (g >> 1)
            flip = gray ^ prev
            idx = flip.bit_length() - 1
            if gray & flip:
                acc = acc + blocks[idx]
            else:
                acc = acc - blocks[idx]
            prev = gray
            best = max(best, operator_norm(acc))
        return best, True
    best = 0.0
    acc = np.zeros_like(blocks[0])
    for b in blocks:
        acc = acc + b
        best = max(best, operator_norm(acc))
    rng = np.random.default_rng(seed)
    stacked = np.stack(blocks)
    for _ in range(trials):
        mask = rng.random(m) < 0.5
        if not mask.any():
            continue
        best = max(best, operator_norm(np.tensordot(mask.astype(float), stacked, 1)))
    return best, False


def row_operator_bounded(
    mats,
    C_subset_budget: int = 15,
    space: KreinSpace | None = None,
    seed: int = 0,
    trials: int = 2000,
    u_trials: int = 100,
):
    """Row operator under a uniform finite-subset norm bound C.

    Also exercises the adjoint-column operator W u = {T_k^{*K} u}, verifying
    sum_k ||T_k^{*K} u||^2 <= 4 C^2 ||u||^2 on random probes; the worst ratio
    of the two sides is recorded on the returned operator.
    """
    blocks = [as_matrix(m) for m in mats]
    c, exact = subset_norm_bound(blocks, budget=C_subset_budget, seed=seed, trials=trials)
    op = RowOp(blocks=blocks, norm_bound=c, bound_kind="subset_max", subset_exact=exact)
    if blocks and c > 0.0:
        n = blocks[0].shape[0]
        j = space.J if space is not None else np.eye(n)
        adj = [j @ b.conj().T @ j for b in blocks]
        rng = np.random.default_rng(seed + 1)
        worst = 0.0
        for _ in range(u_trials):
            u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            lhs = float(sum(np.linalg.norm(a @ u) ** 2 for a in adj))
            rhs = 4.0 * c * c * float(np.linalg.norm(u) ** 2)
            worst = max(worst, lhs / rhs)
        op.adjoint_check_ratio = worst
    return op, c


@dataclass(frozen=True)
class ProbeResult:
    residual: float
    preimage_norm: float


def range_membership_probe(
    t, h, tol: TolerancePolicy = DEFAULT_TOL
) -> ProbeResult:
    """Least-squares probe of h in ran T.

    On truncation ladders, a bounded residual with blowing-up preimage norm
    is the non-membership signal.
    """
    t = as_matrix(t)
    h = as_vector(h)
    if operator_norm(t) == 0.0:
        raise DimensionMismatch("probe needs a nonzero operator")
    if h.size != t.shape[0]:
        raise DimensionMismatch("target length does not match operator rows")
    rcond = max(t.shape) * tol.relative_eps
    x = np.linalg.lstsq(t, h, rcond=rcond)[0]
    return ProbeResult(
        residual=float(np.linalg.norm(t @ x - h)),
        preimage_norm=float(np.linalg.norm(x)),
    )


def truncation_chain(x, max_terms: int = 64):
    """Telescoping approximants y_m with sum x and sum of norms <= 3 ||x||.

    x_m is the shortest prefix truncation of x with ||x - x_m|| <= ||x||/2^m
    and y_m = x_m - x_{m-1}; the chain stops once x_m equals x.
    """
    x = as_vector(x)
    norm_x = float(np.linalg.norm(x))
    if norm_x == 0.0:
        return []
    tail = np.sqrt(np.concatenate([np.cumsum(np.abs(x[::-1]) ** 2)[::-1], [0.0]]))
    ys = []
    prev = np.zeros_like(x)
    for m in range(1, max_terms + 1):
        bound = norm_x / 2.0**m
        j = int(np.searchsorted(-tail, -bound))  # first index with tail <= bound
        cur = x.copy()
        cur[j:] = 0.0
        ys.append(cur - prev)
        prev = cur
        if j >= x.size or tail[j] == 0.0:
            break
    return ys
