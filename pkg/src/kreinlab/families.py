"""Analyzers for families of projections: regular families and their frame
bounds, nets of projections and their limits, sums of normal projections, and
sums of regular-plus-neutral (qpr) families.

Infinite families are represented by finite truncations; every analyzer
computes its conditions by independent numerical routes so that the
equivalences between them can be cross-checked on each instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditionViolated,
    DimensionMismatch,
    IncompatibleNet,
    NotIdempotent,
    NotNeutralRange,
    NotNormalInput,
    NotOrthogonalFamily,
    NotSelfadjointFamily,
    SingularX,
    UnboundedNet,
)
from .krein import KreinSpace, Subspace, classify
from .num_core import (
    as_matrix,
    intersect,
    operator_norm,
    orthonormal_range_basis,
    same_span,
    sum_span,
)
from .projections import ProjectionOp, kadjoint
from .summation import RowOp, row_operator_bounded, subset_norm_bound

__all__ = [
    "RegularFamilyReport",
    "NetOfProjections",
    "QprSumResult",
    "analyze_regular_family",
    "verify_similarity_condition",
    "net_limit",
    "sum_normal_family",
    "sum_qpr_family",
]

_FLAG_EPS = 1e-9
_ANGLE_TOL = 1e-8
_COND_CAP = 1e12


def _common_space(ops) -> KreinSpace:
    if not ops:
        raise DimensionMismatch("family must not be empty")
    space = ops[0].space
    if any(op.space.dim != space.dim for op in ops):
        raise DimensionMismatch("family members live in different spaces")
    return space


def _check_range_orthogonality(space: KreinSpace, bases, scale: float = 1.0):
    """Pairwise K-orthogonality of range bases via cross Gram blocks."""
    j_bases = [space.J @ b for b in bases]
    for i in range(len(bases)):
        for k in range(i + 1, len(bases)):
            if bases[i].shape[1] == 0 or bases[k].shape[1] == 0:
                continue
            defect = operator_norm(bases[i].conj().T @ j_bases[k])
            if defect > _FLAG_EPS * max(1.0, scale):
                raise NotOrthogonalFamily(
                    f"ranges {i} and {k} are not orthogonal (defect {defect:.3e})"
                )


@dataclass(frozen=True)
class RegularFamilyReport:
    """Joint report on a pairwise-orthogonal family of selfadjoint projections.

    ``C`` is the finite-subset norm bound (exact when ``C_exact``); ``C1``
    and ``C2`` are the frame constants: extreme eigenvalues of the
    compression of sum E^H E to the span, so that
    C1 ||f||^2 <= sum ||E f||^2 <= C2 ||f||^2 for f in the span.
    """

    C: float
    C_exact: bool
    C1: float
    C2: float
    span_regular: bool
    span_margin: float
    P_sum: ProjectionOp | None
    condition_flags: dict
    span_basis: np.ndarray


def analyze_regular_family(
    Es,
    subset_budget: int = 15,
    seed: int = 0,
    subset_trials: int = 2000,
) -> RegularFamilyReport:
    """Equivalence checks for a family of selfadjoint projections.

    The four condition flags are computed independently:
    c1 ranks add (the orthogonal sum is direct and spans the closed span),
    c2 a finite subset-norm bound exists at working precision,
    c3 the operator sum is the selfadjoint projection onto the span,
    c5 the span is regular with finite frame constants.
    """
    space = _common_space(Es)
    for i, e in enumerate(Es):
        if not e.j_selfadjoint:
            raise NotSelfadjointFamily(f"member {i} is not J-selfadjoint")
    bases = [e.range_basis for e in Es]
    norm_scale = max(e.norm() for e in Es)
    _check_range_orthogonality(space, bases, scale=norm_scale**2)

    c, c_exact = subset_norm_bound(
        [e.matrix for e in Es], budget=subset_budget, seed=seed, trials=subset_trials
    )

    span_basis = bases[0]
    for b in bases[1:]:
        span_basis = sum_span(span_basis, b, space.tol)
    ranks_add = span_basis.shape[1] == sum(b.shape[1] for b in bases)

    flag_c2 = bool(np.isfinite(c) and c <= _COND_CAP)

    total = sum(e.matrix for e in Es)
    p_sum = None
    flag_c3 = False
    try:
        cand = ProjectionOp.from_matrix(space, total)
        flag_c3 = cand.j_selfadjoint and same_span(cand.range_basis, span_basis, _ANGLE_TOL)
        if flag_c3:
            p_sum = cand
    except NotIdempotent:
        flag_c3 = False

    span = Subspace(space, span_basis)
    cls = classify(span)
    gram_sum = sum(e.matrix.conj().T @ e.matrix for e in Es)
    comp = span_basis.conj().T @ gram_sum @ span_basis
    if comp.shape[0]:
        ev = np.linalg.eigvalsh((comp + comp.conj().T) / 2.0)
        c1, c2 = float(ev[0]), float(ev[-1])
    else:
        c1 = c2 = 0.0
    flag_c5 = bool(
        cls.regular and c2 <= _COND_CAP and c1 > len(Es) * space.tol.relative_eps * max(c2, 1.0)
    )

    return RegularFamilyReport(
        C=c,
        C_exact=c_exact,
        C1=c1,
        C2=c2,
        span_regular=cls.regular,
        span_margin=cls.regularity_margin,
        P_sum=p_sum,
        condition_flags={"c1": bool(ranks_add), "c2": flag_c2, "c3": bool(flag_c3), "c5": flag_c5},
        span_basis=span_basis,
    )


def verify_similarity_condition(Es, X) -> bool:
    """Check whether X E X^{-1} is Hermitian idempotent for every member.

    Verification only; no similarity is constructed.  X must be invertible
    with condition number below 1e12.
    """
    x = as_matrix(X)
    if x.shape[0] != x.shape[1]:
        raise SingularX("similarity must be square")
    if np.linalg.cond(x) > _COND_CAP:
        raise SingularX("similarity is numerically singular")
    xi = np.linalg.inv(x)
    for e in Es:
        mat = e.matrix if isinstance(e, ProjectionOp) else as_matrix(e)
        f = x @ mat @ xi
        norm = operator_norm(f)
        if operator_norm(f - f.conj().T) > _FLAG_EPS * max(1.0, norm):
            return False
        if operator_norm(f @ f - f) > _FLAG_EPS * (1.0 + norm):
            return False
    return True


class NetOfProjections:
    """Finite ordered list of projections standing for a cofinal subnet.

    Compatibility means P_d P_d' = P_d' P_d = P_d for d <= d'; the uniform
    bound is the largest operator norm over the net.
    """

    def __init__(self, projections):
        self.projections = list(projections)
        space = _common_space(self.projections)
        self.space = space
        self.uniform_bound = max(p.norm() for p in self.projections)
        worst = 0.0
        scale = max(1.0, self.uniform_bound**2)
        for i in range(len(self.projections)):
            for k in range(i + 1, len(self.projections)):
                a, b = self.projections[i].matrix, self.projections[k].matrix
                worst = max(
                    worst,
                    operator_norm(a @ b - a),
                    operator_norm(b @ a - a),
                )
        self.compatibility_defect = worst
        self.compatibility = worst <= _FLAG_EPS * scale

    def __len__(self) -> int:
        return len(self.projections)

    def kadjoint_net(self) -> "NetOfProjections":
        return NetOfProjections(
            [
                ProjectionOp.from_matrix(p.space, kadjoint(p.matrix, p.space))
                for p in self.projections
            ]
        )


def _stabilized(net: NetOfProjections) -> ProjectionOp:
    ranks = [p.rank for p in net.projections]
    final = ranks[-1]
    d_star = len(ranks) - 1
    while d_star > 0 and ranks[d_star - 1] == final:
        d_star -= 1
    limit = net.projections[d_star]
    scale = max(1.0, net.uniform_bound)
    for p in net.projections[d_star:]:
        if operator_norm(p.matrix - limit.matrix) > _FLAG_EPS * scale:
            raise IncompatibleNet("ranks stabilized but the operators differ")
    return limit


def net_limit(net: NetOfProjections, bound_cap: float = 1e8) -> ProjectionOp:
    """Limit of a compatible, uniformly bounded net of projections.

    In finite dimension the ranges stabilize: the limit is the first member
    whose rank persists to the end of the list.  The range of the limit is
    the span of all ranges and its kernel the intersection of all kernels;
    when every member is normal, so is the limit, and the Krein adjoint of
    the limit is the limit of the Krein adjoints.
    """
    if not net.compatibility:
        raise IncompatibleNet(
            f"net is not compatible (defect {net.compatibility_defect:.3e})"
        )
    if not np.isfinite(net.uniform_bound) or net.uniform_bound > bound_cap:
        raise UnboundedNet(f"uniform bound {net.uniform_bound:.3e} exceeds cap")
    limit = _stabilized(net)
    space = net.space

    span = net.projections[0].range_basis
    for p in net.projections[1:]:
        span = sum_span(span, p.range_basis, space.tol)
    if not same_span(limit.range_basis, span, _ANGLE_TOL):
        raise IncompatibleNet("limit range does not match the span of ranges")
    ker = net.projections[0].kernel_basis
    for p in net.projections[1:]:
        ker = intersect(ker, p.kernel_basis, space.tol)
    if not same_span(limit.kernel_basis, ker, _ANGLE_TOL):
        raise IncompatibleNet("limit kernel does not match the intersection of kernels")

    if all(p.normal for p in net.projections):
        if not limit.normal:
            raise IncompatibleNet("normality was lost in the limit")
        adj_limit = _stabilized(net.kadjoint_net())
        defect = operator_norm(kadjoint(limit.matrix, space) - adj_limit.matrix)
        if defect > _FLAG_EPS * max(1.0, net.uniform_bound):
            raise IncompatibleNet("adjoint net limit differs from the adjoint of the limit")
    return limit


def sum_normal_family(Qs) -> ProjectionOp:
    """Sum of a family of normal projections under pairwise orthogonality.

    Requires, for each pair, that Q_m Q_l, Q_m^{*K} Q_l and Q_m Q_l^{*K} all
    vanish; then every partial sum is a normal projection, and the total is
    the normal projection whose range is the span of the ranges and whose
    kernel is the intersection of the kernels.
    """
    space = _common_space(Qs)
    for i, q in enumerate(Qs):
        if not q.normal:
            raise NotNormalInput(f"member {i} is not a normal projection")
    adjs = [kadjoint(q.matrix, space) for q in Qs]
    for i in range(len(Qs)):
        for k in range(len(Qs)):
            if i == k:
                continue
            scale = _FLAG_EPS * max(1.0, Qs[i].norm() * Qs[k].norm())
            checks = (
                ("Q_mu @ Q_lam", operator_norm(Qs[i].matrix @ Qs[k].matrix)),
                ("adj(Q_mu) @ Q_lam", operator_norm(adjs[i] @ Qs[k].matrix)),
                ("Q_mu @ adj(Q_lam)", operator_norm(Qs[i].matrix @ adjs[k])),
            )
            for relation, defect in checks:
                if defect > scale:
                    raise ConditionViolated(
                        f"pair ({i}, {k}) violates {relation} (defect {defect:.3e})",
                        pair=(i, k),
                        relation=relation,
                    )

    partial = np.zeros((space.dim, space.dim), dtype=complex)
    for i, q in enumerate(Qs):
        partial = partial + q.matrix
        try:
            cand = ProjectionOp.from_matrix(space, partial)
        except NotIdempotent as exc:
            raise ConditionViolated(
                f"partial sum through member {i} is not a projection", pair=(0, i)
            ) from exc
        if not cand.normal:
            raise ConditionViolated(
                f"partial sum through member {i} is not normal", pair=(0, i)
            )
    total = cand

    span = Qs[0].range_basis
    for q in Qs[1:]:
        span = sum_span(span, q.range_basis, space.tol)
    if not same_span(total.range_basis, span, _ANGLE_TOL):
        raise ConditionViolated("sum range does not match the span of ranges")
    ker = Qs[0].kernel_basis
    for q in Qs[1:]:
        ker = intersect(ker, q.kernel_basis, space.tol)
    if not same_span(total.kernel_basis, ker, _ANGLE_TOL):
        raise ConditionViolated("sum kernel does not match the intersection of kernels")
    adj_sum = sum(adjs)
    if operator_norm(kadjoint(total.matrix, space) - adj_sum) > _FLAG_EPS * max(
        1.0, total.norm()
    ):
        raise ConditionViolated("adjoint of the sum differs from the sum of adjoints")
    for i in range(len(Qs)):
        for k in range(i + 1, len(Qs)):
            common = intersect(Qs[i].range_basis, Qs[k].range_basis, space.tol)
            if common.shape[1]:
                raise ConditionViolated(
                    f"ranges {i} and {k} intersect nontrivially", pair=(i, k)
                )
    return total


@dataclass(frozen=True)
class QprSumResult:
    """Sum of a family of regular-plus-neutral subspaces."""

    P: ProjectionOp
    T_row: RowOp
    M_basis: np.ndarray
    N_basis: np.ndarray
    C: float
    report: RegularFamilyReport
    containment_ok: bool
    reconstruction_samples: int
    max_span_residual: float
    max_prefix_error: float


def sum_qpr_family(
    Es,
    Ts,
    subset_budget: int = 15,
    seed: int = 0,
    samples: int = 50,
) -> QprSumResult:
    """Sum of subspaces M_k = ran E_k (+) ran T_k with neutral T ranges.

    The regular parts are summed through the selfadjoint projection route,
    the neutral parts through a bounded row operator; the result spans
    ran P (+) N where N is the column space of the concatenated T blocks.
    Sampled span vectors are checked for membership and for prefix
    (Moore-Smith) reconstruction with geometrically decaying coefficients.
    """
    space = _common_space(Es)
    t_blocks = [as_matrix(t) for t in Ts]
    for i, t in enumerate(t_blocks):
        if t.shape != (space.dim, space.dim):
            raise DimensionMismatch(f"operator {i} does not match the space")
    t_ranges = [orthonormal_range_basis(t, space.tol) for t in t_blocks]
    for i, rb in enumerate(t_ranges):
        if rb.shape[1] == 0:
            continue
        cls = classify(Subspace(space, rb))
        if cls.kind != "neutral":
            raise NotNeutralRange(f"operator {i} has a non-neutral range ({cls.kind})")

    scale = max(
        [e.norm() for e in Es] + [operator_norm(t) for t in t_blocks] + [1.0]
    )
    _check_range_orthogonality(
        space, [e.range_basis for e in Es] + t_ranges, scale=scale**2
    )

    report = analyze_regular_family(Es, subset_budget=subset_budget, seed=seed)
    if report.P_sum is None:
        raise NotOrthogonalFamily("selfadjoint sum of the regular parts failed")
    p = report.P_sum

    t_row, c_t = row_operator_bounded(
        t_blocks, C_subset_budget=subset_budget, space=space, seed=seed
    )
    c = max(report.C, c_t)

    if t_blocks:
        n_basis = orthonormal_range_basis(np.hstack(t_blocks), space.tol)
    else:
        n_basis = np.zeros((space.dim, 0), dtype=complex)
    if n_basis.shape[1]:
        n_cls = classify(Subspace(space, n_basis))
        if n_cls.kind != "neutral":
            raise NotNeutralRange("concatenated neutral parts are not neutral")
        if intersect(n_basis, p.range_basis, space.tol).shape[1]:
            raise NotOrthogonalFamily("neutral part meets the regular span")
    m_basis = sum_span(p.range_basis, n_basis, space.tol)

    rng = np.random.default_rng(seed)
    max_residual = 0.0
    max_prefix_err = 0.0
    n = space.dim
    for _ in range(samples):
        weights = 2.0 ** -np.arange(len(Es) + len(t_blocks))
        g = [
            w * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
            for w in weights
        ]
        terms = [e.matrix @ gi for e, gi in zip(Es, g)]
        terms += [t @ gi for t, gi in zip(t_blocks, g[len(Es) :])]
        f = np.sum(terms, axis=0)
        nf = np.linalg.norm(f)
        if nf == 0.0:
            continue
        resid = np.linalg.norm(f - m_basis @ (m_basis.conj().T @ f)) / nf
        max_residual = max(max_residual, float(resid))
        prefix = np.zeros(n, dtype=complex)
        errs = []
        for term in terms:
            prefix = prefix + term
            errs.append(np.linalg.norm(f - prefix))
        max_prefix_err = max(max_prefix_err, float(errs[-1]) / nf)
    containment_ok = max_residual <= _ANGLE_TOL and max_prefix_err <= _ANGLE_TOL

    return QprSumResult(
        P=p,
        T_row=t_row,
        M_basis=m_basis,
        N_basis=n_basis,
        C=c,
        report=report,
        containment_ok=containment_ok,
        reconstruction_samples=samples,
        max_span_residual=max_residual,
        max_prefix_error=max_prefix_err,
    )
