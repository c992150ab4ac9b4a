"""kreinlab: numerical subspace calculus in finite-dimensional Krein spaces.

Core objects: :class:`KreinSpace` (ambient dimension plus a fundamental
symmetry), :class:`Subspace` (orthonormal column basis), and
:class:`ProjectionOp` (certified idempotent with cached range and kernel).
On top of these sit family analyzers (frame bounds, normal sums, net limits)
and a truncation-ladder harness that renders infinite-dimensional
counterexamples as measurable asymptotics.
"""

__version__ = "0.1.0"

from .errors import KreinLabError
from .families import (
    NetOfProjections,
    QprSumResult,
    RegularFamilyReport,
    analyze_regular_family,
    net_limit,
    sum_normal_family,
    sum_qpr_family,
    verify_similarity_condition,
)
from .harness import MetricSeries, Scenario, list_scenarios, run_scenario
from .krein import (
    Classification,
    KreinSpace,
    QprDecomposition,
    Subspace,
    adapted_symmetry,
    check_qpr_criterion,
    classify,
    decompose_qpr,
    isotropic_part,
    kip,
    ortho_companion,
)
from .num_core import TolerancePolicy, principal_angles
from .projections import (
    ProjectionOp,
    check_order,
    kadjoint,
    normal_projection,
    oblique_projection,
    selfadjoint_projection,
)
from .summation import (
    IndexedFamily,
    MSCertificate,
    RowOp,
    ms_sum,
    range_membership_probe,
    row_operator_abs,
    row_operator_bounded,
    subset_norm_bound,
    truncation_chain,
)

__all__ = [
    "__version__",
    "KreinLabError",
    "TolerancePolicy",
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
    "principal_angles",
    "ProjectionOp",
    "kadjoint",
    "oblique_projection",
    "selfadjoint_projection",
    "normal_projection",
    "check_order",
    "IndexedFamily",
    "MSCertificate",
    "RowOp",
    "ms_sum",
    "row_operator_abs",
    "row_operator_bounded",
    "subset_norm_bound",
    "range_membership_probe",
    "truncation_chain",
    "RegularFamilyReport",
    "NetOfProjections",
    "QprSumResult",
    "analyze_regular_family",
    "verify_similarity_condition",
    "net_limit",
    "sum_normal_family",
    "sum_qpr_family",
    "Scenario",
    "MetricSeries",
    "run_scenario",
    "list_scenarios",
]
