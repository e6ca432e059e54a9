"""Schedulability, baseline functions, feasible permutohedra and multiplexing gains."""
from wcsched.feasible.gains import GainReport, multiplexing_gain, rho
from wcsched.feasible.permutohedron import (
    CentroidPoint,
    beta_mu,
    class_sums,
    contains,
    first_violation,
    per_class_beta,
    priority_order,
    round_to_polytope,
    shapley_centroid,
    shapley_value,
    validate_partition,
    vertex,
)
from wcsched.feasible.setfunction import SetFunction, mask_of, members
from wcsched.feasible.system import (
    SchedulabilityVerdict,
    SystemSpectra,
    baseline,
    baseline_argmax,
    check_spectra,
    feasible_mu_range,
    is_schedulable,
    is_schedulable_dual,
    schedulability_slack,
)

__all__ = [
    "CentroidPoint",
    "GainReport",
    "SchedulabilityVerdict",
    "SetFunction",
    "SystemSpectra",
    "baseline",
    "baseline_argmax",
    "beta_mu",
    "check_spectra",
    "class_sums",
    "contains",
    "feasible_mu_range",
    "first_violation",
    "is_schedulable",
    "is_schedulable_dual",
    "mask_of",
    "members",
    "multiplexing_gain",
    "per_class_beta",
    "priority_order",
    "rho",
    "round_to_polytope",
    "schedulability_slack",
    "shapley_centroid",
    "shapley_value",
    "validate_partition",
    "vertex",
]
