"""
Schedule selection policies.

Every policy maps a slot's SystemSpectra to a schedule d (tasks served per
flow). Enforced policies always land in the feasible polytope of a
schedulable system; static_split and idle are comparison baselines that
may break guarantees.

Policies:
- max_slack: point of the max-slack hypercuboid, residual by flow index
- per_class_max_slack: max-slack inside each class of a partition
- edf: earliest deadline tau_h(p) first, ties by flow index then FIFO
- priority: greedy vertex of the mu-slice permutohedron
- fair: rounded vertex centroid (Shapley value) of the mu-slice
- baseline_excess: point of the baseline permutohedron plus weighted excess
- static_split: fixed capacity shares, capped by the queue
- idle: serves nothing
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
import heapq
import itertools
import logging
from typing import Iterator, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from wcsched.algebra.cumvec import BEYOND_HORIZON, CumVec, tau
from wcsched.errors import (
    CausalityViolationError,
    InfeasibleTotalError,
    InvalidArgumentError,
    InvalidBaseError,
    NoScheduleError,
    PolicyError,
    UnsupportedServiceKindError,
)
from wcsched.feasible.permutohedron import (
    beta_mu,
    contains,
    per_class_beta,
    priority_order,
    shapley_centroid,
    validate_partition,
    vertex,
)
from wcsched.feasible.setfunction import SetFunction
from wcsched.feasible.system import SystemSpectra, baseline
from wcsched.sched.starvation import StarvationRepartitioner

logger = logging.getLogger(__name__)

PolicyKind = Literal[
    "max_slack",
    "per_class_max_slack",
    "edf",
    "priority",
    "fair",
    "baseline_excess",
    "static_split",
    "idle",
]


@dataclass(frozen=True)
class Schedule:
    """Tasks served per flow in one slot."""
    d: tuple[int, ...]
    slot: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if any(x < 0 for x in self.d):
            raise InvalidArgumentError(f"negative service in {list(self.d)}")

    @property
    def total(self) -> int:
        return sum(self.d)

    def check(self, q: Sequence[int], capacity: int) -> None:
        """Raise unless d <= q and sum(d) <= c."""
        for dk, qk in zip(self.d, q):
            if dk > qk:
                raise CausalityViolationError(dk, qk)
        if self.total > capacity:
            raise PolicyError(f"schedule {list(self.d)} exceeds capacity {capacity}")


class PolicySpec(BaseModel):
    """Policy selection as read from JSON, e.g. {"policy": "fair", "mu": "work_conserving"}."""
    model_config = ConfigDict(extra="forbid")

    policy: PolicyKind = "max_slack"
    mu: Literal["work_conserving", "baseline", "fixed"] = "work_conserving"
    mu_value: int | None = None
    priority: list[int] | None = None
    partition: list[list[int]] | None = None
    class_priority: list[int] | None = None
    class_selection: Literal["priority", "fair", "explicit"] = "fair"
    nu: list[int] | None = None
    weights: list[int] | None = None
    base: Literal["fair", "priority"] = "fair"
    repartition_after: int | None = None

    @model_validator(mode="after")
    def _consistent(self) -> "PolicySpec":
        if self.mu == "fixed" and self.mu_value is None:
            raise ValueError("mu='fixed' needs mu_value")
        if self.policy == "per_class_max_slack" and self.partition is None:
            raise ValueError("per_class_max_slack needs a partition")
        if self.class_selection == "explicit" and self.policy == "per_class_max_slack" and self.nu is None:
            raise ValueError("class_selection='explicit' needs nu")
        if self.weights is not None and any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if self.repartition_after is not None and self.repartition_after < 1:
            raise ValueError("repartition_after must be >= 1")
        return self


# -- schedule constructions -------------------------------------------------


def _fill(lo: Sequence[int], hi: Sequence[int], total: int) -> tuple[int, ...]:
    """lo plus the residual total - sum(lo), handed out in flow order up to hi."""
    d = list(lo)
    residual = total - sum(lo)
    for k in range(len(d)):
        if residual <= 0:
            break
        give = min(hi[k] - d[k], residual)
        d[k] += give
        residual -= give
    if residual > 0:
        raise NoScheduleError(f"cannot place {residual} more tasks within the caps")
    return tuple(d)


def hypercuboid(system: SystemSpectra, mu: int, flows: Sequence[int] | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    Bounds [p_{j_mu}, p_{j_mu + 1}] of max-slack schedules with total mu.

    j_mu = tau_{mu+1} of the summed p-vector; when that is beyond the
    horizon the bounds are [p_H, q].
    """
    flows = list(range(system.n)) if flows is None else list(flows)
    q_total = sum(system.q[k] for k in flows)
    if mu > q_total:
        raise NoScheduleError(f"mu={mu} exceeds queued total {q_total}")
    if mu < 0:
        raise InvalidArgumentError("mu must be nonnegative")

    rows = [system.p[k] for k in flows]
    p_total = np.sum(rows, axis=0) if rows else np.zeros(system.horizon + 1, dtype=np.int64)
    j_mu = tau(CumVec.from_array(p_total), mu + 1)
    if j_mu is BEYOND_HORIZON:
        lo = tuple(int(r[-1]) for r in rows)
        hi = tuple(system.q[k] for k in flows)
    else:
        lo = tuple(int(r[j_mu]) for r in rows)
        hi = tuple(int(r[j_mu + 1]) for r in rows)
    return lo, hi


def max_slack(system: SystemSpectra, mu: int) -> tuple[int, ...]:
    """Max-slack schedule with total mu: minimizes every next-slot spectral sum."""
    lo, hi = hypercuboid(system, mu)
    return _fill(lo, hi, mu)


def per_class_max_slack(
    system: SystemSpectra,
    partition: Sequence[Sequence[int]],
    nu: Sequence[int],
) -> tuple[int, ...]:
    """Max-slack schedule inside each class, class totals given by nu."""
    classes = validate_partition(partition, system.n)
    if len(nu) != len(classes):
        raise InvalidArgumentError("one class total per class required")
    d = [0] * system.n
    for members_, total in zip(classes, nu):
        lo, hi = hypercuboid(system, total, members_)
        for k, dk in zip(members_, _fill(lo, hi, total)):
            d[k] = dk
    return tuple(d)


def _task_keys(p: np.ndarray, q1: int, flow: int) -> Iterator[tuple[int, int, int, int]]:
    vec = CumVec.from_array(p)
    for h in range(1, q1 + 1):
        offset = tau(vec, h)
        if offset is BEYOND_HORIZON:
            yield (1, 0, flow, h)
        else:
            yield (0, offset, flow, h)


def edf(system: SystemSpectra, mu: int) -> tuple[int, ...]:
    """Serve the mu queued tasks with the earliest deadlines tau_h(p)."""
    if any(kind != "dual" for kind in system.kinds):
        raise UnsupportedServiceKindError("edf needs dual-curve services on every flow")
    if mu > system.q_total:
        raise NoScheduleError(f"mu={mu} exceeds queued total {system.q_total}")
    d = [0] * system.n
    queues = [_task_keys(system.p[k], system.q[k], k) for k in range(system.n)]
    for _, _, flow, _ in itertools.islice(heapq.merge(*queues), mu):
        d[flow] += 1
    return tuple(d)


def priority_vertex(
    system: SystemSpectra,
    mu: int,
    priority: Sequence[int],
    beta: SetFunction | None = None,
) -> tuple[int, ...]:
    """Strict priority: priority[0] is served as much as feasibility allows."""
    beta = beta if beta is not None else baseline(system)
    slice_ = beta_mu(beta, mu, system.q, system.capacity)
    return vertex(slice_, priority_order(priority))


def fair(system: SystemSpectra, mu: int, beta: SetFunction | None = None) -> tuple[int, ...]:
    """Rounded vertex centroid of the mu-slice."""
    beta = beta if beta is not None else baseline(system)
    slice_ = beta_mu(beta, mu, system.q, system.capacity)
    return shapley_centroid(slice_, system.q, system.capacity).rounded


def baseline_excess(
    system: SystemSpectra,
    base: Sequence[int],
    weights: Sequence[int] | None = None,
    beta: SetFunction | None = None,
) -> tuple[int, ...]:
    """Base point of the baseline permutohedron plus c - beta(Omega) by weighted round-robin."""
    beta = beta if beta is not None else baseline(system)
    floor_total = beta(beta.full)
    if not contains(beta, system.q, system.capacity, base, mu=floor_total):
        raise InvalidBaseError(f"{list(base)} is not in the baseline permutohedron")
    weights = list(weights) if weights is not None else [1] * system.n
    if len(weights) != system.n:
        raise InvalidArgumentError("one weight per flow required")

    d = list(base)
    excess = system.capacity - floor_total
    while excess > 0:
        progressed = False
        for k in range(system.n):
            give = min(weights[k], system.q[k] - d[k], excess)
            if give > 0:
                d[k] += give
                excess -= give
                progressed = True
        if not progressed:
            break
    return tuple(d)


def static_split(system: SystemSpectra, weights: Sequence[int] | None = None) -> tuple[int, ...]:
    """Capacity shares by weight (largest remainder), capped by the queue."""
    weights = list(weights) if weights is not None else [1] * system.n
    if len(weights) != system.n:
        raise InvalidArgumentError("one weight per flow required")
    total_weight = sum(weights)
    if total_weight == 0:
        return (0,) * system.n
    c = system.capacity
    shares = [c * w // total_weight for w in weights]
    order = sorted(range(system.n), key=lambda k: (-(c * weights[k] % total_weight), k))
    for k in order[: c - sum(shares)]:
        shares[k] += 1
    return tuple(min(s, q1) for s, q1 in zip(shares, system.q))


def per_class_totals(
    system: SystemSpectra,
    mu: int,
    partition: Sequence[Sequence[int]],
    selection: str,
    class_priority: Sequence[int] | None = None,
    beta: SetFunction | None = None,
) -> tuple[int, ...]:
    """Class totals nu from the per-class permutohedron: a vertex or the rounded centroid."""
    beta = beta if beta is not None else baseline(system)
    classes = validate_partition(partition, system.n)
    sampled = per_class_beta(beta_mu(beta, mu, system.q, system.capacity), classes)
    if selection == "priority":
        order = class_priority if class_priority is not None else list(range(len(classes)))
        return vertex(sampled, priority_order(order))
    class_q = [sum(system.q[k] for k in cls) for cls in classes]
    return shapley_centroid(sampled, class_q, system.capacity).rounded


def per_class_priority(
    system: SystemSpectra,
    mu: int,
    partition: Sequence[Sequence[int]],
    class_priority: Sequence[int],
    beta: SetFunction | None = None,
) -> tuple[int, ...]:
    """Inter-class priority, max-slack within classes."""
    nu = per_class_totals(system, mu, partition, "priority", class_priority, beta)
    return per_class_max_slack(system, partition, nu)


def per_class_fair(
    system: SystemSpectra,
    mu: int,
    partition: Sequence[Sequence[int]],
    beta: SetFunction | None = None,
) -> tuple[int, ...]:
    """Fair split between classes, max-slack within classes."""
    nu = per_class_totals(system, mu, partition, "fair", beta=beta)
    return per_class_max_slack(system, partition, nu)


# -- schedulers --------------------------------------------------------------


def resolve_mu(spec: PolicySpec, system: SystemSpectra, beta: SetFunction | None) -> int:
    """Total service for this slot under the policy's mu rule."""
    if spec.mu == "work_conserving":
        return min(system.capacity, system.q_total)
    if spec.mu == "baseline":
        if beta is None:
            raise InfeasibleTotalError("mu='baseline' needs the baseline function")
        return beta(beta.full)
    return int(spec.mu_value)  # type: ignore[arg-type]


class BaseScheduler(ABC):
    """Abstract base class for schedule selection policies."""

    name = "abstract"
    enforced = True  # outputs are checked against the feasible polytope
    needs_baseline = True

    def __init__(self, spec: PolicySpec):
        self.spec = spec

    @abstractmethod
    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        """Pick this slot's schedule."""
        pass

    def observe(self, d: Sequence[int], backlogs: Sequence[int]) -> None:
        """Hook called after each slot with the served counts and new backlogs."""
        pass

    def _mu(self, system: SystemSpectra, beta: SetFunction | None) -> int:
        return resolve_mu(self.spec, system, beta)


class MaxSlackScheduler(BaseScheduler):
    """Max-slack: leaves the most room for future admissions."""

    name = "max_slack"

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        return max_slack(system, self._mu(system, beta))


class EDFScheduler(BaseScheduler):
    """Earliest-deadline-first on dual-curve deadlines."""

    name = "edf"

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        return edf(system, self._mu(system, beta))


class PriorityScheduler(BaseScheduler):
    """Strict flow priority via a permutohedron vertex."""

    name = "priority"

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        order = self.spec.priority if self.spec.priority is not None else list(range(system.n))
        return priority_vertex(system, self._mu(system, beta), order, beta)


class FairScheduler(BaseScheduler):
    """Equal priorities via the vertex centroid."""

    name = "fair"

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        return fair(system, self._mu(system, beta), beta)


class BaselineExcessScheduler(BaseScheduler):
    """
    Baseline permutohedron point plus a free allocation of excess capacity.

    The base point is the centroid (base="fair") or a priority vertex
    (base="priority") of the baseline slice mu = beta(Omega).
    """

    name = "baseline_excess"

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        beta = beta if beta is not None else baseline(system)
        floor_total = beta(beta.full)
        if self.spec.base == "priority":
            order = self.spec.priority if self.spec.priority is not None else list(range(system.n))
            base = priority_vertex(system, floor_total, order, beta)
        else:
            base = fair(system, floor_total, beta)
        return baseline_excess(system, base, self.spec.weights, beta)


class PerClassMaxSlackScheduler(BaseScheduler):
    """Per-class max-slack with class totals from the per-class permutohedron."""

    name = "per_class_max_slack"

    def __init__(self, spec: PolicySpec):
        super().__init__(spec)
        self.repartitioner: StarvationRepartitioner | None = None
        if spec.repartition_after is not None:
            self.repartitioner = StarvationRepartitioner(
                spec.partition or [],
                spec.class_priority,
                spec.repartition_after,
            )

    def _classes(self) -> tuple[list[list[int]], list[int] | None]:
        if self.repartitioner is not None:
            return self.repartitioner.current()
        return [list(c) for c in self.spec.partition or []], self.spec.class_priority

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        partition, class_priority = self._classes()
        if self.spec.class_selection == "explicit":
            return per_class_max_slack(system, partition, self.spec.nu or [])
        mu = self._mu(system, beta)
        if self.spec.class_selection == "priority":
            order = class_priority if class_priority is not None else list(range(len(partition)))
            return per_class_priority(system, mu, partition, order, beta)
        return per_class_fair(system, mu, partition, beta)

    def observe(self, d: Sequence[int], backlogs: Sequence[int]) -> None:
        if self.repartitioner is not None:
            self.repartitioner.observe(d, backlogs)


class StaticSplitScheduler(BaseScheduler):
    """Fixed weighted shares of c; ignores guarantees."""

    name = "static_split"
    enforced = False
    needs_baseline = False

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        return static_split(system, self.spec.weights)


class IdleScheduler(BaseScheduler):
    """Serves nothing."""

    name = "idle"
    enforced = False
    needs_baseline = False

    def select(self, system: SystemSpectra, beta: SetFunction | None) -> tuple[int, ...]:
        return (0,) * system.n


_SCHEDULERS: dict[str, type[BaseScheduler]] = {
    cls.name: cls
    for cls in (
        MaxSlackScheduler,
        EDFScheduler,
        PriorityScheduler,
        FairScheduler,
        BaselineExcessScheduler,
        PerClassMaxSlackScheduler,
        StaticSplitScheduler,
        IdleScheduler,
    )
}


def create_scheduler(spec: PolicySpec | dict | str) -> BaseScheduler:
    """
    Factory function to create a scheduler.

    Args:
        spec: PolicySpec, its JSON dict, or just a policy name

    Returns:
        Scheduler instance
    """
    if isinstance(spec, str):
        if spec not in _SCHEDULERS:
            raise ValueError(f"Unknown scheduling policy: {spec}")
        spec = PolicySpec(policy=spec)  # type: ignore[arg-type]
    elif isinstance(spec, dict):
        spec = PolicySpec.model_validate(spec)
    return _SCHEDULERS[spec.policy](spec)
