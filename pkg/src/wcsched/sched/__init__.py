from wcsched.sched.policies import (
    BaseScheduler,
    BaselineExcessScheduler,
    EDFScheduler,
    FairScheduler,
    IdleScheduler,
    MaxSlackScheduler,
    PerClassMaxSlackScheduler,
    PolicySpec,
    PriorityScheduler,
    Schedule,
    StaticSplitScheduler,
    baseline_excess,
    create_scheduler,
    edf,
    fair,
    hypercuboid,
    max_slack,
    per_class_fair,
    per_class_max_slack,
    per_class_priority,
    per_class_totals,
    priority_vertex,
    resolve_mu,
    static_split,
)
from wcsched.sched.starvation import StarvationRepartitioner

__all__ = [
    "BaseScheduler",
    "BaselineExcessScheduler",
    "EDFScheduler",
    "FairScheduler",
    "IdleScheduler",
    "MaxSlackScheduler",
    "PerClassMaxSlackScheduler",
    "PolicySpec",
    "PriorityScheduler",
    "Schedule",
    "StaticSplitScheduler",
    "StarvationRepartitioner",
    "baseline_excess",
    "create_scheduler",
    "edf",
    "fair",
    "hypercuboid",
    "max_slack",
    "per_class_fair",
    "per_class_max_slack",
    "per_class_priority",
    "per_class_totals",
    "priority_vertex",
    "resolve_mu",
    "static_split",
]
