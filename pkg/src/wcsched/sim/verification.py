"""
Guarantee checks and performance bounds computed from a run log.

Both work on the realized queued-arrival vector q of a flow (initial
backlog counted as slot-0 arrivals) and its realized departures d, over
the first L = min(run length, H) slots after the flow joined.
"""
from dataclasses import dataclass
import logging

from wcsched.algebra.cumvec import BEYOND_HORIZON, CumVec, tau
from wcsched.errors import InvalidArgumentError
from wcsched.sim.reports import RunLog
from wcsched.sim.scenario import load_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GuaranteeCheck:
    """Outcome of d >= psi(q) over the checked window."""
    flow_id: int
    passed: bool
    j: int | None = None
    deficit: int = 0
    checked: int = 0

    def to_dict(self) -> dict:
        return {
            "flow_id": self.flow_id,
            "passed": self.passed,
            "j": self.j,
            "deficit": self.deficit,
            "checked": self.checked,
        }


@dataclass(frozen=True)
class FlowBounds:
    """Realized worst backlog/delay next to the bounds implied by psi(q)."""
    flow_id: int
    max_backlog: int
    max_delay: int
    backlog_bound: int
    delay_bound: int | None  # None: some served task has no deadline within H

    def to_dict(self) -> dict:
        return {
            "flow_id": self.flow_id,
            "max_backlog": self.max_backlog,
            "max_delay": self.max_delay,
            "backlog_bound": self.backlog_bound,
            "delay_bound": self.delay_bound,
        }


def _realized(log: RunLog, flow_id: int) -> tuple[CumVec, CumVec, CumVec, int]:
    """(q, d, psi(q), L) of one flow, padded to the horizon by saturation."""
    admissions = log.admissions()
    if flow_id not in admissions:
        raise InvalidArgumentError(f"flow {flow_id} never joined this run")
    _, record = admissions[flow_id]
    service = load_service(record.service, _horizon_of(record.service), b=record.b)
    horizon = service.horizon

    arrivals, departures = log.flow_series(flow_id)
    window = min(len(arrivals), horizon)
    q_entries, d_entries = [0], [0]
    queued, served = record.b, 0
    for a, dk in zip(arrivals[:window], departures[:window]):
        queued += a
        served += dk
        q_entries.append(queued)
        d_entries.append(served)
    if window == 0:
        q_entries.append(record.b)
        d_entries.append(0)
    q = CumVec(tuple(q_entries)).resized(horizon)
    d = CumVec(tuple(d_entries)).resized(horizon)
    return q, d, service.evaluate(q), window


def _horizon_of(service: dict) -> int:
    if service.get("kind") == "spectral":
        return len(service["s"]) - 1
    return len(service["u"]) - 1


def verify_guarantee(log: RunLog, flow_id: int) -> GuaranteeCheck:
    """First j <= L with d_j < psi_j(q), or a pass."""
    q, d, psi, window = _realized(log, flow_id)
    for j in range(1, window + 1):
        if d[j] < psi[j]:
            logger.warning(f"guarantee broken at j={j} deficit={psi[j] - d[j]}", extra={"flow_id": flow_id})
            return GuaranteeCheck(flow_id, False, j, psi[j] - d[j], window)
    return GuaranteeCheck(flow_id, True, None, 0, window)


def bounds_report(log: RunLog) -> list[FlowBounds]:
    """
    Per-flow realized max backlog and delay with their analytic bounds.

    backlog bound: max_j (q_j - psi_j(q)); delay bound: max_h (tau_h(psi(q)) - tau_h(q))
    over the tasks served within the window.
    """
    out = []
    for flow_id in sorted(log.admissions()):
        q, d, psi, window = _realized(log, flow_id)
        js = range(window + 1)
        max_backlog = max(q[j] - d[j] for j in js)
        backlog_bound = max(q[j] - psi[j] for j in js)

        max_delay = 0
        delay_bound: int | None = 0
        for h in range(1, d[window] + 1):
            arrived = tau(q, h)
            max_delay = max(max_delay, tau(d, h) - arrived)
            due = tau(psi, h)
            if due is BEYOND_HORIZON or delay_bound is None:
                delay_bound = None
            else:
                delay_bound = max(delay_bound, due - arrived)
        out.append(FlowBounds(flow_id, max_backlog, max_delay, backlog_bound, delay_bound))
    return out
