"""Mutable run state: flows and the shared server."""
from collections import deque
from dataclasses import dataclass, field

from wcsched.algebra.service import WorstCaseService


@dataclass
class FlowState:
    """
    One flow's service, backlog and task bookkeeping.

    ``b`` is the real backlog. ``b_service`` is the backlog the service is
    conditioned on; the two differ only after a guarantee violation, when
    the service is advanced as if the owed tasks had been served.
    """
    flow_id: int
    service: WorstCaseService
    b: int = 0
    joined_at: int = 0
    initial_service: WorstCaseService | None = None
    b_initial: int = 0
    b_service: int = 0
    queue: deque[int] = field(default_factory=deque)  # arrival slot of each queued task
    arrivals: list[int] = field(default_factory=list)
    departures: list[int] = field(default_factory=list)
    delays: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.initial_service is None:
            self.initial_service = self.service
        self.b_initial = self.b
        self.b_service = self.b
        if not self.queue:
            self.queue.extend([self.joined_at] * self.b)

    def enqueue(self, slot: int, count: int) -> None:
        self.queue.extend([slot] * count)
        self.arrivals.append(count)

    def serve(self, slot: int, count: int) -> None:
        """Pop ``count`` FIFO tasks and record their delays."""
        for _ in range(count):
            self.delays.append(slot - self.queue.popleft())
        self.departures.append(count)
        self.b = len(self.queue)

    @property
    def max_delay(self) -> int:
        return max(self.delays, default=0)


@dataclass
class SystemState:
    """Flows sharing one server of ``capacity`` tasks per slot."""
    capacity: int
    horizon: int
    flows: list[FlowState] = field(default_factory=list)
    t: int = 0
    next_id: int = 0

    @property
    def flow_ids(self) -> list[int]:
        return [f.flow_id for f in self.flows]

    @property
    def backlogs(self) -> list[int]:
        return [f.b for f in self.flows]

    def flow(self, flow_id: int) -> FlowState:
        for f in self.flows:
            if f.flow_id == flow_id:
                return f
        raise KeyError(flow_id)
