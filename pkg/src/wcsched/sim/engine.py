"""
Slot-timed scheduling engine.

Each slot: arrivals join the queues (q = a + b), the scheduler picks d,
the engine checks d against the feasible polytope, advances every flow's
service with its own update rule and pops d tasks per flow in FIFO order.
Admissions happen at slot boundaries and are accepted only if the system
stays schedulable.
"""
from dataclasses import dataclass
import logging
from typing import Literal, Sequence

import numpy as np

from wcsched.algebra.service import WorstCaseService
from wcsched.config import Config, OracleConfig
from wcsched.errors import (
    InvalidArgumentError,
    NotSchedulableError,
    OracleTooLargeError,
    PolicyError,
)
from wcsched.feasible.permutohedron import contains, first_violation
from wcsched.feasible.setfunction import SetFunction
from wcsched.feasible.system import SystemSpectra, baseline, check_spectra, is_schedulable
from wcsched.logging_config import log_latency, slot_logger
from wcsched.oracle.tabulated import TabulatedService, brute_feasible_set, check_scale
from wcsched.sched.policies import BaseScheduler, PolicySpec, Schedule, create_scheduler
from wcsched.sim.reports import AdmissionRecord, Rejection, RunLog, SlotReport, Violation
from wcsched.sim.scenario import Scenario
from wcsched.sim.state import FlowState, SystemState

logger = logging.getLogger(__name__)

Representation = Literal["dual", "spectral"]


@dataclass(frozen=True)
class AdmissionResult:
    accepted: bool
    flow_id: int | None = None
    interval: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.accepted


def working_form(service: WorstCaseService, b: int, representation: Representation) -> WorstCaseService:
    """The representation a flow is advanced in during a run."""
    if representation == "spectral":
        return service.spectrum(b)
    return service


def admit(
    state: SystemState,
    service: WorstCaseService,
    b: int = 0,
    flow_id: int | None = None,
    representation: Representation = "dual",
) -> AdmissionResult:
    """Add a flow if the system stays schedulable; the state is untouched on rejection."""
    if service.horizon != state.horizon:
        raise InvalidArgumentError(f"service horizon {service.horizon} != system horizon {state.horizon}")
    if b < 0:
        raise InvalidArgumentError("backlog must be nonnegative")

    spectra = [f.service.spectrum(f.b_service).entries for f in state.flows]
    spectra.append(service.spectrum(b).entries)
    verdict = check_spectra(spectra, state.capacity, state.horizon)
    if not verdict:
        slot_logger(logger, state.t).warning(f"admission rejected: interval {verdict.interval}")
        return AdmissionResult(False, None, verdict.interval)

    flow_id = state.next_id if flow_id is None else flow_id
    state.flows.append(
        FlowState(
            flow_id=flow_id,
            service=working_form(service, b, representation),
            b=b,
            joined_at=state.t,
            initial_service=service,
        )
    )
    state.next_id = max(state.next_id, flow_id + 1)
    slot_logger(logger, state.t, flow_id).info(f"admitted with b={b}")
    return AdmissionResult(True, flow_id)


def oracle_agrees(
    state: SystemState,
    q: Sequence[int],
    beta: SetFunction,
    d: Sequence[int],
    limits: OracleConfig | None = None,
) -> bool:
    """Compare polytope membership of d with the brute-force feasible set."""
    tables = [
        TabulatedService.of(f.service, f.b_service, q1) for f, q1 in zip(state.flows, q)
    ]
    feasible = brute_feasible_set(tables, q, state.capacity, limits)
    return (tuple(d) in feasible) == contains(beta, q, state.capacity, d)


def step(
    state: SystemState,
    arrivals: Sequence[int],
    scheduler: BaseScheduler,
    config: Config | None = None,
    oracle: OracleConfig | None = None,
) -> SlotReport:
    """Advance one slot; returns its report."""
    config = config or Config()
    slot = state.t
    flows = state.flows
    if len(arrivals) != len(flows):
        raise InvalidArgumentError(f"expected arrivals for {len(flows)} flows, got {len(arrivals)}")

    q = [f.b + int(a) for f, a in zip(flows, arrivals)]
    system = SystemSpectra.build(
        [f.service for f in flows],
        [f.b_service for f in flows],
        q,
        state.capacity,
        state.horizon,
    )

    beta = None
    verdict = is_schedulable(system)
    if verdict:
        if scheduler.needs_baseline or config.simulation.assert_every_slot:
            beta = baseline(system, config.algebra.lazy_beta_threshold)
    elif scheduler.enforced:
        raise NotSchedulableError(verdict.interval)
    else:
        slot_logger(logger, slot).warning(f"system not schedulable over {verdict.interval}")

    d = scheduler.select(system, beta)
    Schedule(d, slot).check(q, state.capacity)

    if scheduler.enforced and beta is not None and config.simulation.assert_every_slot:
        reason = first_violation(beta, q, state.capacity, d)
        if reason is not None:
            raise PolicyError(f"slot {slot}: {scheduler.name} chose {list(d)}: {reason}")
    if oracle is not None and beta is not None:
        if not oracle_agrees(state, q, beta, d, oracle):
            raise PolicyError(f"slot {slot}: polytope membership of {list(d)} disagrees with the oracle")

    guaranteed = [int(p[1]) for p in system.p]
    violations = []
    for f, a, qk, dk, pk in zip(flows, arrivals, q, d, guaranteed):
        if dk < pk:
            violations.append(Violation(flow_id=f.flow_id, d=dk, p=pk))
            slot_logger(logger, slot, f.flow_id).warning(f"served {dk} of {pk} owed")
        served_as = max(dk, pk)
        f.service = f.service.update(qk, served_as)
        f.b_service = qk - served_as
        f.enqueue(slot, int(a))
        f.serve(slot, dk)

    state.t += 1
    scheduler.observe(d, state.backlogs)
    slot_logger(logger, slot).debug(f"q={q} d={list(d)}")

    return SlotReport(
        slot=slot,
        flow_ids=state.flow_ids,
        arrivals=[int(a) for a in arrivals],
        schedule=list(d),
        mu=sum(d),
        backlogs=state.backlogs,
        guaranteed=guaranteed,
        headroom=system.headroom() if flows else None,
        flow_headroom=system.flow_headroom(),
        schedulable=bool(verdict),
        violations=violations,
    )


class SchedulingEngine:
    """
    Runs one scenario slot by slot.

    Example:
        engine = SchedulingEngine.from_scenario(scenario)
        log = engine.run()
    """

    def __init__(
        self,
        capacity: int,
        horizon: int,
        scheduler: BaseScheduler,
        config: Config | None = None,
        representation: Representation = "dual",
        oracle: bool = False,
    ):
        self.config = config or Config()
        self.config.check_horizon(horizon)
        self.state = SystemState(capacity=capacity, horizon=horizon)
        self.scheduler = scheduler
        self.representation = representation
        self.oracle: OracleConfig | None = self.config.oracle if oracle else None
        self.log = RunLog()
        self._pending: list[tuple[int, int, WorstCaseService, int]] = []
        self._arrivals = np.zeros((0, 0), dtype=np.int64)
        self._initial_count = 0

    @classmethod
    def from_scenario(
        cls,
        scenario: Scenario,
        config: Config | None = None,
        representation: Representation = "dual",
        seed: int | None = None,
        oracle: bool = False,
    ) -> "SchedulingEngine":
        """Engine with the scenario's flows, admissions and arrivals loaded."""
        config = config or Config()
        spec = scenario.policy
        if "policy" not in scenario.model_fields_set:
            spec = PolicySpec(policy=config.policy.policy, mu=config.policy.mu_rule)  # type: ignore[arg-type]
        generator = scenario.arrivals.generator
        if seed is None and generator is not None and generator.seed is None:
            seed = config.simulation.seed

        engine = cls(
            scenario.c,
            scenario.horizon,
            create_scheduler(spec),
            config,
            representation,
            oracle,
        )
        initial = scenario.build_services()
        verdict = check_spectra(
            [svc.spectrum(b).entries for svc, b in initial], scenario.c, scenario.horizon
        )
        if not verdict:
            raise NotSchedulableError(verdict.interval)

        n = len(initial)
        engine._initial_count = n
        for flow_id, (svc, b) in enumerate(initial):
            engine._pending.append((0, flow_id, svc, b))
        for r, request in enumerate(scenario.admissions):
            svc = request.flow.service.build(scenario.horizon, scenario.c, request.flow.b)
            engine._pending.append((request.slot, n + r, svc, request.flow.b))
        engine._arrivals = scenario.arrival_matrix(seed)
        return engine

    def _admit_due(self) -> tuple[list[AdmissionRecord], list[Rejection]]:
        admitted, rejected = [], []
        due = [p for p in self._pending if p[0] == self.state.t]
        self._pending = [p for p in self._pending if p[0] != self.state.t]
        for _, flow_id, svc, b in due:
            result = admit(self.state, svc, b, flow_id, self.representation)
            if result:
                admitted.append(AdmissionRecord(flow_id=flow_id, b=b, service=svc.to_json()))
            else:
                rejected.append(Rejection(request=flow_id - self._initial_count, interval=result.interval))
        return admitted, rejected

    def step(self, arrivals: Sequence[int]) -> SlotReport:
        report = step(self.state, arrivals, self.scheduler, self.config, self.oracle)
        self.log.append(report)
        return report

    def _arrivals_now(self) -> list[int]:
        t = self.state.t
        row = self._arrivals[t] if t < len(self._arrivals) else []
        return [int(row[f.flow_id]) if f.flow_id < len(row) else 0 for f in self.state.flows]

    def probe(self) -> SystemSpectra:
        """Spectra of the current slot after its admissions and arrivals, without serving it."""
        self._admit_due()
        flows = self.state.flows
        q = [f.b + a for f, a in zip(flows, self._arrivals_now())]
        return SystemSpectra.build(
            [f.service for f in flows],
            [f.b_service for f in flows],
            q,
            self.state.capacity,
            self.state.horizon,
        )

    @log_latency("simulation run")
    def run(self, slots: int | None = None) -> RunLog:
        """Run the remaining slots of the loaded arrivals (or ``slots`` more slots)."""
        slots = len(self._arrivals) - self.state.t if slots is None else slots

        if self.oracle is not None:
            try:
                check_scale(
                    len(self.state.flows) + len(self._pending),
                    self.state.capacity,
                    self.state.horizon,
                    self.oracle,
                )
            except OracleTooLargeError as e:
                logger.info(f"oracle cross-check skipped: {e}")
                self.oracle = None

        for _ in range(max(slots, 0)):
            admitted, rejected = self._admit_due()
            report = self.step(self._arrivals_now())
            report.admissions = admitted
            report.rejections = rejected

        violations = self.log.violations()
        logger.info(
            f"run finished slots={len(self.log)} flows={len(self.state.flows)} violations={len(violations)}"
        )
        return self.log
