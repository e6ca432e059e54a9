from wcsched.sim.design import conforms, design_service, envelope
from wcsched.sim.engine import AdmissionResult, SchedulingEngine, admit, step, working_form
from wcsched.sim.reports import AdmissionRecord, Rejection, RunLog, SlotReport, Violation
from wcsched.sim.scenario import Scenario, load_scenario, load_service, random_dual_system
from wcsched.sim.state import FlowState, SystemState
from wcsched.sim.verification import FlowBounds, GuaranteeCheck, bounds_report, verify_guarantee

__all__ = [
    "AdmissionRecord",
    "AdmissionResult",
    "FlowBounds",
    "FlowState",
    "GuaranteeCheck",
    "Rejection",
    "RunLog",
    "Scenario",
    "SchedulingEngine",
    "SlotReport",
    "SystemState",
    "Violation",
    "admit",
    "bounds_report",
    "conforms",
    "design_service",
    "envelope",
    "load_scenario",
    "load_service",
    "random_dual_system",
    "step",
    "verify_guarantee",
    "working_form",
]
