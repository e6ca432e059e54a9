"""Tests for the slot engine, run logs and guarantee checks."""
import os
from pathlib import Path
import tempfile
import time

import numpy as np
import pytest

from wcsched.algebra.cumvec import CumVec, make_delta, rshift, tau
from wcsched.algebra.dualcurve import DualCurveService
from wcsched.config import Config
from wcsched.errors import (
    InfeasibleDesignError,
    InvalidArgumentError,
    NotSchedulableError,
    PolicyError,
)
from wcsched.oracle.tabulated import lattice
from wcsched.sched import BaseScheduler, PolicySpec, create_scheduler
from wcsched.sim import (
    FlowState,
    RunLog,
    Scenario,
    SchedulingEngine,
    SystemState,
    admit,
    bounds_report,
    conforms,
    design_service,
    envelope,
    load_scenario,
    random_dual_system,
    verify_guarantee,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "configs" / "scenarios"


def two_batches(policy: dict, capacity: int = 4, admissions: list | None = None) -> Scenario:
    """Two 200-task batches due by slots 98 and 99."""
    return Scenario.model_validate({
        "c": capacity,
        "horizon": 100,
        "slots": 100,
        "flows": [
            {"service": {"kind": "dual", "u": {"segments": [[98, 0], [1, 200]]}}, "b": 200},
            {"service": {"kind": "dual", "u": {"segments": [[99, 0], [1, 200]]}}, "b": 200},
        ],
        "policy": policy,
        "admissions": admissions or [],
    })


def random_scenario(rng: np.random.Generator, policy: str, n: int, capacity: int, horizon: int, slots: int) -> Scenario:
    services, backlogs = random_dual_system(rng, n, capacity, horizon)
    trace = rng.integers(0, 3, size=(slots, n)).tolist()
    return Scenario.model_validate({
        "c": capacity,
        "horizon": horizon,
        "flows": [{"service": s.to_json(), "b": b} for s, b in zip(services, backlogs)],
        "arrivals": {"trace": trace},
        "policy": {"policy": policy},
    })


class LazyScheduler(BaseScheduler):
    """Enforced policy that never serves anything."""

    name = "lazy"

    def select(self, system, beta):
        return (0,) * system.n


class TestTwoBatches:
    """Two batch flows sharing c = 4 for 100 slots."""

    def test_fair_trajectory(self):
        """Equal shares until flow 0's deadline forces a tilt."""
        log = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_fair.json")).run()

        schedules = [r.schedule for r in log]

        assert schedules == [[2, 2]] * 97 + [[3, 1]] * 2 + [[0, 4]]
        assert log.reports[96].backlogs == [6, 6]
        assert log.reports[-1].backlogs == [0, 0]
        assert log.violations() == []

    def test_fair_trajectory_runtime(self):
        """All 100 slots of the fair run finish within a second."""
        start = time.perf_counter()
        log = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_fair.json")).run()
        elapsed = time.perf_counter() - start

        assert len(log) == 100
        assert elapsed < 1.0

    def test_edf_trajectory(self):
        """EDF drains flow 0 first, then flow 1 just in time."""
        engine = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_edf.json"))

        log = engine.run()

        assert [r.schedule for r in log] == [[4, 0]] * 50 + [[0, 4]] * 50
        assert engine.state.flow(1).max_delay == 99

    def test_edf_bounds(self):
        """Realized worst delays against the bounds from psi(q)."""
        log = SchedulingEngine.from_scenario(two_batches({"policy": "edf"})).run()

        first, second = bounds_report(log)

        assert (first.max_delay, first.delay_bound) == (49, 98)
        assert (second.max_delay, second.delay_bound) == (99, 99)
        assert second.max_backlog == 200
        assert first.backlog_bound == 200

    def test_guarantees_hold(self):
        for policy in ("fair", "edf", "max_slack", "priority"):
            log = SchedulingEngine.from_scenario(two_batches({"policy": policy})).run()

            assert verify_guarantee(log, 0).passed
            assert verify_guarantee(log, 1).passed

    def test_static_split_breaks_flow_zero(self):
        """Equal fixed shares leave flow 0 two tasks short at slot 98."""
        engine = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_static.json"))

        log = engine.run()
        violations = log.violations()
        check = verify_guarantee(log, 0)

        assert len(violations) == 1
        slot, violation = violations[0]
        assert (slot, violation.flow_id, violation.d, violation.p) == (98, 0, 2, 4)
        assert violation.deficit == 2
        assert (check.passed, check.j, check.deficit) == (False, 99, 2)
        assert verify_guarantee(log, 1).passed

    def test_smaller_server_unschedulable(self):
        with pytest.raises(NotSchedulableError) as exc:
            SchedulingEngine.from_scenario(two_batches({"policy": "fair"}, capacity=3))

        assert exc.value.interval == (0, 100)

    def test_third_flow_rejected(self):
        """A one-task flow due by slot 99 does not fit next to the batches."""
        extra = {"slot": 0, "flow": {"service": {"kind": "dual", "u": {"segments": [[99, 0], [1, 1]]}}, "b": 1}}
        scenario = two_batches({"policy": "max_slack"}, admissions=[extra])

        log = SchedulingEngine.from_scenario(scenario).run(1)

        assert [r.model_dump() for r in log.reports[0].rejections] == [{"request": 0, "interval": (0, 100)}]
        assert log.reports[0].flow_ids == [0, 1]


class TestAdmission:
    """Tests for admission control on a live state."""

    def test_admit_and_reject(self):
        state = SystemState(capacity=4, horizon=100)

        first = admit(state, DualCurveService.deadline_batch(200, 98, 100), 200)
        second = admit(state, DualCurveService.deadline_batch(200, 99, 100), 200)
        third = admit(state, DualCurveService.deadline_batch(1, 99, 100), 1)

        assert first and second
        assert not third
        assert third.interval == (0, 100)
        assert state.flow_ids == [0, 1]

    def test_horizon_mismatch(self):
        state = SystemState(capacity=4, horizon=10)

        with pytest.raises(InvalidArgumentError):
            admit(state, DualCurveService.zero(5))

    def test_later_admission(self):
        """Flows admitted mid-run join at the requested slot."""
        log = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "token_bucket_mix.json")).run()

        joined = log.admissions()

        assert sorted(joined) == [0, 1, 2, 3]
        assert joined[3][0] == 20


class TestEngine:
    """Tests for per-slot engine behavior."""

    def test_enforced_policy_checked(self):
        """An enforced policy that starves an owed flow is stopped."""
        engine = SchedulingEngine(4, 4, LazyScheduler(PolicySpec()))
        admit(engine.state, DualCurveService(make_delta(4), CumVec.zeros(4)), 1)

        with pytest.raises(PolicyError):
            engine.step([0])

    def test_arrivals_length(self):
        engine = SchedulingEngine(4, 4, create_scheduler("max_slack"))
        admit(engine.state, DualCurveService.zero(4), 0)

        with pytest.raises(InvalidArgumentError):
            engine.step([1, 1])

    def test_forgiven_update(self):
        """After a violation the service moves on as if the owed tasks were served."""
        engine = SchedulingEngine.from_scenario(two_batches({"policy": "static_split"}))

        engine.run(99)
        flow = engine.state.flow(0)

        assert flow.b == 2
        assert flow.b_service == 0

    def test_fifo_delays(self):
        """Initial backlog is stamped with the join slot."""
        flow = FlowState(flow_id=0, service=DualCurveService.zero(3), b=2, joined_at=5)

        flow.enqueue(5, 1)
        flow.serve(5, 1)
        flow.serve(7, 2)

        assert flow.delays == [0, 2, 2]
        assert flow.b == 0

    def test_conservation_and_guarantees(self):
        """Departures plus backlog equal arrivals, and every guarantee holds."""
        rng = np.random.default_rng(2024)
        for policy in ("max_slack", "edf", "fair", "priority", "baseline_excess"):
            for _ in range(20):
                scenario = random_scenario(rng, policy, n=3, capacity=4, horizon=6, slots=50)

                log = SchedulingEngine.from_scenario(scenario).run()

                assert len(log) == 50
                assert log.violations() == []

                final = log.reports[-1].backlogs
                for k, flow in enumerate(scenario.flows):
                    arrivals, departures = log.flow_series(k)
                    assert sum(departures) + final[k] == flow.b + sum(arrivals)
                    assert verify_guarantee(log, k).passed
                for bounds in bounds_report(log):
                    assert bounds.max_backlog <= bounds.backlog_bound
                    if bounds.delay_bound is not None:
                        assert bounds.max_delay <= bounds.delay_bound

    def test_oracle_cross_check(self):
        """Polytope membership agrees with enumeration on every slot of tiny runs."""
        rng = np.random.default_rng(5)
        for policy in ("max_slack", "fair"):
            scenario = random_scenario(rng, policy, n=2, capacity=3, horizon=3, slots=6)

            log = SchedulingEngine.from_scenario(scenario, oracle=True).run()

            assert len(log) == 6


class TestRepresentations:
    """Dual-curve and spectral runs of the same scenario."""

    def test_identical_logs(self):
        scenario = load_scenario(SCENARIOS / "token_bucket_mix.json")

        dual = SchedulingEngine.from_scenario(scenario, representation="dual").run()
        spectral = SchedulingEngine.from_scenario(scenario, representation="spectral").run()

        assert dual == spectral

    def test_seed_determinism(self):
        scenario = load_scenario(SCENARIOS / "token_bucket_mix.json")

        first = SchedulingEngine.from_scenario(scenario, seed=3).run()
        second = SchedulingEngine.from_scenario(scenario, seed=3).run()

        assert first == second

    def test_config_policy_fallback(self):
        """Scenarios without a policy use the configured default."""
        scenario = Scenario.model_validate({
            "c": 2,
            "horizon": 4,
            "slots": 3,
            "flows": [{"service": {"kind": "dual", "u": [0, 1]}, "b": 3}],
        })
        config = Config()
        config.policy.policy = "idle"

        engine = SchedulingEngine.from_scenario(scenario, config)

        assert engine.scheduler.name == "idle"


class TestRunLog:
    """Tests for JSON Lines logs and plot data."""

    def test_jsonl_round_trip(self):
        log = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "token_bucket_mix.json")).run()

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.jsonl")
            log.write_jsonl(path)
            loaded = RunLog.read_jsonl(path)

        assert loaded == log
        assert all(verify_guarantee(loaded, k).passed for k in range(4))

    def test_plot_csv(self):
        log = SchedulingEngine.from_scenario(two_batches({"policy": "edf"})).run(2)

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "plot.csv")
            log.write_plot_csv(path)
            lines = Path(path).read_text().splitlines()

        assert lines[0] == "slot,backlog_0,backlog_1,service_0,service_1,headroom_0,headroom_1,headroom"
        assert lines[1] == "0,196,200,4,0,4,4,0"

    def test_unknown_flow(self):
        log = SchedulingEngine.from_scenario(two_batches({"policy": "edf"})).run(1)

        with pytest.raises(InvalidArgumentError):
            verify_guarantee(log, 7)


class TestDesign:
    """Tests for services designed from an arrival envelope."""

    def test_delay_design(self):
        svc = design_service("delay", 2, rate=1, burst=2, horizon=8, capacity=4)

        assert svc.u == rshift(envelope(1, 2, 8), 2)
        assert svc.v == svc.u

    def test_delay_bound_on_conforming_arrivals(self):
        """For conforming q, the designed service serves R^2 q."""
        svc = design_service("delay", 2, rate=1, burst=2, horizon=6, capacity=4)
        alpha = envelope(1, 2, 6)
        q = CumVec((0, 3, 3, 4, 5, 6, 7))

        assert conforms(q, alpha)
        assert rshift(q, 2).leq(svc.evaluate(q))

    def test_delay_design_without_burst_is_rate_latency(self):
        svc = design_service("delay", 3, rate=1, burst=0, horizon=8, capacity=4)

        assert svc == DualCurveService.rate_latency(1, 3, 8)

    def test_delay_bound_over_envelope(self):
        """Every conforming q sees each task served within 2 slots; rate-latency alone does not."""
        svc = design_service("delay", 2, rate=1, burst=1, horizon=4, capacity=4)
        bare = DualCurveService.rate_latency(1, 2, 4)
        alpha = envelope(1, 1, 4)
        bare_misses = False

        for q in lattice(0, 4, 5):
            if not conforms(q, alpha):
                continue
            psi = svc.evaluate(q)
            assert rshift(q, 2).leq(psi)
            for h in range(1, psi.last + 1):
                assert tau(psi, h) - tau(q, h) <= 2
            bare_misses = bare_misses or not rshift(q, 2).leq(bare.evaluate(q))

        assert bare_misses

    def test_backlog_design(self):
        svc = design_service("backlog", 3, rate=1, burst=3, horizon=6, capacity=4)

        assert svc.u.entries == (0, 1, 2, 3, 4, 5, 6)

    def test_infeasible(self):
        """Rate 5 cannot be promised on a server of 4."""
        with pytest.raises(InfeasibleDesignError):
            design_service("backlog", 0, rate=5, burst=0, horizon=8, capacity=4)

    def test_nonconforming(self):
        assert not conforms(CumVec((0, 4, 4)), envelope(1, 2, 2))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
