"""Tests for structured log records."""
import json
import logging
from pathlib import Path

import pytest

from wcsched.logging_config import LOGGER_NAME, json_formatter, slot_logger
from wcsched.sim import SchedulingEngine, load_scenario, verify_guarantee

SCENARIOS = Path(__file__).resolve().parent.parent / "configs" / "scenarios"


class TestRecordFormat:
    """Tests for the JSON record layout."""

    def test_slot_and_flow_fields(self):
        record = logging.makeLogRecord({
            "msg": "served 2 of 4 owed",
            "levelname": "WARNING",
            "module": "engine",
            "slot": 98,
            "flow_id": 0,
        })

        line = json.loads(json_formatter().format(record))

        assert (line["slot"], line["flow_id"]) == (98, 0)
        assert line["message"] == "served 2 of 4 owed"

    def test_missing_context_is_null(self):
        record = logging.makeLogRecord({"msg": "run finished", "levelname": "INFO", "module": "engine"})

        line = json.loads(json_formatter().format(record))

        assert line["slot"] is None
        assert line["flow_id"] is None

    def test_adapter_without_flow(self):
        adapter = slot_logger(logging.getLogger(LOGGER_NAME), 7)

        assert adapter.extra == {"slot": 7}


class TestEngineRecords:
    """Tests for the context the engine attaches."""

    def test_violation_names_slot_and_flow(self, caplog):
        engine = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_static.json"))

        with caplog.at_level(logging.WARNING, logger=LOGGER_NAME):
            engine.run()

        owed = [r for r in caplog.records if r.getMessage() == "served 2 of 4 owed"]
        assert [(r.slot, r.flow_id) for r in owed] == [(98, 0)]

    def test_admission_names_flow(self, caplog):
        with caplog.at_level(logging.INFO, logger=LOGGER_NAME):
            SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_fair.json")).run(1)

        admitted = [r for r in caplog.records if r.getMessage().startswith("admitted")]
        assert [(r.slot, r.flow_id) for r in admitted] == [(0, 0), (0, 1)]

    def test_guarantee_check_names_flow(self, caplog):
        log = SchedulingEngine.from_scenario(load_scenario(SCENARIOS / "two_batches_static.json")).run()

        with caplog.at_level(logging.WARNING, logger=LOGGER_NAME):
            verify_guarantee(log, 0)

        broken = [r for r in caplog.records if r.getMessage().startswith("guarantee broken")]
        assert [r.flow_id for r in broken] == [0]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
