"""
Run log records.

A run log is a list of SlotReport records, one per slot, written as JSON
Lines. Admission records carry each flow's initial service and backlog, so
every metric can be recomputed from the log alone.
"""
import csv
from pathlib import Path
from typing import Any, Iterator

from pydantic import BaseModel, ConfigDict, Field


class AdmissionRecord(BaseModel):
    """A flow that joined at the start of a slot."""
    model_config = ConfigDict(extra="forbid")

    flow_id: int
    b: int
    service: dict[str, Any]


class Rejection(BaseModel):
    """An admission request that would have broken schedulability."""
    model_config = ConfigDict(extra="forbid")

    request: int  # index into the scenario's admission list
    interval: tuple[int, int] | None


class Violation(BaseModel):
    """A flow served fewer tasks than it was owed."""
    model_config = ConfigDict(extra="forbid")

    flow_id: int
    d: int
    p: int

    @property
    def deficit(self) -> int:
        return self.p - self.d


class SlotReport(BaseModel):
    """Everything that happened in one slot."""
    model_config = ConfigDict(extra="forbid")

    slot: int
    flow_ids: list[int] = Field(default_factory=list)
    arrivals: list[int] = Field(default_factory=list)
    schedule: list[int] = Field(default_factory=list)
    mu: int = 0
    backlogs: list[int] = Field(default_factory=list)
    guaranteed: list[int] = Field(default_factory=list)
    headroom: int | None = None
    flow_headroom: list[int] = Field(default_factory=list)
    schedulable: bool = True
    violations: list[Violation] = Field(default_factory=list)
    admissions: list[AdmissionRecord] = Field(default_factory=list)
    rejections: list[Rejection] = Field(default_factory=list)


class RunLog:
    """Append-only sequence of slot reports."""

    def __init__(self, reports: list[SlotReport] | None = None):
        self.reports: list[SlotReport] = list(reports or [])

    def append(self, report: SlotReport) -> None:
        self.reports.append(report)

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self) -> Iterator[SlotReport]:
        return iter(self.reports)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunLog):
            return NotImplemented
        return self.to_jsonl() == other.to_jsonl()

    # -- per-flow views -----------------------------------------------------

    def admissions(self) -> dict[int, tuple[int, AdmissionRecord]]:
        """flow_id -> (slot joined, admission record)."""
        out = {}
        for report in self.reports:
            for record in report.admissions:
                out[record.flow_id] = (report.slot, record)
        return out

    def flow_series(self, flow_id: int) -> tuple[list[int], list[int]]:
        """Per-slot arrivals and departures of one flow, from the slot it joined."""
        arrivals, departures = [], []
        for report in self.reports:
            if flow_id in report.flow_ids:
                k = report.flow_ids.index(flow_id)
                arrivals.append(report.arrivals[k])
                departures.append(report.schedule[k])
        return arrivals, departures

    def violations(self) -> list[tuple[int, Violation]]:
        return [(r.slot, v) for r in self.reports for v in r.violations]

    # -- serialization --------------------------------------------------------

    def to_jsonl(self) -> str:
        return "".join(r.model_dump_json() + "\n" for r in self.reports)

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w") as f:
            f.write(self.to_jsonl())

    @classmethod
    def read_jsonl(cls, path: str | Path) -> "RunLog":
        with open(path) as f:
            return cls([SlotReport.model_validate_json(line) for line in f if line.strip()])

    def write_plot_csv(self, path: str | Path) -> None:
        """Columns: slot, per-flow backlog, service and lambda-hat headroom, then the system headroom."""
        flow_ids = sorted({k for r in self.reports for k in r.flow_ids})
        header = ["slot"]
        header += [f"backlog_{k}" for k in flow_ids]
        header += [f"service_{k}" for k in flow_ids]
        header += [f"headroom_{k}" for k in flow_ids]
        header.append("headroom")

        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for r in self.reports:
                room = r.flow_headroom or [""] * len(r.flow_ids)
                by_flow = dict(zip(r.flow_ids, zip(r.backlogs, r.schedule, room)))
                row: list[Any] = [r.slot]
                row += [by_flow[k][0] if k in by_flow else "" for k in flow_ids]
                row += [by_flow[k][1] if k in by_flow else "" for k in flow_ids]
                row += [by_flow[k][2] if k in by_flow else "" for k in flow_ids]
                row.append("" if r.headroom is None else r.headroom)
                writer.writerow(row)
