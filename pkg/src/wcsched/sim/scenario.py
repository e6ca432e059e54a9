"""
Scenario files.

A scenario is a JSON document:

    {"c": 4, "horizon": 100,
     "flows": [{"service": {"kind": "dual", "u": [...], "v": [0, 0]}, "b": 200}],
     "arrivals": {"trace": [[a_0^1, a_0^2], ...]} | {"generator": {...}},
     "policy": {"policy": "fair"},
     "admissions": [{"slot": 10, "flow": {...}}]}

Curves are integer arrays (short arrays saturate) or the segment shorthand
{"segments": [[length, rate], ...], "offset": n}. Trace rows are indexed by
flow id: initial flows first, then admissions in request order.
"""
import json
import logging
from pathlib import Path
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from wcsched.algebra.cumvec import CumVec
from wcsched.algebra.dualcurve import DualCurveService
from wcsched.algebra.minplus import SpectralMatrix
from wcsched.algebra.service import WorstCaseService
from wcsched.config import Config
from wcsched.errors import InvalidArgumentError
from wcsched.feasible.system import is_schedulable_dual
from wcsched.sched.policies import PolicySpec
from wcsched.sim.design import design_service

logger = logging.getLogger(__name__)


class Segments(BaseModel):
    model_config = ConfigDict(extra="forbid")

    segments: list[tuple[int, int]] = Field(default_factory=list)
    offset: int = 0


Curve = Union[list[int], Segments]


def _curve(data: Curve, horizon: int) -> CumVec:
    if isinstance(data, Segments):
        return CumVec.from_json(data.model_dump(), horizon)
    return CumVec.from_json(data, horizon)


class DualServiceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["dual"] = "dual"
    u: Curve
    v: Curve = Field(default_factory=lambda: [0, 0])

    def build(self, horizon: int, capacity: int, b: int) -> WorstCaseService:
        return DualCurveService(_curve(self.u, horizon), _curve(self.v, horizon))


class SpectralServiceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["spectral"]
    s: list[list[int]]
    b: int = 0
    h: int | None = None

    def build(self, horizon: int, capacity: int, b: int) -> WorstCaseService:
        matrix = SpectralMatrix.from_json(self.model_dump(exclude_none=True))
        if matrix.horizon != horizon:
            raise InvalidArgumentError(f"matrix horizon {matrix.horizon} != scenario horizon {horizon}")
        if matrix.b != b:
            raise InvalidArgumentError(f"matrix conditioned on b={matrix.b}, flow has b={b}")
        return matrix


class DesignServiceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["design"]
    target: Literal["backlog", "delay"]
    bound: int = Field(ge=0)
    rate: int = Field(ge=0)
    burst: int = Field(ge=0)

    def build(self, horizon: int, capacity: int, b: int) -> WorstCaseService:
        return design_service(self.target, self.bound, self.rate, self.burst, horizon, capacity, b)


ServiceModel = Annotated[
    Union[DualServiceModel, SpectralServiceModel, DesignServiceModel],
    Field(discriminator="kind"),
]


class FlowModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    service: ServiceModel
    b: int = Field(default=0, ge=0)


class GeneratorModel(BaseModel):
    """
    Seeded arrival generator.

    bernoulli_batch: each flow receives ``batch`` tasks with ``probability``
    per slot. token_bucket: random arrivals that never exceed a
    (rate, burst) token bucket.
    """
    model_config = ConfigDict(extra="forbid")

    kind: Literal["bernoulli_batch", "token_bucket"] = "bernoulli_batch"
    slots: int = Field(ge=0)
    seed: int | None = None
    probability: float = Field(default=0.5, ge=0.0, le=1.0)
    batch: int = Field(default=1, ge=0)
    rate: int = Field(default=1, ge=0)
    burst: int = Field(default=0, ge=0)


class ArrivalsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trace: list[list[int]] | None = None
    generator: GeneratorModel | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "ArrivalsModel":
        if self.trace is not None and self.generator is not None:
            raise ValueError("give either a trace or a generator, not both")
        if self.trace is not None and any(a < 0 for row in self.trace for a in row):
            raise ValueError("arrivals must be nonnegative")
        return self


class AdmissionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    slot: int = Field(ge=0)
    flow: FlowModel


class Scenario(BaseModel):
    """A complete scheduling scenario."""
    model_config = ConfigDict(extra="forbid")

    c: int = Field(ge=0)
    horizon: int = Field(ge=1)
    flows: list[FlowModel] = Field(default_factory=list)
    arrivals: ArrivalsModel = Field(default_factory=ArrivalsModel)
    policy: PolicySpec = Field(default_factory=PolicySpec)
    admissions: list[AdmissionModel] = Field(default_factory=list)
    slots: int | None = Field(default=None, ge=0)

    @property
    def flow_count(self) -> int:
        return len(self.flows) + len(self.admissions)

    def run_length(self) -> int:
        """Explicit slots, else trace length, else generator slots, else H."""
        if self.slots is not None:
            return self.slots
        if self.arrivals.trace is not None:
            return len(self.arrivals.trace)
        if self.arrivals.generator is not None:
            return self.arrivals.generator.slots
        return self.horizon

    def build_services(self) -> list[tuple[WorstCaseService, int]]:
        """Initial (service, backlog) pairs."""
        return [(f.service.build(self.horizon, self.c, f.b), f.b) for f in self.flows]

    def arrival_matrix(self, seed: int | None = None) -> np.ndarray:
        """Arrivals per (slot, flow id) for the whole run."""
        slots, n = self.run_length(), self.flow_count
        out = np.zeros((slots, n), dtype=np.int64)
        if self.arrivals.trace is not None:
            for t, row in enumerate(self.arrivals.trace[:slots]):
                width = min(len(row), n)
                out[t, :width] = row[:width]
        elif self.arrivals.generator is not None:
            gen = self.arrivals.generator
            if seed is None:
                seed = gen.seed if gen.seed is not None else 0
            rng = np.random.default_rng(seed)
            out = generate_arrivals(gen, rng, slots, n)
        return out


def generate_arrivals(gen: GeneratorModel, rng: np.random.Generator, slots: int, flows: int) -> np.ndarray:
    """Draw a (slots, flows) arrival matrix."""
    if gen.kind == "bernoulli_batch":
        hits = rng.random((slots, flows)) < gen.probability
        return (hits * gen.batch).astype(np.int64)

    # token_bucket: a_t <= tokens + rate, tokens capped at burst
    out = np.zeros((slots, flows), dtype=np.int64)
    tokens = np.full(flows, gen.burst, dtype=np.int64)
    for t in range(slots):
        available = tokens + gen.rate
        out[t] = rng.integers(0, available + 1)
        tokens = np.minimum(gen.burst, available - out[t])
    return out


def load_scenario(path: str | Path, config: Config | None = None) -> Scenario:
    """Read and validate a scenario file."""
    with open(path) as f:
        data = json.load(f)
    scenario = Scenario.model_validate(data)
    if config is not None:
        config.check_horizon(scenario.horizon)
    return scenario


def load_service(data: dict[str, Any], horizon: int, capacity: int = 0, b: int = 0) -> WorstCaseService:
    """Service from its JSON form (dual, spectral or design)."""
    flow = FlowModel.model_validate({"service": data, "b": b})
    return flow.service.build(horizon, capacity, b)


def random_dual_system(
    rng: np.random.Generator,
    n: int,
    capacity: int,
    horizon: int,
    max_increment: int = 3,
    max_backlog: int = 2,
) -> tuple[list[DualCurveService], list[int]]:
    """
    Random schedulable dual-curve system.

    Draws u and v as cumulative sums of random increments and halves them
    until the system passes the schedulability test. Test scaffolding only.
    """
    def curve() -> np.ndarray:
        steps = rng.integers(0, max_increment + 1, size=horizon)
        return np.concatenate(([0], np.cumsum(steps)))

    us = [curve() for _ in range(n)]
    vs = [curve() for _ in range(n)]
    backlogs = [int(x) for x in rng.integers(0, max_backlog + 1, size=n)]
    while True:
        services = [
            DualCurveService(CumVec.from_array(u), CumVec.from_array(v)) for u, v in zip(us, vs)
        ]
        if is_schedulable_dual(services, backlogs, capacity):
            return services, backlogs
        us = [u // 2 for u in us]
        vs = [v // 2 for v in vs]

