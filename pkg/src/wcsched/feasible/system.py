"""
Spectrum systems, the schedulability test and the baseline function.

A system is schedulable when, for every slot interval [i, j) of the
horizon, the flows' spectral values sum to at most (j - i) * c. The
baseline beta(G) is the least total service the flows in G must receive
in the current slot for the next slot to stay schedulable:

    beta(G) = max_{0 <= j < H} ( sum_{w in G} p^w_{j+1}
                                 + sum_{all w} hat-lambda^w_{1,j+1} - j*c )
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from wcsched.algebra.dualcurve import DualCurveService
from wcsched.algebra.service import WorstCaseService
from wcsched.errors import InvalidArgumentError, NotSchedulableError
from wcsched.feasible.setfunction import SetFunction, members


@dataclass(frozen=True, eq=False)
class SystemSpectra:
    """Per-flow spectra of a system at the start of one slot."""
    capacity: int
    horizon: int
    q: tuple[int, ...]
    spectra: tuple[np.ndarray, ...]  # lambda, conditioned on the backlog
    conditional: tuple[np.ndarray, ...]  # hat-lambda, conditioned on q_1
    p: tuple[np.ndarray, ...]
    kinds: tuple[str, ...] = ()

    @classmethod
    def build(
        cls,
        services: Sequence[WorstCaseService],
        backlogs: Sequence[int],
        q: Sequence[int],
        capacity: int,
        horizon: int | None = None,
    ) -> "SystemSpectra":
        if not len(services) == len(backlogs) == len(q):
            raise InvalidArgumentError("services, backlogs and q must have equal length")
        if capacity < 0:
            raise InvalidArgumentError("capacity must be nonnegative")
        horizons = {s.horizon for s in services}
        if horizon is not None:
            horizons.add(horizon)
        if len(horizons) != 1:
            raise InvalidArgumentError(f"flows disagree on horizon: {sorted(horizons)}")

        spectra, conditional, p = [], [], []
        for svc, b, q1 in zip(services, backlogs, q):
            if q1 < b:
                raise InvalidArgumentError(f"queued count {q1} below backlog {b}")
            hat = svc.conditional_spectrum(q1).entries
            spectra.append(svc.spectrum(b).entries)
            conditional.append(hat)
            p.append(np.minimum(hat[0], q1))
        return cls(
            capacity=capacity,
            horizon=horizons.pop(),
            q=tuple(int(x) for x in q),
            spectra=tuple(spectra),
            conditional=tuple(conditional),
            p=tuple(p),
            kinds=tuple(s.kind for s in services),
        )

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def q_total(self) -> int:
        return sum(self.q)

    def p_total(self) -> np.ndarray:
        if not self.p:
            return np.zeros(self.horizon + 1, dtype=np.int64)
        return np.sum(self.p, axis=0)

    def total_spectrum(self, mask: int | None = None) -> np.ndarray:
        flows = range(self.n) if mask is None else members(mask)
        total = np.zeros((self.horizon + 1, self.horizon + 1), dtype=np.int64)
        for k in flows:
            total = total + self.spectra[k]
        return total

    def headroom(self) -> int:
        """min_{1 <= j <= H} (j*c - sum of conditional lambda_0j)."""
        row = sum((hat[0] for hat in self.conditional), np.zeros(self.horizon + 1, dtype=np.int64))
        j = np.arange(self.horizon + 1)
        return int((j * self.capacity - row)[1:].min())

    def flow_headroom(self) -> list[int]:
        """Per flow, min_{1 <= j <= H} (j*c - its conditional lambda_0j)."""
        j = np.arange(self.horizon + 1)
        return [int((j * self.capacity - hat[0])[1:].min()) for hat in self.conditional]


@dataclass(frozen=True)
class SchedulabilityVerdict:
    schedulable: bool
    interval: tuple[int, int] | None
    min_slack: int

    def __bool__(self) -> bool:
        return self.schedulable


def schedulability_slack(spectra: Sequence[np.ndarray], capacity: int, horizon: int) -> np.ndarray:
    """(j - i) * c - sum lambda_ij for i < j; zero on and below the diagonal."""
    n = horizon + 1
    total = sum(spectra, np.zeros((n, n), dtype=np.int64))
    i, j = np.indices((n, n))
    return np.where(i < j, (j - i) * capacity - total, 0)


def check_spectra(spectra: Sequence[np.ndarray], capacity: int, horizon: int) -> SchedulabilityVerdict:
    slack = schedulability_slack(spectra, capacity, horizon)
    n = horizon + 1
    i, j = np.indices((n, n))
    upper = i < j
    min_slack = int(slack[upper].min())
    bad = np.argwhere(upper & (slack < 0))
    interval = (int(bad[0][0]), int(bad[0][1])) if len(bad) else None
    return SchedulabilityVerdict(interval is None, interval, min_slack)


def is_schedulable(system: SystemSpectra) -> SchedulabilityVerdict:
    """Sum over flows of lambda_ij <= (j - i) * c for all 0 <= i < j <= H."""
    return check_spectra(system.spectra, system.capacity, system.horizon)


def is_schedulable_dual(
    services: Sequence[DualCurveService],
    backlogs: Sequence[int],
    capacity: int,
) -> SchedulabilityVerdict:
    """
    O(nH) test for dual-curve systems.

    Row 0 needs sum u_j <= j*c. Lower rows are tightest at j = H, so
    each lag l in 1..H-1 needs sum min{(u_H - b)^+, v_l} <= l*c.
    """
    if not services:
        return SchedulabilityVerdict(True, None, capacity)
    h = services[0].horizon
    u_total = np.sum([s.u.as_array() for s in services], axis=0)
    lags = np.arange(h + 1)
    slack0 = lags * capacity - u_total
    rows = np.sum(
        [np.minimum(max(s.u.last - b, 0), s.v.as_array()) for s, b in zip(services, backlogs)],
        axis=0,
    )
    slack_rows = lags * capacity - rows

    interval = None
    bad0 = np.flatnonzero(slack0[1:] < 0)
    if len(bad0):
        interval = (0, int(bad0[0]) + 1)
    else:
        bad = np.flatnonzero(slack_rows[1:h] < 0)
        if len(bad):
            lag = int(bad[0]) + 1
            interval = (h - lag, h)
    min_slack = int(slack0[1:].min())
    if h > 1:
        min_slack = min(min_slack, int(slack_rows[1:h].min()))
    return SchedulabilityVerdict(interval is None, interval, min_slack)


def baseline(system: SystemSpectra, lazy_threshold: int = 12) -> SetFunction:
    """
    Baseline function beta over subsets of flows.

    Raises NotSchedulableError when the system is not schedulable.
    """
    verdict = is_schedulable(system)
    if not verdict:
        raise NotSchedulableError(verdict.interval)

    p_rows, common = _baseline_terms(system)

    def fn(mask: int) -> int:
        row = common.copy()
        for k in members(mask):
            row = row + p_rows[k]
        return int(row.max())

    return SetFunction(system.n, fn=fn, lazy_threshold=lazy_threshold)


def _baseline_terms(system: SystemSpectra) -> tuple[list[np.ndarray], np.ndarray]:
    h = system.horizon
    j = np.arange(h)
    common = -j * system.capacity
    for hat in system.conditional:
        common = common + hat[1, 1 : h + 1]
    p_rows = [p[1 : h + 1] for p in system.p]
    return p_rows, common.astype(np.int64)


def baseline_argmax(system: SystemSpectra, mask: int) -> int:
    """Slot offset j attaining beta(G); ties go to the smallest j."""
    p_rows, common = _baseline_terms(system)
    row = common.copy()
    for k in members(mask):
        row = row + p_rows[k]
    return int(np.argmax(row))


def feasible_mu_range(beta: SetFunction, q: Sequence[int], capacity: int) -> tuple[int, int]:
    """Totals mu with a feasible schedule: beta(Omega) <= mu <= min(c, sum q)."""
    return beta(beta.full), min(capacity, sum(q))
