"""
Brute-force reference implementations over tiny enumerated instances.

A TabulatedService stores psi(q) for every queued-arrival vector q on a
finite lattice: q_0 = 0 and b <= q_1 <= ... <= q_H <= cap. Spectra,
conditional spectra, updates and feasible sets are then computed by
exhaustive enumeration, independently of the closed forms in
wcsched.algebra and wcsched.feasible.

Keep the lattice small: its size is C(cap - b + H, H).
"""
import itertools
import logging
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from wcsched.algebra.cumvec import CumVec
from wcsched.algebra.minplus import SpectralMatrix
from wcsched.algebra.service import WorstCaseService
from wcsched.config import OracleConfig
from wcsched.errors import (
    CausalityViolationError,
    GuaranteeViolationError,
    InvalidArgumentError,
    InvariantError,
    OracleTooLargeError,
)

logger = logging.getLogger(__name__)

ServiceFn = Callable[[CumVec], CumVec]


def lattice(b: int, horizon: int, cap: int, first: int | None = None) -> Iterator[CumVec]:
    """All q with q_0 = 0, b <= q_1 <= ... <= q_H <= cap (q_1 = first if given)."""
    if first is None:
        for tail in itertools.combinations_with_replacement(range(b, cap + 1), horizon):
            yield CumVec((0,) + tail)
        return
    for tail in itertools.combinations_with_replacement(range(first, cap + 1), horizon - 1):
        yield CumVec((0, first) + tail)


class TabulatedService(WorstCaseService):
    """General worst-case service given as an explicit table q -> psi(q)."""

    kind = "tabulated"

    def __init__(self, b: int, horizon: int, cap: int, table: dict[tuple[int, ...], CumVec]):
        self.b = b
        self._horizon = horizon
        self.cap = cap
        self.table = table
        for key, psi in table.items():
            if key[1] < b:
                raise InvariantError(f"tabulated q has q_1 < b={b}", (1,))
            for j, (x, y) in enumerate(zip(psi.entries, key)):
                if x > y:
                    raise InvariantError(f"psi(q) exceeds q for q={list(key)}", (j,))

    @classmethod
    def tabulate(
        cls,
        fn: ServiceFn,
        b: int,
        horizon: int,
        cap: int,
        first: int | None = None,
    ) -> "TabulatedService":
        """Evaluate fn over the lattice (or only its q_1 = first slice)."""
        if cap < b:
            raise InvalidArgumentError(f"cap {cap} below backlog {b}")
        table = {q.entries: fn(q) for q in lattice(b, horizon, cap, first)}
        return cls(b, horizon, cap, table)

    @classmethod
    def of(cls, svc: WorstCaseService, b: int, q1: int | None = None) -> "TabulatedService":
        """Tabulate another representation with a cap large enough for its extremal bursts."""
        peak = int(svc.spectrum(b).entries.max())
        cap = peak + max(b, q1 or 0) + 1
        return cls.tabulate(svc.evaluate, b, svc.horizon, cap)

    @property
    def horizon(self) -> int:
        return self._horizon

    def _arrays(self, first: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        keys = [k for k in self.table if first is None or k[1] == first]
        if not keys:
            return (
                np.zeros((0, self._horizon + 1), dtype=np.int64),
                np.zeros((0, self._horizon + 1), dtype=np.int64),
            )
        qs = np.array(keys, dtype=np.int64)
        psis = np.array([self.table[k].entries for k in keys], dtype=np.int64)
        return qs, psis

    def evaluate(self, q: CumVec) -> CumVec:
        try:
            return self.table[q.entries]
        except KeyError:
            raise InvalidArgumentError(f"q={q.to_json()} is not on the tabulated lattice")

    def spectrum(self, b: int) -> SpectralMatrix:
        if b != self.b:
            raise InvalidArgumentError(f"table is conditioned on b={self.b}, not {b}")
        return brute_spectrum(self)

    def conditional_spectrum(self, q1: int) -> SpectralMatrix:
        return brute_conditional_spectrum(self, q1)

    def update(self, q1: int, d: int) -> "TabulatedService":
        return brute_update(self, q1, d)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "tabulated",
            "b": self.b,
            "h": self._horizon,
            "cap": self.cap,
            "table": [{"q": list(k), "psi": v.to_json()} for k, v in sorted(self.table.items())],
        }

    def __len__(self) -> int:
        return len(self.table)


def _max_gap(qs: np.ndarray, psis: np.ndarray) -> np.ndarray:
    """max over rows of (psi_j - q_i)^+, as an (H+1) x (H+1) array."""
    n = qs.shape[1]
    if len(qs) == 0:
        return np.zeros((n, n), dtype=np.int64)
    gaps = psis[:, None, :] - qs[:, :, None]
    return np.maximum(gaps.max(axis=0), 0)


def brute_spectrum(svc: TabulatedService) -> SpectralMatrix:
    """lambda_ij = max over tabulated q of (psi_j(q) - q_i)^+."""
    qs, psis = svc._arrays()
    return SpectralMatrix(_max_gap(qs, psis), b=svc.b)


def brute_conditional_spectrum(svc: TabulatedService, q1: int) -> SpectralMatrix:
    """Same maximum restricted to the q_1 = q1 slice."""
    if q1 < svc.b or q1 > svc.cap:
        raise InvalidArgumentError(f"q1={q1} outside [{svc.b}, {svc.cap}]")
    qs, psis = svc._arrays(first=q1)
    if len(qs) == 0:
        raise InvalidArgumentError(f"table has no entries with q_1={q1}")
    return SpectralMatrix(_max_gap(qs, psis), b=q1)


def brute_update(svc: TabulatedService, q1: int, d: int) -> TabulatedService:
    """
    Tabulate the next-slot service after serving d of q1 tasks.

    Each next-slot vector q' maps back to q with q_1 = q1 and
    q_{j+1} = q'_j + d; psi'(q')_j = (psi_{j+1}(q) - d)^+. Entry H repeats
    entry H-1, so q'_H ranges freely up to the reduced cap.
    """
    p = int(brute_conditional_spectrum(svc, q1).entries[0, 1])
    if d > q1:
        raise CausalityViolationError(d, q1)
    if d < p:
        raise GuaranteeViolationError(d, p)

    h = svc.horizon
    b_next = q1 - d
    cap_next = svc.cap - d
    table: dict[tuple[int, ...], CumVec] = {}
    for key, psi in svc.table.items():
        if key[1] != q1:
            continue
        head = tuple(x - d for x in key[2:])  # q'_1 .. q'_{H-1}
        served = [max(psi.entries[j + 1] - d, 0) for j in range(1, h)]
        values = (0,) + tuple(served)
        values = values + (values[-1],)
        start = head[-1] if head else b_next
        for last in range(start, cap_next + 1):
            table[(0,) + head + (last,)] = CumVec(values)
    return TabulatedService(b_next, h, cap_next, table)


def check_scale(flows: int, capacity: int, horizon: int, limits: OracleConfig | None = None) -> None:
    limits = limits or OracleConfig()
    if flows > limits.max_flows or capacity > limits.max_capacity or horizon > limits.max_horizon:
        raise OracleTooLargeError(
            f"oracle limited to n<={limits.max_flows}, c<={limits.max_capacity}, "
            f"H<={limits.max_horizon}; got n={flows}, c={capacity}, H={horizon}"
        )


def _fits(total: np.ndarray, capacity: int) -> bool:
    """total_ij <= (j - i) * c for all 0 <= i < j <= H."""
    n = total.shape[0]
    i, j = np.indices((n, n))
    return bool(np.all(np.where(i < j, total <= (j - i) * capacity, True)))


def brute_is_schedulable(services: Sequence[TabulatedService], capacity: int) -> bool:
    """Sum of brute spectra within (j - i) * c on every interval."""
    if not services:
        return True
    return _fits(sum(brute_spectrum(s).entries for s in services), capacity)


def brute_next_spectra(svc: TabulatedService, q1: int) -> dict[int, np.ndarray]:
    """
    Next-slot spectrum for every admissible d, keyed by d.

    Each entry tabulates the served service with brute_update and takes
    its spectrum by enumeration. Values of d below the guaranteed minimum
    have no entry.
    """
    spectra: dict[int, np.ndarray] = {}
    for d in range(q1 + 1):
        try:
            nxt = brute_update(svc, q1, d)
        except GuaranteeViolationError:
            continue
        spectra[d] = brute_spectrum(nxt).entries
    return spectra


def brute_feasible_set(
    services: Sequence[TabulatedService],
    q: Sequence[int],
    capacity: int,
    limits: OracleConfig | None = None,
) -> frozenset[tuple[int, ...]]:
    """
    All integer schedules that keep the system schedulable.

    Enumerates every valid d (d <= q, sum(d) <= c), drops those below a
    flow's guaranteed minimum, and keeps d when the summed spectra of the
    brute-updated tables fit (j - i) * c on every interval 0 <= i < j <= H.
    """
    if len(services) != len(q):
        raise InvalidArgumentError("one queued count per service required")
    horizon = services[0].horizon if services else 1
    check_scale(len(services), capacity, horizon, limits)

    if not brute_is_schedulable(services, capacity):
        return frozenset()

    options = [brute_next_spectra(s, q1) for s, q1 in zip(services, q)]

    feasible = set()
    for d in itertools.product(*(sorted(o) for o in options)):
        if sum(d) > capacity:
            continue
        total = sum((o[dw] for o, dw in zip(options, d)), np.zeros((horizon + 1,) * 2, dtype=np.int64))
        if _fits(total, capacity):
            feasible.add(tuple(d))
    logger.debug(f"brute feasible set size={len(feasible)} q={list(q)} c={capacity}")
    return frozenset(feasible)


def tandem(inner: WorstCaseService, outer: WorstCaseService, b_outer: int) -> ServiceFn:
    """psi2(psi1(q - b_outer*delta) + b_outer*delta), evaluated directly."""
    def fn(q: CumVec) -> CumVec:
        shift = b_outer * CumVec.delta(q.horizon)
        first_hop_input = CumVec((0,) + tuple(x - b_outer for x in q.entries[1:]))
        return outer.evaluate(inner.evaluate(first_hop_input) + shift)
    return fn
