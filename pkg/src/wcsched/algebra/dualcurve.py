"""
Dual-curve services.

A dual-curve service (u, v) guarantees

    psi_j(q) = min{ u_j, min_{1 <= i <= j} (q_i + v_{j-i}) }

with a dynamic curve u that is rewritten every slot and a static curve v
that never changes. It is the min-plus service of the cumulative matrix
with row 0 = u and m_ij = v_{j-i} below it, so every slot costs O(H)
instead of the O(H^2) of a spectral matrix.
"""
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from wcsched.algebra.cumvec import BEYOND_HORIZON, CumVec, minplus_conv, rshift, tau, unshift_clip
from wcsched.algebra.minplus import CumulativeMatrix, SpectralMatrix
from wcsched.algebra.service import WorstCaseService
from wcsched.errors import (
    CausalityViolationError,
    GuaranteeViolationError,
    InvalidArgumentError,
    InvariantError,
)


def _band(v: CumVec) -> np.ndarray:
    """Matrix with entry (i, j) = v_{j-i} above the diagonal, 0 elsewhere."""
    n = len(v)
    i, j = np.indices((n, n))
    lag = j - i
    return np.where(lag > 0, v.as_array()[np.clip(lag, 0, n - 1)], 0).astype(np.int64)


@dataclass(frozen=True)
class TaskDeadlineList:
    """Deadline slot offset of every queued task, in FIFO order."""
    offsets: tuple[int | None, ...]

    def __post_init__(self) -> None:
        finite_seen_after_beyond = False
        last = -1
        for h, offset in enumerate(self.offsets, start=1):
            if offset is BEYOND_HORIZON:
                finite_seen_after_beyond = True
                continue
            if finite_seen_after_beyond or offset < last:
                raise InvariantError("deadlines must be nondecreasing", (h,))
            last = offset

    def __len__(self) -> int:
        return len(self.offsets)

    def __iter__(self) -> Iterator[int | None]:
        return iter(self.offsets)

    def __getitem__(self, h: int) -> int | None:
        return self.offsets[h]


@dataclass(frozen=True)
class DualCurveService(WorstCaseService):
    """Worst-case service identified by a dynamic curve u and a static curve v."""
    u: CumVec
    v: CumVec

    kind = "dual"

    def __post_init__(self) -> None:
        if self.u.horizon != self.v.horizon:
            raise InvalidArgumentError(
                f"u and v horizons differ: {self.u.horizon} vs {self.v.horizon}"
            )

    # -- templates ----------------------------------------------------------

    @classmethod
    def zero(cls, horizon: int) -> "DualCurveService":
        return cls(CumVec.zeros(horizon), CumVec.zeros(horizon))

    @classmethod
    def deadline_batch(cls, count: int, deadline: int, horizon: int) -> "DualCurveService":
        """All ``count`` tasks served no later than slot offset ``deadline``."""
        u = count * rshift(CumVec.delta(horizon), deadline)
        return cls(u, CumVec.zeros(horizon))

    @classmethod
    def rate_latency(cls, rate: int, latency: int, horizon: int) -> "DualCurveService":
        """Service curve rate * (j - latency)^+ on both coordinates."""
        curve = CumVec.from_segments([[latency, 0], [horizon, rate]], horizon)
        return cls(curve, curve)

    @classmethod
    def token_bucket(cls, rate: int, burst: int, horizon: int) -> "DualCurveService":
        curve = CumVec.from_rate_burst(rate, burst, horizon)
        return cls(curve, curve)

    @classmethod
    def from_json(cls, data: dict[str, Any], horizon: int | None = None) -> "DualCurveService":
        unknown = set(data) - {"kind", "u", "v"}
        if unknown:
            raise InvalidArgumentError(f"unknown dual-curve fields: {sorted(unknown)}")
        u = CumVec.from_json(data["u"], horizon)
        v = CumVec.from_json(data.get("v", [0, 0]), horizon or u.horizon)
        return cls(u, v)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "dual", "u": self.u.to_json(), "v": self.v.to_json()}

    # -- WorstCaseService ---------------------------------------------------

    @property
    def horizon(self) -> int:
        return self.u.horizon

    def evaluate(self, q: CumVec) -> CumVec:
        return eval_dual(self, q)

    def spectrum(self, b: int) -> SpectralMatrix:
        return spectrum_dual(self, b)

    def conditional_spectrum(self, q1: int) -> SpectralMatrix:
        hat = np.zeros((len(self.u), len(self.u)), dtype=np.int64)
        hat[0] = u_hat(self, q1).as_array()
        tail = np.maximum(self.u.as_array() - q1, 0)
        hat[1:] = np.minimum(tail[None, :], _band(self.v)[1:])
        return SpectralMatrix(hat, b=q1)

    def update(self, q1: int, d: int) -> "DualCurveService":
        return update_dual(self, q1, d)

    def p_vector(self, q1: int) -> CumVec:
        return p_vector(self, q1)

    def cumulative_matrix(self) -> CumulativeMatrix:
        m = _band(self.v)
        m[0] = self.u.as_array()
        return CumulativeMatrix(m)


def eval_dual(svc: DualCurveService, q: CumVec) -> CumVec:
    """psi_j = min{u_j, min_{1<=i<=j} (q_i + v_{j-i})}."""
    if q.horizon != svc.horizon:
        raise InvalidArgumentError(f"horizon mismatch: {q.horizon} vs {svc.horizon}")
    qs = q.as_array()
    n = len(qs)
    i, j = np.indices((n, n))
    candidates = np.where((i >= 1) & (i <= j), qs[:, None] + _band(svc.v), np.iinfo(np.int64).max)
    right = candidates.min(axis=0)
    right[0] = 0
    return CumVec.from_array(np.minimum(svc.u.as_array(), right))


def u_hat(svc: DualCurveService, q1: int) -> CumVec:
    """u-hat_j = min{u_j, q1 + v_{j-1}}, u-hat_0 = 0."""
    u = svc.u.as_array()
    v = svc.v.as_array()
    hat = np.minimum(u[1:], q1 + v[:-1])
    return CumVec.from_array(np.concatenate(([0], hat)))


def p_vector(svc: DualCurveService, q1: int) -> CumVec:
    """p_j = min{u_j, q1}."""
    return svc.u.cap(q1)


def update_dual(svc: DualCurveService, q1: int, d: int) -> DualCurveService:
    """u' = R^{-1}(u-hat - d*delta)^+; v unchanged."""
    if d < 0 or q1 < 0:
        raise InvalidArgumentError("queued and served counts must be nonnegative")
    if d > q1:
        raise CausalityViolationError(d, q1)
    p = min(svc.u[1], q1)
    if d < p:
        raise GuaranteeViolationError(d, p)
    return DualCurveService(unshift_clip(u_hat(svc, q1), d), svc.v)


def spectrum_dual(svc: DualCurveService, b: int) -> SpectralMatrix:
    """Row 0 = u; rows i > 0: min{(u_j - b)^+, v_{j-i}}."""
    s = _band(svc.v)
    s[0] = svc.u.as_array()
    s[1:] = np.minimum(np.maximum(svc.u.as_array() - b, 0)[None, :], s[1:])
    return SpectralMatrix(s, b=b)


def deadlines(svc: DualCurveService, q1: int) -> TaskDeadlineList:
    """Deadline offset tau_h(p) of each of the q1 queued tasks."""
    p = p_vector(svc, q1)
    return TaskDeadlineList(tuple(tau(p, h) for h in range(1, q1 + 1)))


def compose(
    inner: DualCurveService,
    outer: DualCurveService,
    b_outer: int,
) -> DualCurveService:
    """
    Tandem of two dual-curve services, inner hop first.

    u_j = min{u2_j, min_{1<=i<=j} (u1_i + b_outer + v2_{j-i})} and v = v1 (*) v2.
    """
    if inner.horizon != outer.horizon:
        raise InvalidArgumentError(
            f"horizon mismatch: {inner.horizon} vs {outer.horizon}"
        )
    u1 = inner.u.as_array()
    u2 = outer.u.as_array()
    n = len(u1)
    i, j = np.indices((n, n))
    through = np.where(
        (i >= 1) & (i <= j), u1[:, None] + b_outer + _band(outer.v), np.iinfo(np.int64).max
    )
    right = through.min(axis=0)
    right[0] = 0
    u = CumVec.from_array(np.minimum(u2, right))
    return DualCurveService(u, minplus_conv(inner.v, outer.v))


def compose_chain(services: list[DualCurveService], backlogs: list[int]) -> tuple[DualCurveService, int]:
    """Fold compose() over hops in order; returns the service and total backlog."""
    if not services:
        raise InvalidArgumentError("need at least one hop")
    result = services[0]
    total = backlogs[0]
    for svc, b in zip(services[1:], backlogs[1:]):
        result = compose(result, svc, b)
        total += b
    return result, total
