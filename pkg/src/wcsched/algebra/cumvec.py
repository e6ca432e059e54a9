"""
Finite-horizon cumulative vectors.

A CumVec holds x_0..x_H with x_0 = 0 and nondecreasing integer entries.
The tail saturates: x_j = x_H for every j > H. The same type carries
arrivals, departures, queued arrivals, service curves and p-vectors.
"""
from bisect import bisect_left
from dataclasses import dataclass
from typing import Any, Final, Iterator, Sequence

import numpy as np

from wcsched.errors import InvalidArgumentError, InvalidHorizonError, InvariantError

# tau() result when the h-th task never shows up within the horizon
BEYOND_HORIZON: Final = None


@dataclass(frozen=True)
class CumVec:
    """
    Nondecreasing counting vector over slots 0..H.

    Entry j counts events in the first j slots, so entry 0 is always 0.
    Construction validates the invariants and reports the first offending
    position.
    """
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(int(x) for x in self.entries)
        object.__setattr__(self, "entries", entries)

        if len(entries) < 2:
            raise InvalidHorizonError("cumulative vector needs horizon >= 1")
        if entries[0] != 0:
            raise InvariantError("entry 0 must be 0", (0,))
        for j in range(1, len(entries)):
            if entries[j] < entries[j - 1]:
                raise InvariantError("entries must be nondecreasing", (j,))

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, horizon: int) -> "CumVec":
        _check_horizon(horizon)
        return cls((0,) * (horizon + 1))

    @classmethod
    def delta(cls, horizon: int) -> "CumVec":
        """The unit step [0, 1, 1, ..., 1]."""
        _check_horizon(horizon)
        return cls((0,) + (1,) * horizon)

    @classmethod
    def from_rate_burst(cls, rate: int, burst: int, horizon: int) -> "CumVec":
        """Token-bucket curve x_j = burst + rate * j for j >= 1."""
        _check_horizon(horizon)
        if rate < 0 or burst < 0:
            raise InvalidArgumentError("rate and burst must be nonnegative")
        return cls((0,) + tuple(burst + rate * j for j in range(1, horizon + 1)))

    @classmethod
    def from_segments(
        cls,
        segments: Sequence[Sequence[int]],
        horizon: int,
        offset: int = 0,
    ) -> "CumVec":
        """
        Expand a piecewise-linear shorthand.

        ``offset`` is added from slot 1 on; each ``[length, rate]`` segment
        then adds ``rate`` per slot for ``length`` slots. After the last
        segment the curve stays flat.
        """
        _check_horizon(horizon)
        if offset < 0:
            raise InvalidArgumentError("offset must be nonnegative")

        values = [0]
        level = offset
        for length, rate in segments:
            if length < 0 or rate < 0:
                raise InvalidArgumentError(f"invalid segment {[length, rate]}")
            for _ in range(length):
                if len(values) > horizon:
                    break
                level += rate
                values.append(level)
        while len(values) <= horizon:
            values.append(level)
        return cls(tuple(values[: horizon + 1]))

    @classmethod
    def from_json(cls, data: Any, horizon: int | None = None) -> "CumVec":
        """
        Load from a JSON array or a ``{"segments": ..., "offset": ...}`` object.

        A short array is extended to ``horizon`` by saturation.
        """
        if isinstance(data, dict):
            if horizon is None:
                raise InvalidArgumentError("segment shorthand needs a horizon")
            unknown = set(data) - {"segments", "offset"}
            if unknown:
                raise InvalidArgumentError(f"unknown curve fields: {sorted(unknown)}")
            return cls.from_segments(data.get("segments", []), horizon, data.get("offset", 0))

        if not isinstance(data, (list, tuple)):
            raise InvariantError("curve must be a JSON array of integers")
        for j, x in enumerate(data):
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvariantError("curve entries must be integers", (j,))
        vec = cls(tuple(data))
        if horizon is not None:
            if vec.horizon > horizon:
                raise InvariantError(
                    f"curve longer than horizon {horizon}", (horizon + 1,)
                )
            vec = vec.resized(horizon)
        return vec

    def to_json(self) -> list[int]:
        return list(self.entries)

    # -- access -------------------------------------------------------------

    @property
    def horizon(self) -> int:
        return len(self.entries) - 1

    @property
    def last(self) -> int:
        return self.entries[-1]

    def at(self, j: int) -> int:
        """Saturating access: 0 before slot 0, x_H past the horizon."""
        if j <= 0:
            return 0
        if j >= len(self.entries):
            return self.entries[-1]
        return self.entries[j]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, j: int) -> int:
        return self.entries[j]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.int64)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "CumVec":
        return cls(tuple(int(x) for x in values))

    def resized(self, horizon: int) -> "CumVec":
        """Truncate, or extend by saturation, to a new horizon."""
        _check_horizon(horizon)
        if horizon <= self.horizon:
            return CumVec(self.entries[: horizon + 1])
        return CumVec(self.entries + (self.last,) * (horizon - self.horizon))

    # -- pointwise algebra --------------------------------------------------

    def _same_horizon(self, other: "CumVec") -> None:
        if other.horizon != self.horizon:
            raise InvalidArgumentError(
                f"horizon mismatch: {self.horizon} vs {other.horizon}"
            )

    def __add__(self, other: "CumVec") -> "CumVec":
        self._same_horizon(other)
        return CumVec(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __rmul__(self, k: int) -> "CumVec":
        if k < 0:
            raise InvalidArgumentError("scale must be nonnegative")
        return CumVec(tuple(k * x for x in self.entries))

    __mul__ = __rmul__

    def minimum(self, other: "CumVec") -> "CumVec":
        self._same_horizon(other)
        return CumVec(tuple(min(a, b) for a, b in zip(self.entries, other.entries)))

    def maximum(self, other: "CumVec") -> "CumVec":
        self._same_horizon(other)
        return CumVec(tuple(max(a, b) for a, b in zip(self.entries, other.entries)))

    def cap(self, level: int) -> "CumVec":
        """min(x, level * delta)."""
        return CumVec(tuple(min(x, level) for x in self.entries))

    def leq(self, other: "CumVec") -> bool:
        """Pointwise x <= y."""
        self._same_horizon(other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    # -- slot operators -----------------------------------------------------

    def tau(self, h: int) -> int | None:
        return tau(self, h)

    def rshift(self, k: int) -> "CumVec":
        return rshift(self, k)

    def unshift_clip(self, d: int) -> "CumVec":
        return unshift_clip(self, d)


def _check_horizon(horizon: int) -> None:
    if horizon < 1:
        raise InvalidHorizonError(f"horizon must be >= 1, got {horizon}")


def make_delta(horizon: int) -> CumVec:
    """Unit step vector: delta_0 = 0, delta_j = 1 for j >= 1."""
    return CumVec.delta(horizon)


def tau(x: CumVec, h: int) -> int | None:
    """
    Slot in which the h-th counted event happens.

    tau_h(x) = max{ j | x_j < h }. Returns BEYOND_HORIZON when x_H < h,
    since the saturated tail never reaches h.
    """
    if h < 1:
        raise InvalidArgumentError(f"task index must be >= 1, got {h}")
    if x.last < h:
        return BEYOND_HORIZON
    return bisect_left(x.entries, h) - 1


def rshift(x: CumVec, k: int) -> CumVec:
    """R^k x: entry j becomes x_{j-k}, with zeros shifted in."""
    if k < 0:
        raise InvalidArgumentError("shift must be nonnegative")
    size = len(x.entries)
    if k >= size:
        return CumVec.zeros(x.horizon)
    return CumVec((0,) * k + x.entries[: size - k])


def unshift_clip(x: CumVec, d: int) -> CumVec:
    """
    R^{-1}(x - d*delta)^+.

    Entry j is max(x_{j+1} - d, 0); the last entry repeats its predecessor
    and entry 0 is pinned to 0.
    """
    if d < 0:
        raise InvalidArgumentError("service count must be nonnegative")
    values = [max(x.entries[j + 1] - d, 0) for j in range(x.horizon)]
    values.append(values[-1])
    values[0] = 0
    return CumVec(tuple(values))


def minplus_conv(x: CumVec, y: CumVec) -> CumVec:
    """(x (*) y)_j = min_{i <= j} (x_i + y_{j-i})."""
    if x.horizon != y.horizon:
        raise InvalidArgumentError(f"horizon mismatch: {x.horizon} vs {y.horizon}")
    xs = x.as_array()
    ys = y.as_array()
    return CumVec(tuple(int(np.min(xs[: j + 1] + ys[j::-1])) for j in range(len(xs))))
