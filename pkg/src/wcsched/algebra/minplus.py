"""
Min-plus services identified by matrices.

A cumulative matrix M defines psi_j(q) = min_{i <= j} (q_i + m_ij). Its
normalized form, the spectral matrix S, has the same service and its
entries are exactly the spectral values of that service. Both forms update
in place of the service after each slot.

Matrices are dense (H+1) x (H+1) int64 arrays, upper triangular.
"""
from typing import Any

import numpy as np

from wcsched.algebra.cumvec import CumVec
from wcsched.algebra.service import WorstCaseService
from wcsched.errors import (
    CausalityViolationError,
    GuaranteeViolationError,
    InvalidArgumentError,
    InvariantError,
)

_BIG = np.iinfo(np.int64).max // 4


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(x) for x in hits[0])


def _as_square(entries: Any) -> np.ndarray:
    arr = np.array(entries, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
        raise InvariantError(f"matrix must be square with side >= 2, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def extend_column(m: np.ndarray) -> np.ndarray:
    """
    Append column H+1 under the finite-horizon convention.

    Rows 0 and 1 repeat their column H; rows i >= 2 continue the diagonal,
    taking the column-H value of row i-1 but never less than their own.
    """
    n = m.shape[0]
    ext = np.zeros((n, n + 1), dtype=np.int64)
    ext[:, :n] = m
    ext[0, n] = m[0, n - 1]
    ext[1, n] = m[1, n - 1]
    ext[2:, n] = np.maximum(m[1 : n - 1, n - 1], m[2:, n - 1])
    return ext


def _check_service(p: int, q1: int, d: int) -> None:
    if d < 0 or q1 < 0:
        raise InvalidArgumentError("queued and served counts must be nonnegative")
    if d > q1:
        raise CausalityViolationError(d, q1)
    if d < p:
        raise GuaranteeViolationError(d, p)


class CumulativeMatrix:
    """Matrix M with m_ij = 0 for i >= j and rows nondecreasing in j."""

    def __init__(self, entries: Any):
        self.entries = _as_square(entries)
        self._validate()

    def _validate(self) -> None:
        e = self.entries
        pos = _first(e < 0)
        if pos is not None:
            raise InvariantError("entries must be nonnegative", pos)
        pos = _first(np.tril(e) != 0)
        if pos is not None:
            raise InvariantError("m_ij must be 0 for i >= j", pos)
        pos = _first(np.diff(e, axis=1) < 0)
        if pos is not None:
            raise InvariantError("rows must be nondecreasing", (pos[0], pos[1] + 1))

    @property
    def horizon(self) -> int:
        return self.entries.shape[0] - 1

    def evaluate(self, q: CumVec) -> CumVec:
        return eval_minplus(self, q)

    def update(self, q1: int, d: int) -> "CumulativeMatrix":
        return update_cumulative(self, q1, d)

    def normalize(self, b: int) -> "SpectralMatrix":
        return normalize_to_spectral(self, b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CumulativeMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"CumulativeMatrix(h={self.horizon}, m={self.entries.tolist()})"


class SpectralMatrix(WorstCaseService):
    """
    Spectral matrix S conditioned on backlog b.

    Invariants, for all i, j:
    - s_ij = 0 if i >= j
    - s_ij <= s_{i,j+1}
    - s_ij >= s_{i+1,j}
    - s_ij <= (s_0j - b)^+ for i > 0

    Also used to hold the spectrum of any service and its conditional
    spectrum (with b set to the observed q_1).
    """

    kind = "spectral"

    def __init__(self, entries: Any, b: int = 0):
        if b < 0:
            raise InvalidArgumentError("backlog must be nonnegative")
        self.entries = _as_square(entries)
        self.b = int(b)
        self._validate()

    def _validate(self) -> None:
        e = self.entries
        pos = _first(np.tril(e) != 0)
        if pos is not None:
            raise InvariantError("s_ij must be 0 for i >= j", pos)
        pos = _first(np.diff(e, axis=1) < 0)
        if pos is not None:
            raise InvariantError("s_ij must not exceed s_i,j+1", (pos[0], pos[1] + 1))
        pos = _first(e[:-1] < e[1:])
        if pos is not None:
            raise InvariantError("s_ij must be at least s_i+1,j", (pos[0] + 1, pos[1]))
        ceiling = np.maximum(e[0] - self.b, 0)
        pos = _first(e[1:] > ceiling[None, :])
        if pos is not None:
            raise InvariantError("s_ij must not exceed (s_0j - b)^+", (pos[0] + 1, pos[1]))

    @property
    def horizon(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def row0(self) -> np.ndarray:
        return self.entries[0]

    def evaluate(self, q: CumVec) -> CumVec:
        return eval_minplus(self, q)

    def spectrum(self, b: int) -> "SpectralMatrix":
        if b != self.b:
            raise InvalidArgumentError(f"matrix is conditioned on b={self.b}, not {b}")
        return self

    def conditional_spectrum(self, q1: int) -> "SpectralMatrix":
        return conditional_spectrum(self, q1)

    def update(self, q1: int, d: int) -> "SpectralMatrix":
        return update_spectral(self, q1, d)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "spectral", "b": self.b, "h": self.horizon, "s": self.entries.tolist()}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "SpectralMatrix":
        matrix = cls(data["s"], b=data.get("b", 0))
        if "h" in data and data["h"] != matrix.horizon:
            raise InvariantError(f"declared horizon {data['h']} does not match matrix side")
        return matrix

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpectralMatrix):
            return NotImplemented
        return self.b == other.b and np.array_equal(self.entries, other.entries)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SpectralMatrix(b={self.b}, s={self.entries.tolist()})"


def eval_minplus(m: CumulativeMatrix | SpectralMatrix, q: CumVec) -> CumVec:
    """psi_j(q) = min_{i <= j} (q_i + m_ij)."""
    if q.horizon != m.horizon:
        raise InvalidArgumentError(f"horizon mismatch: {q.horizon} vs {m.horizon}")
    qs = q.as_array()
    candidates = qs[:, None] + m.entries
    candidates = np.where(np.triu(np.ones_like(candidates, dtype=bool)), candidates, _BIG)
    return CumVec.from_array(candidates.min(axis=0))


def normalize_to_spectral(m: CumulativeMatrix, b: int) -> SpectralMatrix:
    """
    Spectral matrix with the same service as M for backlog b.

    s_0j = m_0j and s_ij = min{(m_0j - b)^+, min_{1<=k<=i} m_kj} for i > 0.
    """
    e = m.entries
    s = np.zeros_like(e)
    s[0] = e[0]
    s[1:] = np.minimum(np.maximum(e[0] - b, 0)[None, :], np.minimum.accumulate(e[1:], axis=0))
    return SpectralMatrix(s, b=b)


def conditional_spectrum(s: SpectralMatrix, q1: int) -> SpectralMatrix:
    """
    Spectrum after observing q_1 = q1.

    Row 0 becomes min{s_0j, q1 + s_1j}; rows i > 0 become min{(s_0j - q1)^+, s_ij}.
    The result is a spectral matrix conditioned on q1.
    """
    if q1 < s.b:
        raise InvalidArgumentError(f"q1={q1} is below the backlog b={s.b}")
    e = s.entries
    hat = np.zeros_like(e)
    hat[0] = np.minimum(e[0], q1 + e[1])
    hat[1:] = np.minimum(np.maximum(e[0] - q1, 0)[None, :], e[1:])
    return SpectralMatrix(hat, b=q1)


def update_spectral(s: SpectralMatrix, q1: int, d: int) -> SpectralMatrix:
    """
    Spectral matrix of the next slot after serving d of q1 tasks.

    s'_0j = (min{s_0,j+1, q1 + s_1,j+1} - d)^+ and
    s'_ij = min{(s_0,j+1 - q1)^+, s_i+1,j+1} for i > 0; the new backlog is q1 - d.
    """
    if q1 < s.b:
        raise InvalidArgumentError(f"q1={q1} is below the backlog b={s.b}")
    _check_service(min(int(s.entries[0, 1]), q1), q1, d)

    ext = extend_column(s.entries)
    h = s.horizon
    new = np.zeros_like(s.entries)
    new[0] = np.maximum(np.minimum(ext[0, 1:], q1 + ext[1, 1:]) - d, 0)
    new[1:h] = np.minimum(np.maximum(ext[0, 1:] - q1, 0)[None, :], ext[2 : h + 1, 1:])
    return SpectralMatrix(np.triu(new, k=1), b=q1 - d)


def update_cumulative(m: CumulativeMatrix, q1: int, d: int) -> CumulativeMatrix:
    """
    Cumulative matrix of the next slot after serving d of q1 tasks.

    m'_0j = (min{m_0,j+1, q1 + m_1,j+1} - d)^+ and m'_ij = m_i+1,j+1 for i > 0.
    """
    _check_service(min(int(m.entries[0, 1]), q1), q1, d)

    ext = extend_column(m.entries)
    h = m.horizon
    new = np.zeros_like(m.entries)
    new[0] = np.maximum(np.minimum(ext[0, 1:], q1 + ext[1, 1:]) - d, 0)
    new[1:h] = ext[2 : h + 1, 1:]
    return CumulativeMatrix(np.triu(new, k=1))
