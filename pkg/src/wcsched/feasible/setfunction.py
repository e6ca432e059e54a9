"""
Integer set functions over flows.

Subsets are bitmasks: flow k is bit k. Up to ``lazy_threshold`` flows the
whole table is materialized up front; above it values are computed on
demand and cached.
"""
from typing import Any, Callable, Iterable, Iterator, Sequence

from wcsched.errors import InvalidArgumentError

MAX_FLOWS = 16


def mask_of(flows: Iterable[int]) -> int:
    mask = 0
    for k in flows:
        mask |= 1 << k
    return mask


def members(mask: int) -> list[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


class SetFunction:
    """
    Integer-valued function on the subsets of n flows.

    Holds the baseline function, its mu-slices, their per-class samplings
    and similar tables.
    """

    def __init__(
        self,
        n: int,
        fn: Callable[[int], int] | None = None,
        values: Sequence[int] | None = None,
        lazy_threshold: int = 12,
    ):
        if n < 0 or n > MAX_FLOWS:
            raise InvalidArgumentError(f"set functions support 0..{MAX_FLOWS} flows, got {n}")
        if fn is None and values is None:
            raise InvalidArgumentError("need either fn or values")

        self.n = n
        self._fn = fn
        self._cache: dict[int, int] = {}

        if values is not None:
            if len(values) != 1 << n:
                raise InvalidArgumentError(f"expected {1 << n} values, got {len(values)}")
            self._cache = {mask: int(v) for mask, v in enumerate(values)}
        elif n <= lazy_threshold:
            self._cache = {mask: int(fn(mask)) for mask in range(1 << n)}  # type: ignore[misc]

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __call__(self, mask: int) -> int:
        if mask < 0 or mask > self.full:
            raise InvalidArgumentError(f"subset mask {mask} out of range for n={self.n}")
        if mask not in self._cache:
            self._cache[mask] = int(self._fn(mask))  # type: ignore[misc]
        return self._cache[mask]

    def of(self, flows: Iterable[int]) -> int:
        return self(mask_of(flows))

    def masks(self) -> Iterator[int]:
        return iter(range(1 << self.n))

    def table(self) -> list[int]:
        return [self(mask) for mask in self.masks()]

    def supermodular_violation(self) -> tuple[int, int] | None:
        """
        First pair (A, B) with f(A) + f(B) > f(A | B) + f(A & B), if any.

        Checks the local exchange form f(S+i) + f(S+j) <= f(S+i+j) + f(S),
        which is equivalent to the pairwise inequality.
        """
        for s in self.masks():
            outside = [k for k in range(self.n) if not s >> k & 1]
            for a, i in enumerate(outside):
                for j in outside[a + 1:]:
                    si, sj = s | 1 << i, s | 1 << j
                    if self(si) + self(sj) > self(si | sj) + self(s):
                        return si, sj
        return None

    def is_supermodular(self) -> bool:
        return self.supermodular_violation() is None

    def to_dict(self) -> list[dict[str, Any]]:
        return [{"flows": members(mask), "value": self(mask)} for mask in self.masks()]

    def __repr__(self) -> str:
        if self.n <= 4:
            return f"SetFunction(n={self.n}, values={self.table()})"
        return f"SetFunction(n={self.n})"
