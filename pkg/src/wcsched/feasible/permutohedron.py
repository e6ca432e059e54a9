"""
Feasible schedules as polytope points.

For a schedulable system the feasible schedules are the valid d (d <= q,
sum(d) <= c) with d(G) >= beta(G) for every subset G. Fixing the total
sum(d) = mu gives the permutohedron of the supermodular function

    beta_mu(G) = max{ beta(G), mu - q(complement of G) }.

Its vertices come from greedy orders and its centroid is the Shapley
value of beta_mu.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
import logging
from typing import Sequence

from wcsched.errors import InfeasibleTotalError, InvalidArgumentError
from wcsched.feasible.setfunction import SetFunction, mask_of, members

logger = logging.getLogger(__name__)


def _subset_sums(values: Sequence[int]) -> list[int]:
    """Sum of values over every subset mask."""
    sums = [0] * (1 << len(values))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + values[low.bit_length() - 1]
    return sums


def beta_mu(
    beta: SetFunction,
    mu: int,
    q: Sequence[int],
    capacity: int | None = None,
) -> SetFunction:
    """mu-slice of the baseline: max{beta(G), mu - q(complement of G)}."""
    if len(q) != beta.n:
        raise InvalidArgumentError("one queued count per flow required")
    upper = sum(q) if capacity is None else min(capacity, sum(q))
    lower = beta(beta.full)
    if mu < lower or mu > upper:
        raise InfeasibleTotalError(f"mu={mu} outside feasible range [{lower}, {upper}]")

    q_sums = _subset_sums(q)
    full = beta.full
    q_total = q_sums[full]

    def fn(mask: int) -> int:
        return max(beta(mask), mu - (q_total - q_sums[mask]))

    return SetFunction(beta.n, fn=fn)


def _check_order(order: Sequence[int], n: int) -> None:
    if sorted(order) != list(range(n)):
        raise InvalidArgumentError(f"{list(order)} is not a permutation of 0..{n - 1}")


def vertex(beta: SetFunction, order: Sequence[int]) -> tuple[int, ...]:
    """
    Greedy vertex for an ordering of the flows.

    Flow order[k] receives beta(first k+1 flows) - beta(first k flows), so
    flows early in the order get only their baseline share and the last
    flow absorbs the rest.
    """
    _check_order(order, beta.n)
    d = [0] * beta.n
    prefix = 0
    for k in order:
        grown = prefix | 1 << k
        d[k] = beta(grown) - beta(prefix)
        prefix = grown
    return tuple(d)


def priority_order(priority: Sequence[int]) -> list[int]:
    """Greedy order that serves ``priority[0]`` first."""
    return list(reversed(priority))


def shapley_value(beta: SetFunction) -> tuple[Fraction, ...]:
    """Average of all n! greedy vertices via marginal contributions."""
    n = beta.n
    if n == 0:
        return ()
    weights = [Fraction(factorial(s) * factorial(n - s - 1), factorial(n)) for s in range(n)]
    phi = []
    for k in range(n):
        by_size = [0] * n
        bit = 1 << k
        for mask in beta.masks():
            if mask & bit:
                continue
            by_size[bin(mask).count("1")] += beta(mask | bit) - beta(mask)
        phi.append(sum((w * total for w, total in zip(weights, by_size)), Fraction(0)))
    return tuple(phi)


def first_violation(
    beta: SetFunction,
    q: Sequence[int],
    capacity: int,
    d: Sequence[int],
    mu: int | None = None,
) -> str | None:
    """Reason d is not a feasible schedule, or None when it is."""
    if len(d) != beta.n or len(q) != beta.n:
        return "schedule length does not match flow count"
    for k, (dk, qk) in enumerate(zip(d, q)):
        if dk < 0:
            return f"flow {k} has negative service"
        if dk > qk:
            return f"flow {k} served {dk} of {qk} queued"
    total = sum(d)
    if total > capacity:
        return f"total {total} exceeds capacity {capacity}"

    bound = beta
    if mu is not None:
        if total != mu:
            return f"total {total} differs from mu={mu}"
        try:
            bound = beta_mu(beta, mu, q, capacity)
        except InfeasibleTotalError as e:
            return str(e)

    sums = _subset_sums(d)
    for mask in beta.masks():
        if sums[mask] < bound(mask):
            return f"flows {members(mask)} get {sums[mask]} < baseline {bound(mask)}"
    return None


def contains(
    beta: SetFunction,
    q: Sequence[int],
    capacity: int,
    d: Sequence[int],
    mu: int | None = None,
) -> bool:
    """
    Membership in the feasible polytope.

    True iff d <= q, sum(d) <= c and d(G) >= beta(G) for every G. With mu
    given, also sum(d) == mu and the bounds come from beta_mu.
    """
    return first_violation(beta, q, capacity, d, mu) is None


def round_to_polytope(
    point: Sequence[Fraction],
    beta: SetFunction,
    q: Sequence[int],
    capacity: int,
    max_moves: int | None = None,
) -> tuple[int, ...]:
    """
    Integral point of P(beta) near a rational point of it.

    Largest-remainder rounding to the total beta(Omega), then unit moves
    from a surplus flow outside a violated subset to a flow inside it.
    Falls back to a greedy vertex if the moves do not settle.
    """
    n = beta.n
    mu = beta(beta.full)
    floors = [int(x // 1) for x in point]
    remainder = mu - sum(floors)
    by_fraction = sorted(range(n), key=lambda k: (-(point[k] - floors[k]), k))
    d = list(floors)
    for k in by_fraction[: max(remainder, 0)]:
        d[k] += 1

    moves = max_moves if max_moves is not None else 4 * n * max(mu, 1)
    for _ in range(moves):
        sums = _subset_sums(d)
        worst, deficit = None, 0
        for mask in beta.masks():
            gap = beta(mask) - sums[mask]
            if gap > deficit:
                worst, deficit = mask, gap
        if worst is None and all(dk <= qk for dk, qk in zip(d, q)):
            return tuple(d)
        if worst is None:
            # causality only: push the excess of an overfull flow elsewhere
            worst = mask_of(k for k in range(n) if d[k] < q[k])
        inside = [k for k in members(worst) if d[k] < q[k]]
        outside = [k for k in range(n) if not worst >> k & 1 and d[k] > 0]
        if not inside or not outside:
            break
        donor = max(outside, key=lambda k: (d[k] - beta(1 << k), -k))
        receiver = max(inside, key=lambda k: (q[k] - d[k], -k))
        d[donor] -= 1
        d[receiver] += 1

    logger.warning("rounding repair did not settle; using the identity-order vertex")
    return vertex(beta, list(range(n)))


@dataclass(frozen=True)
class CentroidPoint:
    """Exact vertex centroid and its feasible integral rounding."""
    exact: tuple[Fraction, ...]
    rounded: tuple[int, ...]


def shapley_centroid(beta: SetFunction, q: Sequence[int], capacity: int) -> CentroidPoint:
    """Vertex centroid of P(beta), exact and rounded to a feasible integral schedule."""
    exact = shapley_value(beta)
    return CentroidPoint(exact, round_to_polytope(exact, beta, q, capacity))


def validate_partition(partition: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    flat = sorted(k for cls in partition for k in cls)
    if flat != list(range(n)) or any(len(cls) == 0 for cls in partition):
        raise InvalidArgumentError(f"{[list(c) for c in partition]} does not partition 0..{n - 1}")
    return [list(cls) for cls in partition]


def per_class_beta(beta: SetFunction, partition: Sequence[Sequence[int]]) -> SetFunction:
    """beta^P(S) = beta(union of the classes in S), over class bitmasks."""
    classes = validate_partition(partition, beta.n)
    class_masks = [mask_of(cls) for cls in classes]

    def fn(cmask: int) -> int:
        union = 0
        for c in members(cmask):
            union |= class_masks[c]
        return beta(union)

    return SetFunction(len(classes), fn=fn)


def class_sums(d: Sequence[int], partition: Sequence[Sequence[int]]) -> tuple[int, ...]:
    return tuple(sum(d[k] for k in cls) for cls in partition)
