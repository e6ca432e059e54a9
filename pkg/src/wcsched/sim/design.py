"""
Services designed from a bound over an arrival envelope.

Given a token-bucket envelope alpha_j = burst + rate * j, arrivals q
conform when q_j - q_i <= alpha_{j-i} for all i < j (i = 0 bounds the
initial backlog too). For conforming q:

- backlog bound B: u = v = (alpha - B)^+ gives psi(q) >= (q - B)^+
- delay bound D: u = v = R^D alpha gives psi(q) >= R^D q

With burst 0, R^D alpha is the rate-latency curve rate * (j - D)^+ with
latency D. A burst lifts every entry past slot D by the burst; a bare
rate-latency curve would then miss the bound on a conforming burst.

No finite capacity can promise either for every q, so designs are only
valid over the envelope.
"""
import logging
from typing import Literal

from wcsched.algebra.cumvec import CumVec, rshift
from wcsched.algebra.dualcurve import DualCurveService
from wcsched.errors import InfeasibleDesignError, InvalidArgumentError
from wcsched.feasible.system import is_schedulable_dual

logger = logging.getLogger(__name__)

DesignTarget = Literal["backlog", "delay"]


def envelope(rate: int, burst: int, horizon: int) -> CumVec:
    return CumVec.from_rate_burst(rate, burst, horizon)


def conforms(q: CumVec, alpha: CumVec) -> bool:
    """q_j - q_i <= alpha_{j-i} for all 0 <= i < j <= H."""
    h = q.horizon
    return all(q[j] - q[i] <= alpha[j - i] for i in range(h) for j in range(i + 1, h + 1))


def design_service(
    target: DesignTarget,
    bound: int,
    rate: int,
    burst: int,
    horizon: int,
    capacity: int,
    b: int = 0,
) -> DualCurveService:
    """
    Dual-curve service enforcing a backlog or delay bound on the envelope.

    Raises InfeasibleDesignError when the service alone is not schedulable
    at the given capacity.
    """
    if bound < 0:
        raise InvalidArgumentError("bound must be nonnegative")
    alpha = envelope(rate, burst, horizon)

    if target == "backlog":
        curve = CumVec(tuple(max(x - bound, 0) for x in alpha))
    elif target == "delay":
        curve = rshift(alpha, bound)  # rate-latency when burst == 0
    else:
        raise InvalidArgumentError(f"Unknown design target: {target}")

    svc = DualCurveService(curve, curve)
    verdict = is_schedulable_dual([svc], [b], capacity)
    if not verdict:
        raise InfeasibleDesignError(
            f"{target} bound {bound} with envelope (rate={rate}, burst={burst}) "
            f"needs more than c={capacity} over interval {verdict.interval}"
        )
    logger.debug(f"designed {target} service bound={bound} rate={rate} burst={burst}")
    return svc
