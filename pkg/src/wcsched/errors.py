"""
Exception hierarchy for wcsched.

Every error carries a short ``code`` used in CLI diagnostics. Errors caused by
bad arguments also subclass ValueError so callers can keep catching that.
"""


class WcschedError(Exception):
    """Base class for all wcsched errors."""

    code = "wcsched-error"


class InvalidHorizonError(WcschedError, ValueError):
    """Horizon outside 1..horizon_max."""

    code = "invalid-horizon"


class InvalidArgumentError(WcschedError, ValueError):
    """Argument outside the domain of an operation."""

    code = "invalid-argument"


class InvariantError(WcschedError, ValueError):
    """A value failed its structural invariants (e.g. on JSON load)."""

    code = "invariant-violation"

    def __init__(self, message: str, position: tuple[int, ...] | None = None):
        if position is not None:
            message = f"{message} at position {list(position)}"
        super().__init__(message)
        self.position = position


class GuaranteeViolationError(WcschedError):
    """Served fewer tasks than the worst-case service requires (d < p)."""

    code = "guarantee-violation"

    def __init__(self, d: int, p: int):
        super().__init__(f"schedule d={d} is below the guaranteed minimum p={p}")
        self.d = d
        self.p = p


class CausalityViolationError(WcschedError):
    """Served more tasks than are queued (d > q)."""

    code = "causality-violation"

    def __init__(self, d: int, q: int):
        super().__init__(f"schedule d={d} exceeds queued tasks q={q}")
        self.d = d
        self.q = q


class NotSchedulableError(WcschedError):
    """The system violates the schedulability condition."""

    code = "not-schedulable"

    def __init__(self, interval: tuple[int, int] | None = None):
        msg = "system is not schedulable"
        if interval is not None:
            msg += f" over interval {interval}"
        super().__init__(msg)
        self.interval = interval


class InfeasibleTotalError(WcschedError, ValueError):
    """Total service mu outside [beta(Omega), min(c, q)]."""

    code = "infeasible-total"


class NoScheduleError(WcschedError, ValueError):
    """No schedule exists for the requested total or class totals."""

    code = "no-schedule"


class UnsupportedServiceKindError(WcschedError):
    """Operation requires a different service representation."""

    code = "unsupported-service-kind"


class InvalidBaseError(WcschedError, ValueError):
    """Base schedule is not in the baseline permutohedron."""

    code = "invalid-base"


class InfeasibleDesignError(WcschedError, ValueError):
    """Requested bound cannot be guaranteed for the arrival envelope."""

    code = "infeasible-design"


class PolicyError(WcschedError):
    """A scheduling policy produced an infeasible schedule."""

    code = "policy-error"


class OracleTooLargeError(WcschedError, ValueError):
    """Instance exceeds the brute-force oracle limits."""

    code = "oracle-too-large"
