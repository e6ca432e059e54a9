"""Common interface of worst-case service representations."""
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any

from wcsched.algebra.cumvec import CumVec

if TYPE_CHECKING:
    from wcsched.algebra.minplus import SpectralMatrix


class WorstCaseService(ABC):
    """
    A worst-case service psi as an updatable state.

    For every queued-arrival vector q with q_1 >= b, psi(q) <= q is a lower
    bound on departures. The backlog b lives with the caller (see FlowState);
    representations that embed their own b check it matches.
    """

    kind: str = "abstract"

    @property
    @abstractmethod
    def horizon(self) -> int:
        pass

    @abstractmethod
    def evaluate(self, q: CumVec) -> CumVec:
        """psi(q)."""
        pass

    @abstractmethod
    def spectrum(self, b: int) -> "SpectralMatrix":
        """Spectral values lambda_ij for backlog b."""
        pass

    @abstractmethod
    def conditional_spectrum(self, q1: int) -> "SpectralMatrix":
        """Spectral values once this slot's queued count q_1 is known."""
        pass

    @abstractmethod
    def update(self, q1: int, d: int) -> "WorstCaseService":
        """Service guaranteed from the next slot on after serving d of q1."""
        pass

    @abstractmethod
    def to_json(self) -> dict[str, Any]:
        pass

    def p_vector(self, q1: int) -> CumVec:
        """p_j = min(conditional lambda_0j, q1)."""
        row = self.conditional_spectrum(q1).entries[0]
        return CumVec(tuple(min(int(x), q1) for x in row))

    def guaranteed_now(self, q1: int) -> int:
        """p: least number of tasks that must be served this slot."""
        return self.p_vector(q1)[1]
