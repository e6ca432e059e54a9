"""
Dynamic repartitioning for per-class schedulers.

A flow that keeps a backlog yet receives no service for ``threshold``
consecutive slots is promoted to the next higher-priority class. Once its
queue has stayed empty for ``threshold`` slots it goes back to its home
class. Classes left empty are dropped from the working partition.
"""
import logging
from typing import Sequence

from wcsched.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


class StarvationRepartitioner:
    """Tracks starving flows and rewrites the partition used by a per-class scheduler."""

    def __init__(
        self,
        partition: Sequence[Sequence[int]],
        class_priority: Sequence[int] | None,
        threshold: int,
    ):
        if threshold < 1:
            raise InvalidArgumentError("threshold must be >= 1")
        self.threshold = threshold
        self.class_priority = list(class_priority) if class_priority is not None else list(range(len(partition)))
        if sorted(self.class_priority) != list(range(len(partition))):
            raise InvalidArgumentError("class_priority must be a permutation of the classes")

        self.home: dict[int, int] = {k: c for c, cls in enumerate(partition) for k in cls}
        self.assigned = dict(self.home)
        self.starved: dict[int, int] = {k: 0 for k in self.home}
        self.idle: dict[int, int] = {k: 0 for k in self.home}

    def _rank(self, cls: int) -> int:
        return self.class_priority.index(cls)

    def observe(self, d: Sequence[int], backlogs: Sequence[int]) -> None:
        for k, (dk, bk) in enumerate(zip(d, backlogs)):
            if k not in self.assigned:
                continue
            self.starved[k] = self.starved[k] + 1 if bk > 0 and dk == 0 else 0
            self.idle[k] = self.idle[k] + 1 if bk == 0 else 0

            rank = self._rank(self.assigned[k])
            if self.starved[k] >= self.threshold and rank > 0:
                self.assigned[k] = self.class_priority[rank - 1]
                self.starved[k] = 0
                logger.info(f"flow {k} promoted to class {self.assigned[k]}")
            elif self.idle[k] >= self.threshold and self.assigned[k] != self.home[k]:
                self.assigned[k] = self.home[k]
                logger.info(f"flow {k} returned to class {self.home[k]}")

    def current(self) -> tuple[list[list[int]], list[int]]:
        """Non-empty classes and their priority order, renumbered densely."""
        by_class: dict[int, list[int]] = {}
        for k in sorted(self.assigned):
            by_class.setdefault(self.assigned[k], []).append(k)
        kept = sorted(by_class)
        renumber = {c: i for i, c in enumerate(kept)}
        partition = [by_class[c] for c in kept]
        priority = [renumber[c] for c in self.class_priority if c in renumber]
        return partition, priority
