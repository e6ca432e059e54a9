"""
Multiplexing gains.

rho(G) is the least constant capacity that could serve the flows in G on
their own: the largest spectral rate max_{i<j} lambda_ij(G) / (j - i).
The gain eta compares the standalone needs of single flows with the
multiplexed need; eta^P does the same for classes of a partition.

    eta   = sum_w rho({w}) / rho(Omega)          >= 1
    eta^P = sum_{G in P} rho(G) / rho(Omega),    1 <= eta^P <= eta

All values are exact fractions.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from wcsched.feasible.permutohedron import validate_partition
from wcsched.feasible.setfunction import mask_of, members
from wcsched.feasible.system import SystemSpectra


def rho(system: SystemSpectra, mask: int) -> Fraction:
    """max_{0 <= i < j <= H} lambda_ij(G) / (j - i)."""
    total = system.total_spectrum(mask)
    best = Fraction(0)
    for lag in range(1, system.horizon + 1):
        peak = int(np.diagonal(total, offset=lag).max())
        best = max(best, Fraction(peak, lag))
    return best


@dataclass
class GainReport:
    """Multiplexing gains of one system."""
    rho: dict[int, Fraction] = field(default_factory=dict)
    eta: Fraction = Fraction(1)
    eta_p: Fraction | None = None
    partition: list[list[int]] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho": [
                {"flows": members(mask), "value": f"{value.numerator}/{value.denominator}"}
                for mask, value in sorted(self.rho.items())
            ],
            "eta": f"{self.eta.numerator}/{self.eta.denominator}",
            "eta_p": (
                None if self.eta_p is None
                else f"{self.eta_p.numerator}/{self.eta_p.denominator}"
            ),
            "partition": self.partition,
        }


def multiplexing_gain(
    system: SystemSpectra,
    partition: Sequence[Sequence[int]] | None = None,
    full_table_max: int = 12,
) -> GainReport:
    """rho table (every subset up to full_table_max flows), eta and eta^P."""
    n = system.n
    full = (1 << n) - 1
    if n <= full_table_max:
        masks = list(range(1 << n))
    else:
        masks = sorted({full} | {1 << k for k in range(n)})

    classes = validate_partition(partition, n) if partition is not None else None
    if classes is not None:
        masks = sorted(set(masks) | {mask_of(c) for c in classes})

    table = {mask: rho(system, mask) for mask in masks}
    report = GainReport(rho=table, partition=classes)

    joint = table[full]
    if joint == 0:
        report.eta = Fraction(1)
        report.eta_p = Fraction(1) if classes is not None else None
        return report

    report.eta = sum((table[1 << k] for k in range(n)), Fraction(0)) / joint
    if classes is not None:
        report.eta_p = sum((table[mask_of(c)] for c in classes), Fraction(0)) / joint
    return report
