"""Brute-force oracle for tiny instances."""
from wcsched.oracle.tabulated import (
    TabulatedService,
    brute_conditional_spectrum,
    brute_feasible_set,
    brute_is_schedulable,
    brute_next_spectra,
    brute_spectrum,
    brute_update,
    check_scale,
    lattice,
    tandem,
)

__all__ = [
    "TabulatedService",
    "brute_conditional_spectrum",
    "brute_feasible_set",
    "brute_is_schedulable",
    "brute_next_spectra",
    "brute_spectrum",
    "brute_update",
    "check_scale",
    "lattice",
    "tandem",
]
