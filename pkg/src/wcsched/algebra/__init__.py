"""Exact integer algebra: cumulative vectors, min-plus and dual-curve services."""
from wcsched.algebra.cumvec import (
    BEYOND_HORIZON,
    CumVec,
    make_delta,
    minplus_conv,
    rshift,
    tau,
    unshift_clip,
)
from wcsched.algebra.dualcurve import (
    DualCurveService,
    TaskDeadlineList,
    compose,
    compose_chain,
    deadlines,
    eval_dual,
    p_vector,
    spectrum_dual,
    u_hat,
    update_dual,
)
from wcsched.algebra.minplus import (
    CumulativeMatrix,
    SpectralMatrix,
    conditional_spectrum,
    eval_minplus,
    normalize_to_spectral,
    update_cumulative,
    update_spectral,
)
from wcsched.algebra.service import WorstCaseService

__all__ = [
    "BEYOND_HORIZON",
    "CumVec",
    "CumulativeMatrix",
    "DualCurveService",
    "SpectralMatrix",
    "TaskDeadlineList",
    "WorstCaseService",
    "compose",
    "compose_chain",
    "conditional_spectrum",
    "deadlines",
    "eval_dual",
    "eval_minplus",
    "make_delta",
    "minplus_conv",
    "normalize_to_spectral",
    "p_vector",
    "rshift",
    "spectrum_dual",
    "tau",
    "u_hat",
    "unshift_clip",
    "update_cumulative",
    "update_dual",
    "update_spectral",
]
