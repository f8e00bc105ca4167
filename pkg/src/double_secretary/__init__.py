"""Optimal stopping for the secretary problem with every quality duplicated.

``2n`` applicants carry ranks ``1,1,2,2,...,n,n``; the interviewer sees relative
ranks and whether a rank repeats, and wins by hiring either copy of rank 1.
"""

__version__ = "0.1.0"

from .errors import EnumerationLimitError, InvalidArgument, NumericFailure, TerminalStateError
from .exactmath import (
    alpha,
    csp_prob_q,
    csp_threshold_a,
    harmonic_tail,
    lemma_A,
    lemma_B,
    limit_p,
    limit_r,
    prob_duplicate_pending,
    success_prob_p,
    threshold_r,
)

__all__ = [
    "EnumerationLimitError", "InvalidArgument", "NumericFailure", "TerminalStateError",
    "alpha", "csp_prob_q", "csp_threshold_a", "harmonic_tail", "lemma_A", "lemma_B",
    "limit_p", "limit_r", "prob_duplicate_pending", "success_prob_p", "threshold_r",
]
