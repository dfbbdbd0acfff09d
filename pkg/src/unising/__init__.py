"""Unisingularity of finite linear groups over prime fields."""

from .covering_engine import CoveringVerdict, VerdictOptions, scan, unisingularity_verdict, verify_witness
from .errors import BudgetExceeded, InvariantViolation
from .grp_model import construct_grp

__all__ = [
    "BudgetExceeded",
    "CoveringVerdict",
    "InvariantViolation",
    "VerdictOptions",
    "construct_grp",
    "scan",
    "unisingularity_verdict",
    "verify_witness",
]
