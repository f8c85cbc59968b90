"""Three-valued certification results."""

from __future__ import annotations

import enum

from mpmath.libmp import mpf_le, mpf_lt

from .numerics.interval import RigorousInterval


class Verdict(enum.Enum):
    TRUE = "CertifiedTrue"
    FALSE = "CertifiedFalse"
    UNKNOWN = "Unknown"

    def __bool__(self):
        # guard against `if verdict:` silently treating UNKNOWN as true
        raise TypeError("compare against Verdict members explicitly")

    @staticmethod
    def all_of(verdicts) -> "Verdict":
        verdicts = list(verdicts)
        if any(v is Verdict.FALSE for v in verdicts):
            return Verdict.FALSE
        if all(v is Verdict.TRUE for v in verdicts):
            return Verdict.TRUE
        return Verdict.UNKNOWN


def strictly_less(lhs: RigorousInterval, rhs: RigorousInterval) -> Verdict:
    """Decide ``lhs < rhs`` from enclosures."""
    lo1, hi1 = lhs.raw
    lo2, hi2 = rhs.raw
    if mpf_lt(hi1, lo2):
        return Verdict.TRUE
    if mpf_le(hi2, lo1):
        return Verdict.FALSE
    return Verdict.UNKNOWN


def less_equal(lhs: RigorousInterval, rhs: RigorousInterval) -> Verdict:
    """Decide ``lhs <= rhs`` from enclosures."""
    lo1, hi1 = lhs.raw
    lo2, hi2 = rhs.raw
    if mpf_le(hi1, lo2):
        return Verdict.TRUE
    if mpf_lt(hi2, lo1):
        return Verdict.FALSE
    return Verdict.UNKNOWN
