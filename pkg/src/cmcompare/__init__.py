"""Exact evaluation and comparison of two formulas for the l-part of
(CM(K).G_1) over primitive quartic CM fields: BY, which counts ideals in
the reflex field, and LV, which counts ideals in imaginary quadratic orders."""

from .cmfield import CmField, FieldRejected, IndexData, build_cm_field, check_assumptions
from .formulas import ComparisonReport, by_total, compare, lv_total, verify_paper_lemmas

__all__ = [
    "CmField",
    "ComparisonReport",
    "FieldRejected",
    "IndexData",
    "build_cm_field",
    "by_total",
    "check_assumptions",
    "compare",
    "lv_total",
    "verify_paper_lemmas",
]
__version__ = "0.1.0"
