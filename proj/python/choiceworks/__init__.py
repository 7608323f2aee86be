"""Validated set-name transformations and certified zero localization.

Rationals cross the boundary as "p/q" strings; use fractions.Fraction to
work with them on the Python side.
"""

from ._choiceworks import (
    ChoiceworksError,
    filter_candidates,
    kappa,
    kappa_table,
    localize_zeros,
    slice_convex,
    validate_name,
)

__all__ = [
    "ChoiceworksError",
    "filter_candidates",
    "kappa",
    "kappa_table",
    "localize_zeros",
    "slice_convex",
    "validate_name",
]
