"""
Alignment driver: band selection, seeding, Newton refinement, shift search and baselines.
"""

from .aligner import DegenerateInputError, ShiftSearch, align, basis_for, coarse_shifts, fine_shifts, masked_subtomogram, search_rotation
from .bands import select_bands
from .baseline import exhaustive_baseline
from .landscape import count_sign_changes, landscape, landscape_slice
from .newton import NewtonRefiner, refine
from .seeding import grid_local_maxima, seed_candidates

__all__ = [
    "DegenerateInputError",
    "select_bands",
    "seed_candidates",
    "grid_local_maxima",
    "NewtonRefiner",
    "refine",
    "search_rotation",
    "ShiftSearch",
    "coarse_shifts",
    "fine_shifts",
    "basis_for",
    "masked_subtomogram",
    "align",
    "exhaustive_baseline",
    "landscape",
    "landscape_slice",
    "count_sign_changes",
]
