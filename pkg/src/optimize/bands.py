"""
Band selection from the energy ratio of the correlation kernel.
"""

import logging

import numpy as np

from src.model.correlation import XiBlocks
from src.xcorr.energy import energy_ratios

logger = logging.getLogger(__name__)


def select_bands(xi: XiBlocks, thresholds: list[float]) -> list[int]:
    """
    Smallest band L with energy_ratio(xi, L) <= tau, for every threshold tau.

    Args:
        xi: Kernel at one shift
        thresholds: Strictly decreasing values in (0, 1)

    Returns:
        Sorted band list without duplicates; never empty because the ratio reaches 0 at l_max

    Raises:
        ZeroEnergyError: If the kernel has no energy
    """
    ratios = energy_ratios(xi)
    bands = sorted({int(np.flatnonzero(ratios <= tau)[0]) for tau in thresholds})
    logger.debug(f"Selected bands {bands} for thresholds {thresholds}")
    return bands
