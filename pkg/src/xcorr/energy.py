"""
Energy ratio of the correlation kernel and the cost model of band-truncated evaluation.
"""

import numpy as np

from src.model.correlation import XiBlocks


class ZeroEnergyError(ValueError):
    """Raised when the kernel carries no energy, so ratios are undefined."""

    pass


def energy_ratios(xi: XiBlocks) -> np.ndarray:
    """
    energy_ratio(xi, L) for every L = 0..l_max.

    Returns:
        Nonincreasing array of length l_max + 1 ending in exactly 0

    Raises:
        ZeroEnergyError: If sum |xi|^2 is zero
    """
    energy = xi.energy_per_degree()
    total = float(np.sum(energy))
    if total <= 0.0:
        raise ZeroEnergyError("correlation kernel has zero total energy")
    # tail[L] = sum_{l > L} energy[l]
    tail = np.concatenate([np.cumsum(energy[::-1])[::-1][1:], [0.0]])
    return tail / total


def energy_ratio(xi: XiBlocks, l_cut: int) -> float:
    """Fraction of sum |xi_{l,m,m'}|^2 carried by degrees l > l_cut."""
    if not 0 <= l_cut <= xi.l_max:
        raise ValueError(f"l_cut={l_cut} outside [0, {xi.l_max}]")
    return float(energy_ratios(xi)[l_cut])


def eval_cost_fraction(l_cut: int, l_max: int) -> float:
    """
    Term count of the band-l_cut sum relative to the band-l_max sum.

    Returns:
        sum_{l <= l_cut} (2l+1)^2 / sum_{l <= l_max} (2l+1)^2
    """
    if not 0 <= l_cut <= l_max:
        raise ValueError(f"need 0 <= l_cut <= l_max, got {l_cut}, {l_max}")
    terms = (2 * np.arange(l_max + 1) + 1) ** 2
    return float(terms[: l_cut + 1].sum() / terms.sum())
