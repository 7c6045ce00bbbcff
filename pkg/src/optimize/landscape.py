"""
Slices of the correlation landscape over (alpha, beta) at fixed gamma.
"""

import logging

import numpy as np
import pandas as pd
from scipy import fft

from src.model.correlation import XiBlocks
from src.steer.wigner import wigner_d_stack

logger = logging.getLogger(__name__)


def landscape_slice(xi: XiBlocks, band: int, gamma: float, n_alpha: int, n_beta: int) -> tuple[np.ndarray, np.ndarray]:
    """
    C and dC/dalpha on a uniform (alpha, beta) grid at fixed gamma.

    alpha covers [0, 2 pi) and beta [0, pi] with both ends included.

    Returns:
        (scores, alpha_derivative), each of shape (n_beta, n_alpha)
    """
    if not 0 <= band <= xi.l_max:
        raise ValueError(f"band={band} outside [0, {xi.l_max}]")
    betas = np.linspace(0.0, np.pi, n_beta)
    folded = np.zeros((n_beta, n_alpha), dtype=np.complex128)
    folded_derivative = np.zeros_like(folded)
    for l in range(band + 1):
        m = np.arange(-l, l + 1)
        # sum over m' at fixed gamma leaves one coefficient per order m and beta
        weights = np.einsum("mn,bmn,n->bm", xi.blocks[l], wigner_d_stack(l, betas), np.exp(-1j * m * gamma))
        np.add.at(folded, (slice(None), m % n_alpha), weights)
        np.add.at(folded_derivative, (slice(None), m % n_alpha), -1j * m[None, :] * weights)
    scores = fft.fft(folded, axis=1).real
    derivative = fft.fft(folded_derivative, axis=1).real
    return scores, derivative


def count_sign_changes(derivative: np.ndarray) -> int:
    """Sign changes along alpha (periodic) summed over all beta rows."""
    signs = np.sign(derivative)
    return int(np.count_nonzero(signs * np.roll(signs, -1, axis=1) < 0))


def landscape(xi: XiBlocks, bands: list[int], gamma: float = 0.0, n_alpha: int = 72, n_beta: int = 37) -> tuple[pd.DataFrame, dict[int, int]]:
    """
    Landscape dump for several bands.

    Args:
        xi: Kernel at one shift
        bands: Bands to evaluate
        gamma: Fixed third Euler angle in radians
        n_alpha: Samples of alpha
        n_beta: Samples of beta

    Returns:
        Long table with columns band, alpha, beta, score, dscore_dalpha, and the
        number of sign changes of dC/dalpha per band
    """
    alphas = 2.0 * np.pi * np.arange(n_alpha) / n_alpha
    betas = np.linspace(0.0, np.pi, n_beta)
    beta_grid, alpha_grid = np.meshgrid(betas, alphas, indexing="ij")

    frames = []
    sign_changes: dict[int, int] = {}
    for band in bands:
        scores, derivative = landscape_slice(xi, band, gamma, n_alpha, n_beta)
        sign_changes[band] = count_sign_changes(derivative)
        frames.append(
            pd.DataFrame(
                {
                    "band": band,
                    "alpha": alpha_grid.ravel(),
                    "beta": beta_grid.ravel(),
                    "score": scores.ravel(),
                    "dscore_dalpha": derivative.ravel(),
                }
            )
        )
        logger.debug(f"Landscape at band {band}: {sign_changes[band]} sign changes of dC/dalpha")
    return pd.concat(frames, ignore_index=True), sign_changes
