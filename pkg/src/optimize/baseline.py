"""
Exhaustive Euler-grid search, the reference cost for the band-marching refinement.
"""

import logging

import numpy as np

from src.model.correlation import XiBlocks
from src.model.rotation import Rotation
from src.xcorr.kernel import euler_grid_angles, euler_grid_shape, evaluate_grid

logger = logging.getLogger(__name__)


def exhaustive_baseline(xi: XiBlocks, l_cut: int, angular_step: float) -> tuple[Rotation, float, int]:
    """
    Best node of the full uniform ZYZ grid at band l_cut.

    Args:
        xi: Kernel at one shift
        l_cut: Band evaluated
        angular_step: Grid step in radians

    Returns:
        (rotation, score, number of grid evaluations); the count is
        ceil(2 pi / step)^2 * (ceil(pi / step) + 1)
    """
    shape = euler_grid_shape(angular_step)
    scores = evaluate_grid(xi, l_cut, *shape)
    a, b, c = np.unravel_index(int(np.argmax(scores)), shape)
    alphas, betas, gammas = euler_grid_angles(*shape)
    rotation = Rotation.from_euler(alphas[a], betas[b], gammas[c])
    evaluations = int(np.prod(shape))
    logger.debug(f"Exhaustive grid {shape} at band {l_cut}: best score {scores[a, b, c]:.6e}")
    return rotation, float(scores[a, b, c]), evaluations
