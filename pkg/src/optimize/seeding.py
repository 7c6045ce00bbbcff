"""
Candidate rotations from the local maxima of a low band on a uniform Euler grid.
"""

import logging

import numpy as np
from scipy.ndimage import maximum_filter

from src.model.correlation import XiBlocks
from src.model.rotation import Rotation
from src.xcorr.kernel import euler_grid_angles, euler_grid_shape, evaluate_grid

logger = logging.getLogger(__name__)

# two grid nodes closer than this (radians) describe the same rotation
DUPLICATE_ANGLE = 1e-6
# relative slack for ties between nodes on the beta = 0 and beta = pi rows
POLE_ROUNDING = 1e-9


def grid_local_maxima(scores: np.ndarray) -> np.ndarray:
    """
    Indices (a, b, c) of nodes strictly above all of their 26 neighbors.

    alpha and gamma wrap around; beta does not. The first and last beta rows are the
    poles, where neighbors along alpha + gamma (or alpha - gamma) are the same rotation
    and tie with the node; there a node only has to reach its neighborhood maximum to
    within rounding, and seed_candidates merges the copies.
    """
    footprint = np.ones((3, 3, 3), dtype=bool)
    footprint[1, 1, 1] = False
    neighborhood_max = maximum_filter(scores, footprint=footprint, mode=("wrap", "constant", "wrap"), cval=-np.inf)
    maxima = scores > neighborhood_max

    slack = POLE_ROUNDING * max(float(np.max(np.abs(scores))), 1e-300)
    for b in (0, scores.shape[1] - 1):
        maxima[:, b, :] |= scores[:, b, :] >= neighborhood_max[:, b, :] - slack
    return np.argwhere(maxima)


def seed_candidates(xi: XiBlocks, l_low: int, grid_step: float, max_candidates: int) -> list[tuple[Rotation, float]]:
    """
    Local maxima of C at band l_low over the ZYZ grid with the given step.

    Nodes at beta = 0 or pi that describe the same rotation are reported once. Ties in
    score are broken by the smaller rotation angle.

    Args:
        xi: Kernel at one shift
        l_low: Band used for seeding
        grid_step: Euler-angle step in radians
        max_candidates: Upper bound on the returned list

    Returns:
        (rotation, score) pairs sorted by descending score
    """
    shape = euler_grid_shape(grid_step)
    scores = evaluate_grid(xi, l_low, *shape)
    alphas, betas, gammas = euler_grid_angles(*shape)

    found: list[tuple[Rotation, float]] = []
    for a, b, c in grid_local_maxima(scores):
        found.append((Rotation.from_euler(alphas[a], betas[b], gammas[c]), float(scores[a, b, c])))
    found.sort(key=lambda item: (-item[1], item[0].angle))

    unique: list[tuple[Rotation, float]] = []
    for rotation, score in found:
        if any(rotation.inverse().compose(kept).angle < DUPLICATE_ANGLE for kept, _ in unique):
            continue
        unique.append((rotation, score))
        if len(unique) == max_candidates:
            break
    logger.debug(f"Seeding at band {l_low} on a {shape} grid: {len(found)} local maxima, kept {len(unique)}")
    return unique
