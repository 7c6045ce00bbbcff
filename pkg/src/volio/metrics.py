"""
Accuracy metrics for recovered poses.
"""

import numpy as np

from src.model.rotation import Rotation


def geodesic_degrees(g1: Rotation, g2: Rotation) -> float:
    """Angle of the relative rotation g1^{-1} g2 in degrees, in [0, 180]."""
    relative = g1.to_scipy().inv() * g2.to_scipy()
    return float(np.clip(np.rad2deg(relative.magnitude()), 0.0, 180.0))


def shift_error(found: tuple[int, int, int], truth: tuple[int, int, int]) -> tuple[int, int, int]:
    return tuple(int(a) - int(b) for a, b in zip(found, truth, strict=True))
