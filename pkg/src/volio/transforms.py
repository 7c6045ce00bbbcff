"""
Voxel-domain rotation and integer shift, independent of the steerable expansion.
"""

import numpy as np
from scipy import ndimage

from src.model.rotation import Rotation
from src.model.volume import Volume, grid_coordinates


def rotate_volume(volume: Volume, rotation: Rotation) -> Volume:
    """
    (R v)(x) = v(R^{-1} x) by trilinear interpolation; samples from outside the grid are 0.

    Args:
        volume: Volume indexed [z, y, x]
        rotation: Rotation about the grid center

    Returns:
        Rotated volume with the same voxel size
    """
    n = volume.n
    half = n / 2.0
    x, y, z = grid_coordinates(n)
    points = np.stack([x.ravel(), y.ravel(), z.ravel()])
    source = rotation.matrix().T @ points
    coords = source[::-1] * half + half
    values = ndimage.map_coordinates(volume.data, coords, order=1, mode="constant", cval=0.0)
    return volume.with_data(values.reshape(n, n, n))


def shift_volume(volume: Volume, shift: tuple[int, int, int]) -> Volume:
    """
    Move the content by an integer voxel shift (x, y, z): out(x) = v(x - s), zero-filled.
    """
    sx, sy, sz = (int(s) for s in shift)
    moved = ndimage.shift(volume.data, (sz, sy, sx), order=0, mode="constant", cval=0.0)
    return volume.with_data(moved)
