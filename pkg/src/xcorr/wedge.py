"""
Missing-wedge mask of a single-axis tilt series and its application as a Fourier filter.
"""

import logging

import numpy as np
from scipy import fft

from src.model.correlation import WedgeMask
from src.model.volume import Volume

logger = logging.getLogger(__name__)

BEAM = np.array([0.0, 0.0, 1.0])


class GridSizeMismatchError(ValueError):
    """Raised when a mask and a volume have different grid sizes."""

    pass


def build_wedge_mask(n: int, theta_max: float, tilt_axis=(0.0, 1.0, 0.0)) -> WedgeMask:
    """
    Binary mask of the Fourier region measured by a +/- theta_max tilt series.

    The beam runs along z. A frequency nu is kept when |nu . z| <= tan(theta_max) |nu . p|,
    p being the unit vector normal to both the beam and the tilt axis. DC is always kept
    and the mask is made exactly centro-symmetric on the FFT index grid.

    Args:
        n: Grid size
        theta_max: Half-angle of the tilt range in degrees, in (0, 90]
        tilt_axis: Tilt axis (x, y, z); its component along the beam is ignored

    Returns:
        WedgeMask laid out like an unshifted n^3 FFT indexed [z, y, x]
    """
    if not 0.0 < theta_max <= 90.0:
        raise ValueError(f"theta_max must be in (0, 90], got {theta_max}")
    axis = np.asarray(tilt_axis, dtype=np.float64)
    axis = axis - axis.dot(BEAM) * BEAM
    if np.linalg.norm(axis) < 1e-12:
        raise ValueError(f"tilt axis {tilt_axis} is parallel to the beam")
    axis /= np.linalg.norm(axis)

    if theta_max == 90.0:
        values = np.ones((n, n, n))
    else:
        normal = np.cross(BEAM, axis)
        freqs = fft.fftfreq(n)
        nu_z, nu_y, nu_x = np.meshgrid(freqs, freqs, freqs, indexing="ij")
        along_beam = np.abs(nu_z)
        across = np.abs(nu_x * normal[0] + nu_y * normal[1] + nu_z * normal[2])
        kept = along_beam <= np.tan(np.deg2rad(theta_max)) * across + 1e-12
        kept[0, 0, 0] = True
        mirrored = np.roll(kept[::-1, ::-1, ::-1], 1, axis=(0, 1, 2))
        values = (kept & mirrored).astype(np.float64)

    mask = WedgeMask(n=n, theta_max=theta_max, tilt_axis=tuple(float(a) for a in axis), values=values)
    logger.debug(f"Wedge mask n={n}, theta_max={theta_max}: kept fraction {mask.kept_fraction:.3f}")
    return mask


def apply_wedge(volume: Volume, mask: WedgeMask) -> Volume:
    """
    Real part of ifft(mask * fft(volume)).

    Raises:
        GridSizeMismatchError: If the grid sizes differ
    """
    if volume.n != mask.n:
        raise GridSizeMismatchError(f"volume of size {volume.n} does not match mask of size {mask.n}")
    filtered = fft.ifftn(mask.values * fft.fftn(volume.data))
    return volume.with_data(filtered.real)
