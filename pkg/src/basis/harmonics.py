"""
Complex orthonormal spherical harmonics with the Condon-Shortley phase.
"""

import numpy as np
from scipy.special import sph_harm_y


def spherical_harmonic(l: int, m: int, theta, phi):
    """
    Y_l^m(theta, phi), theta polar and phi azimuthal.

    Args:
        l: Degree
        m: Order, |m| <= l
        theta: Polar angle(s) in [0, pi]
        phi: Azimuthal angle(s)

    Returns:
        Complex value, or array broadcast over theta and phi
    """
    if abs(m) > l:
        raise ValueError(f"order m={m} outside [-{l}, {l}]")
    value = sph_harm_y(l, m, theta, phi)
    return complex(value) if np.ndim(value) == 0 else value


def harmonic_block(l: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """
    Y_l^m at a set of points for every m = -l..l.

    Returns:
        Array of shape (2l + 1, npoints) with row m + l
    """
    orders = np.arange(-l, l + 1)
    return sph_harm_y(l, orders[:, None], np.asarray(theta)[None, :], np.asarray(phi)[None, :])


def associated_block(l: int, theta: np.ndarray) -> np.ndarray:
    """
    Real theta-profiles P_l^m with Y_l^m(theta, phi) = P_l^m(theta) exp(i m phi).

    Returns:
        Array of shape (2l + 1, ntheta) with row m + l
    """
    return harmonic_block(l, theta, np.zeros_like(theta)).real
