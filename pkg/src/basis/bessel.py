"""
Positive zeros of the spherical Bessel functions j_l and the radial normalization constants.

Zeros of j_l and j_{l-1} interlace, so the k-th zero of j_l is bracketed by the k-th and
(k+1)-th zeros of j_{l-1}. Starting from j_0 (zeros at k*pi) each degree is obtained with
one brentq call per zero.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import spherical_jn

logger = logging.getLogger(__name__)

# brentq tolerances; rtol is scipy's minimum (4 * machine epsilon)
ROOT_XTOL = 1e-14
ROOT_RTOL = 4.0 * np.finfo(float).eps


def _jl(x: float, l: int) -> float:
    return float(spherical_jn(l, x))


@lru_cache(maxsize=32)
def zero_table(l_max: int, count: int) -> np.ndarray:
    """
    First count positive zeros of j_l for every l <= l_max.

    Args:
        l_max: Highest degree
        count: Number of zeros per degree

    Returns:
        Read-only array of shape (l_max + 1, count); row l holds lambda_{l,1..count}
    """
    if l_max < 0 or count < 1:
        raise ValueError(f"need l_max >= 0 and count >= 1, got {l_max}, {count}")

    table = np.empty((l_max + 1, count), dtype=np.float64)
    points = np.arange(1, count + l_max + 1, dtype=np.float64) * np.pi
    table[0] = points[:count]
    for l in range(1, l_max + 1):
        roots = np.array([brentq(_jl, points[j], points[j + 1], args=(l,), xtol=ROOT_XTOL, rtol=ROOT_RTOL) for j in range(points.size - 1)])
        table[l] = roots[:count]
        points = roots
    logger.debug(f"Computed {count} Bessel zeros for degrees 0..{l_max}")
    table.setflags(write=False)
    return table


def bessel_zero(l: int, k: int) -> float:
    """
    The k-th positive zero lambda_{l,k} of the spherical Bessel function j_l.

    Args:
        l: Degree, l >= 0
        k: Root index, k >= 1

    Returns:
        lambda_{l,k}
    """
    if l < 0 or k < 1:
        raise ValueError(f"invalid root index (l={l}, k={k})")
    return float(zero_table(l, k)[l, k - 1])


def zeros_below(l_max: int, lambda_cut: float) -> list[np.ndarray]:
    """All zeros lambda_{l,k} <= lambda_cut for each l <= l_max."""
    # lambda_{l,k} > k*pi for l >= 1, so this count covers the cutoff for every degree
    count = max(1, math.ceil(lambda_cut / np.pi) + 1)
    table = zero_table(l_max, count)
    return [table[l][table[l] <= lambda_cut].copy() for l in range(l_max + 1)]


def radial_norm_from_root(l: int, root: float | np.ndarray) -> float | np.ndarray:
    """c = sqrt(2) / |j_{l+1}(lambda)|, from int_0^1 j_l(lambda r)^2 r^2 dr = j_{l+1}(lambda)^2 / 2."""
    return np.sqrt(2.0) / np.abs(spherical_jn(l + 1, root))


def radial_norm(l: int, k: int) -> float:
    """
    Normalization c_{l,k} making c_{l,k} j_l(lambda_{l,k} r) unit-norm on [0, 1] with weight r^2.

    Args:
        l: Degree
        k: Root index

    Returns:
        c_{l,k} > 0
    """
    return float(radial_norm_from_root(l, bessel_zero(l, k)))


def radial_function(l: int, roots: np.ndarray, norms: np.ndarray, r: np.ndarray) -> np.ndarray:
    """
    Normalized radial profiles c_{l,k} j_l(lambda_{l,k} r).

    Returns:
        Array of shape (len(roots), len(r))
    """
    return norms[:, None] * spherical_jn(l, np.outer(roots, r))
