"""
Wigner small-d matrices and their beta-derivatives.

d^l(beta) = exp(-i beta J_y) in the |l, m> basis ordered m = -l..l. J_y is diagonalized once
per degree; after that every beta, and every derivative order, costs one pair of matrix
products. The eigenvalues of J_y are exactly the integers -l..l.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=128)
def _jy_eigenvectors(l: int) -> np.ndarray:
    m = np.arange(-l, l)
    raising = np.diag(np.sqrt((l - m) * (l + m + 1.0)), k=-1)
    jy = (raising - raising.T) / 2j
    _, vectors = np.linalg.eigh(jy)
    vectors.setflags(write=False)
    return vectors


def wigner_d_stack(l: int, betas, order: int = 0) -> np.ndarray:
    """
    d^l(beta) or its first or second beta-derivative for many angles at once.

    Args:
        l: Degree
        betas: Angles in radians, scalar or 1D
        order: 0, 1 or 2

    Returns:
        Real array of shape (len(betas), 2l + 1, 2l + 1), indexed [b, m + l, m' + l]
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=np.float64))
    vectors = _jy_eigenvectors(l)
    mu = np.arange(-l, l + 1, dtype=np.float64)
    phase = np.exp(-1j * np.outer(betas, mu))
    if order == 1:
        phase = phase * (-1j * mu)
    elif order == 2:
        phase = phase * (-(mu**2))
    elif order != 0:
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")
    return np.einsum("im,bm,jm->bij", vectors, phase, vectors.conj()).real


def wigner_d_small(l: int, beta: float) -> np.ndarray:
    """
    The real orthogonal matrix d^l(beta), rows m and columns m'.

    Args:
        l: Degree, l >= 0
        beta: Angle in radians

    Returns:
        Array of shape (2l + 1, 2l + 1)
    """
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got {l}")
    return wigner_d_stack(l, beta)[0]


def wigner_d_small_derivative(l: int, beta: float, order: int = 1) -> np.ndarray:
    """d/dbeta (order 1) or d^2/dbeta^2 (order 2) of d^l(beta)."""
    return wigner_d_stack(l, beta, order)[0]


def wigner_d_with_derivatives(l: int, beta: float) -> np.ndarray:
    """
    d^l(beta) together with its first and second beta-derivatives.

    Returns:
        Real array of shape (3, 2l + 1, 2l + 1): value, first, second derivative
    """
    vectors = _jy_eigenvectors(l)
    mu = np.arange(-l, l + 1, dtype=np.float64)
    phase = np.exp(-1j * beta * mu)
    phases = np.stack([phase, -1j * mu * phase, -(mu**2) * phase])
    return np.einsum("im,om,jm->oij", vectors, phases, vectors.conj()).real
