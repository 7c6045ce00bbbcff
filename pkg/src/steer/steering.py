"""
Wigner-D matrices of rotations and exact rotation of ball-harmonics expansions.
"""

import logging

import numpy as np

from src.model.basis import BallExpansion
from src.model.rotation import Rotation, WignerStack

from .wigner import wigner_d_stack

logger = logging.getLogger(__name__)


def _phases(l: int, angle: float) -> np.ndarray:
    return np.exp(-1j * np.arange(-l, l + 1) * angle)


def wigner_D_euler(l_max: int, alpha: float, beta: float, gamma: float) -> WignerStack:
    """D^l_{m,m'} = exp(-i m alpha) d^l_{m,m'}(beta) exp(-i m' gamma) for l <= l_max."""
    blocks = [_phases(l, alpha)[:, None] * wigner_d_stack(l, beta)[0] * _phases(l, gamma)[None, :] for l in range(l_max + 1)]
    return WignerStack(l_max=l_max, blocks=blocks)


def wigner_D(l_max: int, g: Rotation) -> WignerStack:
    """
    Wigner-D blocks of a rotation.

    Args:
        l_max: Highest degree
        g: Rotation

    Returns:
        WignerStack with D^l(g) for l = 0..l_max
    """
    return wigner_D_euler(l_max, *g.euler)


def wigner_D_grad_euler(l_max: int, alpha: float, beta: float, gamma: float) -> tuple[WignerStack, WignerStack, WignerStack]:
    d_alpha, d_beta, d_gamma = [], [], []
    for l in range(l_max + 1):
        m = np.arange(-l, l + 1)
        left = _phases(l, alpha)[:, None]
        right = _phases(l, gamma)[None, :]
        small, small_prime = wigner_d_stack(l, beta)[0], wigner_d_stack(l, beta, order=1)[0]
        full = left * small * right
        d_alpha.append(-1j * m[:, None] * full)
        d_beta.append(left * small_prime * right)
        d_gamma.append(-1j * m[None, :] * full)
    return (
        WignerStack(l_max=l_max, blocks=d_alpha),
        WignerStack(l_max=l_max, blocks=d_beta),
        WignerStack(l_max=l_max, blocks=d_gamma),
    )


def wigner_D_grad(l_max: int, g: Rotation) -> tuple[WignerStack, WignerStack, WignerStack]:
    """
    Euler-angle derivatives of D^l(g).

    d/dalpha scales row m by -i m, d/dgamma scales column m' by -i m', and d/dbeta
    replaces d^l(beta) with its derivative.

    Returns:
        (dD/dalpha, dD/dbeta, dD/dgamma)
    """
    return wigner_D_grad_euler(l_max, *g.euler)


def rotate_blocks(blocks, stack: WignerStack) -> list[np.ndarray]:
    """Apply D^l to the order index of each (K_l, 2l + 1) block: f'_m = sum_m' D_{m,m'} f_m'."""
    return [block @ d.T for block, d in zip(blocks, stack.blocks, strict=False)]


def rotate_expansion(expansion: BallExpansion, g: Rotation) -> BallExpansion:
    """
    Coefficients of R_g f, (R_g f)(x) = f(R_g^{-1} x).

    Args:
        expansion: Coefficients of f
        g: Rotation

    Returns:
        Expansion over the same basis; the real-valued flag is preserved
    """
    stack = wigner_D(expansion.spec.l_max, g)
    return BallExpansion(spec=expansion.spec, blocks=rotate_blocks(expansion.blocks, stack), real=expansion.real)
