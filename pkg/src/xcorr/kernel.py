"""
Rotational cross-correlation of two expansions at a fixed shift.

C(g) = Re sum_{l <= L} sum_{m, m'} xi_{l,m,m'} D^l_{m,m'}(g), with xi_l = t_l^H f_l, equals
<t, R_g f> restricted to degrees <= L.
"""

import logging

import numpy as np
from scipy import fft

from src.model.basis import BallExpansion
from src.model.correlation import XiBlocks
from src.model.rotation import Rotation
from src.steer.wigner import wigner_d_stack, wigner_d_with_derivatives

logger = logging.getLogger(__name__)

GIMBAL_MARGIN = 1e-3
GRID_BETA_CHUNK = 16


class SpecMismatchError(ValueError):
    """Raised when two expansions over different bases are contracted."""

    pass


class GimbalLockError(ValueError):
    """Raised when Euler derivatives are requested too close to beta in {0, pi}."""

    pass


def xi_coefficients(t: BallExpansion, f_s: BallExpansion, shift: tuple[int, int, int] = (0, 0, 0)) -> XiBlocks:
    """
    Build xi_{l,m,m'} = sum_k conj(t_{k,l,m}) f_{k,l,m'}.

    Args:
        t: Template coefficients
        f_s: Subtomogram coefficients at shift s
        shift: The shift f_s was expanded at, recorded on the result

    Returns:
        XiBlocks for degrees 0..l_max

    Raises:
        SpecMismatchError: If the expansions use different bases
    """
    if not t.spec.same_basis(f_s.spec):
        raise SpecMismatchError(f"template basis {t.spec.block_shapes()} differs from subtomogram basis {f_s.spec.block_shapes()}")
    blocks = [a.conj().T @ b for a, b in zip(t.blocks, f_s.blocks, strict=True)]
    return XiBlocks(l_max=t.spec.l_max, blocks=blocks, shift=shift)


def _check_band(xi: XiBlocks, l_cut: int) -> None:
    if not 0 <= l_cut <= xi.l_max:
        raise ValueError(f"l_cut={l_cut} outside [0, {xi.l_max}]")


def _phased(xi: XiBlocks, l: int, alpha: float, gamma: float) -> np.ndarray:
    m = np.arange(-l, l + 1)
    return xi.blocks[l] * np.exp(-1j * m * alpha)[:, None] * np.exp(-1j * m * gamma)[None, :]


def evaluate_euler_complex(xi: XiBlocks, alpha: float, beta: float, gamma: float, l_cut: int) -> complex:
    """Complex sum of xi * D over degrees <= l_cut at ZYZ angles."""
    _check_band(xi, l_cut)
    total = 0j
    for l in range(l_cut + 1):
        total += np.sum(_phased(xi, l, alpha, gamma) * wigner_d_stack(l, beta)[0])
    return complex(total)


def evaluate_complex(xi: XiBlocks, g: Rotation, l_cut: int) -> complex:
    """The full complex sum; its imaginary part vanishes for real volumes."""
    return evaluate_euler_complex(xi, *g.euler, l_cut)


def evaluate(xi: XiBlocks, g: Rotation, l_cut: int) -> float:
    """
    Band-truncated rotational cross-correlation.

    Args:
        xi: Kernel at one shift
        g: Rotation applied to the subtomogram
        l_cut: Highest degree included

    Returns:
        Real part of sum_{l <= l_cut} sum_{m, m'} xi_{l,m,m'} D^l_{m,m'}(g)
    """
    value = evaluate_complex(xi, g, l_cut)
    if abs(value.imag) > 1e-8 * max(abs(value.real), 1e-300):
        logger.debug(f"Correlation has imaginary part {value.imag:.3e} (real {value.real:.3e})")
    return value.real


def value_and_derivatives(xi: XiBlocks, alpha: float, beta: float, gamma: float, l_cut: int) -> tuple[float, np.ndarray, np.ndarray]:
    """
    C with its Euler-angle gradient and Hessian in one pass.

    Returns:
        (C, gradient of shape (3,), Hessian of shape (3, 3)), variables ordered (alpha, beta, gamma)
    """
    _check_band(xi, l_cut)
    value = 0.0
    grad = np.zeros(3)
    hess = np.zeros((3, 3))
    for l in range(l_cut + 1):
        m = np.arange(-l, l + 1, dtype=np.float64)
        row, col = m[:, None], m[None, :]
        w = _phased(xi, l, alpha, gamma)
        d0, d1, d2 = wigner_d_with_derivatives(l, beta)

        value += np.sum(w * d0).real
        grad[0] += np.sum(-1j * row * w * d0).real
        grad[1] += np.sum(w * d1).real
        grad[2] += np.sum(-1j * col * w * d0).real

        hess[0, 0] += np.sum(-(row**2) * w * d0).real
        hess[0, 1] += np.sum(-1j * row * w * d1).real
        hess[0, 2] += np.sum(-(row * col) * w * d0).real
        hess[1, 1] += np.sum(w * d2).real
        hess[1, 2] += np.sum(-1j * col * w * d1).real
        hess[2, 2] += np.sum(-(col**2) * w * d0).real
    hess[1, 0], hess[2, 0], hess[2, 1] = hess[0, 1], hess[0, 2], hess[1, 2]
    return float(value), grad, hess


def _euler_away_from_poles(g: Rotation) -> tuple[float, float, float]:
    alpha, beta, gamma = g.euler
    if beta < GIMBAL_MARGIN or beta > np.pi - GIMBAL_MARGIN:
        raise GimbalLockError(f"beta={beta:.3e} is within {GIMBAL_MARGIN} of a pole; reparameterize the rotation")
    return alpha, beta, gamma


def gradient(xi: XiBlocks, g: Rotation, l_cut: int) -> np.ndarray:
    """
    (dC/dalpha, dC/dbeta, dC/dgamma) at g.

    Raises:
        GimbalLockError: If beta(g) is within 1e-3 of 0 or pi
    """
    return value_and_derivatives(xi, *_euler_away_from_poles(g), l_cut)[1]


def hessian(xi: XiBlocks, g: Rotation, l_cut: int) -> np.ndarray:
    """
    Symmetric 3x3 matrix of second Euler-angle derivatives of C at g.

    Raises:
        GimbalLockError: If beta(g) is within 1e-3 of 0 or pi
    """
    return value_and_derivatives(xi, *_euler_away_from_poles(g), l_cut)[2]


def euler_grid_shape(step: float) -> tuple[int, int, int]:
    """(n_alpha, n_beta, n_gamma) of the uniform ZYZ grid with the given angular step."""
    if step <= 0:
        raise ValueError(f"angular step must be positive, got {step}")
    n_circle = int(np.ceil(2.0 * np.pi / step - 1e-9))
    n_beta = int(np.ceil(np.pi / step - 1e-9)) + 1
    return n_circle, n_beta, n_circle


def euler_grid_angles(n_alpha: int, n_beta: int, n_gamma: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """alpha, gamma uniform on [0, 2 pi); beta uniform on [0, pi] endpoints included."""
    alphas = 2.0 * np.pi * np.arange(n_alpha) / n_alpha
    betas = np.linspace(0.0, np.pi, n_beta) if n_beta > 1 else np.zeros(1)
    gammas = 2.0 * np.pi * np.arange(n_gamma) / n_gamma
    return alphas, betas, gammas


def evaluate_grid(xi: XiBlocks, l_cut: int, n_alpha: int, n_beta: int, n_gamma: int) -> np.ndarray:
    """
    C on the full uniform Euler grid.

    For each beta, xi_l * d^l(beta) is folded into an (n_alpha, n_gamma) array by order
    modulo the grid size; a 2D FFT then yields every (alpha, gamma) at once.

    Returns:
        Real array of shape (n_alpha, n_beta, n_gamma)
    """
    _check_band(xi, l_cut)
    _, betas, _ = euler_grid_angles(n_alpha, n_beta, n_gamma)
    out = np.empty((n_alpha, n_beta, n_gamma), dtype=np.float64)
    for start in range(0, n_beta, GRID_BETA_CHUNK):
        chunk = betas[start : start + GRID_BETA_CHUNK]
        folded = np.zeros((chunk.size, n_alpha, n_gamma), dtype=np.complex128)
        for l in range(l_cut + 1):
            m = np.arange(-l, l + 1)
            contribution = xi.blocks[l][None, :, :] * wigner_d_stack(l, chunk)
            np.add.at(folded, (slice(None), (m % n_alpha)[:, None], (m % n_gamma)[None, :]), contribution)
        out[:, start : start + chunk.size, :] = np.moveaxis(fft.fft2(folded, axes=(1, 2)).real, 0, 1)
    return out
