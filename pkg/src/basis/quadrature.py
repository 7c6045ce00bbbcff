"""
Spherical product quadrature on the unit ball and projection onto the ball harmonics.

Nodes are Gauss-Legendre in r (weight r^2), Gauss-Legendre in cos(theta) and uniform in
phi. Integration over phi is done with an FFT, so the coefficient of order m picks up
exactly the m-th Fourier mode of the samples on each (r, theta) ring.
"""

import logging
import math
import threading

import numpy as np
from scipy import fft
from scipy.special import roots_legendre

from src.model.basis import BallExpansion, BasisSpec

from .bessel import radial_function
from .harmonics import associated_block

logger = logging.getLogger(__name__)


class QuadratureGrid:
    """
    Product grid (r, theta, phi) with the per-degree tables needed to project samples.

    Attributes:
        r, r_weights: radial nodes in (0, 1) and Gauss weights times r^2
        theta, theta_weights: polar nodes from Gauss-Legendre in cos(theta)
        phi: uniform azimuthal nodes
        radial_tables[l]: (K_l, n_r) weighted radial profiles
        angular_tables[l]: (2l + 1, n_theta) weighted theta-profiles
    """

    def __init__(self, spec: BasisSpec):
        self.spec = spec
        self.n_r = math.ceil(0.75 * spec.lambda_cut) + 10
        self.n_theta = 2 * spec.l_max + 2
        self.n_phi = 2 * spec.l_max + 2

        x, w = roots_legendre(self.n_r)
        self.r = 0.5 * (x + 1.0)
        self.r_weights = 0.5 * w * self.r**2

        u, wu = roots_legendre(self.n_theta)
        self.theta = np.arccos(u)
        self.theta_weights = wu

        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

        self.radial_tables = [radial_function(l, spec.roots[l], spec.norms[l], self.r) * self.r_weights[None, :] for l in range(spec.l_max + 1)]
        self.angular_tables = [associated_block(l, self.theta) * self.theta_weights[None, :] for l in range(spec.l_max + 1)]
        logger.debug(f"Quadrature grid {self.n_r} x {self.n_theta} x {self.n_phi} for l_max={spec.l_max}, lambda_cut={spec.lambda_cut:.3f}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n_r, self.n_theta, self.n_phi

    def cartesian(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Node coordinates (x, y, z), each of shape (n_r, n_theta, n_phi)."""
        r = self.r[:, None, None]
        sin_t = np.sin(self.theta)[None, :, None]
        cos_t = np.cos(self.theta)[None, :, None]
        x = r * sin_t * np.cos(self.phi)[None, None, :]
        y = r * sin_t * np.sin(self.phi)[None, None, :]
        z = r * cos_t * np.ones_like(self.phi)[None, None, :]
        return x, y, z

    def project(self, values: np.ndarray, real: bool) -> BallExpansion:
        """
        Integrate samples against every retained conj(psi_{k,l,m}).

        Args:
            values: Function samples at the nodes, shape (n_r, n_theta, n_phi)
            real: Samples are real; negative orders are then filled by conjugate symmetry

        Returns:
            Expansion over self.spec
        """
        if values.shape != self.shape:
            raise ValueError(f"samples of shape {values.shape} do not match grid {self.shape}")

        modes = fft.fft(values, axis=2) * (2.0 * np.pi / self.n_phi)
        blocks = []
        for l in range(self.spec.l_max + 1):
            if self.spec.radial_count(l) == 0:
                blocks.append(np.zeros((0, 2 * l + 1), dtype=np.complex128))
                continue
            orders = np.arange(-l, l + 1)
            ring = modes[:, :, orders % self.n_phi]
            angular = np.einsum("mt,rtm->rm", self.angular_tables[l], ring)
            block = self.radial_tables[l] @ angular
            if real:
                block[:, :l] = _mirror_negative(block, l)
            blocks.append(block)
        return BallExpansion(spec=self.spec, blocks=blocks, real=real)


def _mirror_negative(block: np.ndarray, l: int) -> np.ndarray:
    """Columns m < 0 rebuilt from m > 0 through f_{-m} = (-1)^m conj(f_m)."""
    positive = block[:, l + 1 :]
    signs = (-1.0) ** np.arange(1, l + 1)
    return (signs[None, :] * np.conj(positive))[:, ::-1]


def _spec_key(spec: BasisSpec) -> tuple:
    return spec.l_max, spec.lambda_cut, tuple(r.tobytes() for r in spec.roots)


_GRID_CACHE_SIZE = 8
_grid_cache: dict[tuple, QuadratureGrid] = {}
_grid_lock = threading.Lock()


def quadrature_grid(spec: BasisSpec) -> QuadratureGrid:
    """Shared QuadratureGrid for a basis, built once per distinct spec."""
    key = _spec_key(spec)
    with _grid_lock:
        grid = _grid_cache.get(key)
        if grid is None:
            if len(_grid_cache) >= _GRID_CACHE_SIZE:
                _grid_cache.pop(next(iter(_grid_cache)))
            grid = QuadratureGrid(spec)
            _grid_cache[key] = grid
    return grid


def project(values: np.ndarray, spec: BasisSpec, real: bool = False) -> BallExpansion:
    """Project samples taken at the nodes of quadrature_grid(spec)."""
    return quadrature_grid(spec).project(values, real)
