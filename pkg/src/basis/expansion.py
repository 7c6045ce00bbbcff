"""
Conversion between voxel volumes and ball-harmonics coefficients.
"""

import logging

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import spherical_jn

from src.model.basis import BallExpansion, BasisSpec
from src.model.volume import Volume, grid_coordinates

from .bessel import radial_norm_from_root, zeros_below
from .harmonics import harmonic_block
from .quadrature import quadrature_grid

logger = logging.getLogger(__name__)

SYNTHESIS_CHUNK = 16384


class EmptyBasisError(ValueError):
    """Raised when an eigen-frequency cutoff retains no degree-0 radial index."""

    pass


def build_spec(l_max: int, lambda_cut: float) -> BasisSpec:
    """
    Retain every (l, k) with l <= l_max and lambda_{l,k} <= lambda_cut.

    Args:
        l_max: Degree band limit
        lambda_cut: Eigen-frequency cutoff

    Returns:
        BasisSpec with root and normalization tables

    Raises:
        EmptyBasisError: If lambda_cut is below the first zero of j_0 (pi)
    """
    if l_max < 0:
        raise ValueError(f"l_max must be nonnegative, got {l_max}")
    if lambda_cut < np.pi:
        raise EmptyBasisError(f"lambda_cut={lambda_cut} retains no index for l=0 (first zero is pi)")

    roots = zeros_below(l_max, lambda_cut)
    norms = [radial_norm_from_root(l, lam) for l, lam in enumerate(roots)]
    spec = BasisSpec(l_max=l_max, lambda_cut=lambda_cut, roots=roots, norms=norms)
    logger.debug(f"Basis l_max={l_max}, lambda_cut={lambda_cut:.3f}: {spec.size} coefficients")
    return spec


def default_lambda_cut(n: int, l_max: int, nyquist_fraction: float = 1.0, max_coefficient_fraction: float = 0.25) -> float:
    """
    Nyquist eigen-frequency of an n^3 grid, lowered until at most n^3 * max_coefficient_fraction coefficients remain.

    The unit ball spans n/2 voxels, so the Nyquist cutoff is pi * n / 2 scaled by nyquist_fraction.
    When the cap binds, the returned cutoff is the largest retained root.
    """
    cut = np.pi * n / 2.0 * nyquist_fraction
    cap = int(n**3 * max_coefficient_fraction)

    roots = zeros_below(l_max, cut)
    multiplicity = np.concatenate([np.full(lam.size, 2 * l + 1) for l, lam in enumerate(roots)])
    all_roots = np.concatenate(roots)
    if multiplicity.sum() <= cap:
        return float(cut)

    order = np.argsort(all_roots, kind="stable")
    counts = np.cumsum(multiplicity[order])
    fits = np.flatnonzero(counts <= cap)
    if fits.size == 0:
        raise EmptyBasisError(f"coefficient cap {cap} leaves no basis function for n={n}")
    capped = float(all_roots[order][fits[-1]])
    logger.info(f"lambda_cut lowered from {cut:.3f} to {capped:.3f} to keep <= {cap} coefficients")
    return capped


def sample_at_nodes(volume: Volume, spec: BasisSpec, shift: tuple[int, int, int] = (0, 0, 0)) -> np.ndarray:
    """
    Trilinear samples of f_s(x) = f(x + s) at the quadrature nodes.

    Args:
        volume: Voxel data indexed [z, y, x]
        spec: Basis the grid is built for
        shift: Integer voxel shift (x, y, z)

    Returns:
        Samples of shape grid.shape; points outside the volume read as 0
    """
    grid = quadrature_grid(spec)
    half = volume.n / 2.0
    x, y, z = grid.cartesian()
    coords = np.stack([z * half + half + shift[2], y * half + half + shift[1], x * half + half + shift[0]])
    return map_coordinates(volume.data, coords.reshape(3, -1), order=1, mode="constant", cval=0.0).reshape(grid.shape)


def _check_grid_size(n: int) -> None:
    if n < 8 or n % 2:
        raise ValueError(f"grid size must be even and >= 8, got {n}")


def expand(volume: Volume, spec: BasisSpec, shift: tuple[int, int, int] = (0, 0, 0)) -> BallExpansion:
    """
    Coefficients <f_s, psi_{k,l,m}> of a volume by spherical product quadrature.

    Args:
        volume: Real volume on [-1, 1]^3; values outside the unit ball are ignored
        spec: Target basis
        shift: Integer voxel shift applied before expanding, f_s(x) = f(x + s)

    Returns:
        Expansion flagged real-valued
    """
    _check_grid_size(volume.n)
    return quadrature_grid(spec).project(sample_at_nodes(volume, spec, shift), real=True)


def synthesize(expansion: BallExpansion, n: int, voxel_size: float = 1.0) -> Volume:
    """
    Evaluate the truncated series on an n^3 voxel grid.

    Voxels with ||x|| >= 1 are exactly zero. The real part of the series is returned.
    """
    _check_grid_size(n)
    spec = expansion.spec
    x, y, z = grid_coordinates(n)
    r = np.sqrt(x**2 + y**2 + z**2)
    inside = np.flatnonzero(r.reshape(-1) < 1.0)

    rr = r.reshape(-1)[inside]
    theta = np.arccos(np.clip(np.divide(z.reshape(-1)[inside], rr, out=np.ones_like(rr), where=rr > 0), -1.0, 1.0))
    phi = np.arctan2(y.reshape(-1)[inside], x.reshape(-1)[inside])

    values = np.zeros(inside.size, dtype=np.float64)
    for start in range(0, inside.size, SYNTHESIS_CHUNK):
        chunk = slice(start, start + SYNTHESIS_CHUNK)
        total = np.zeros(rr[chunk].size, dtype=np.complex128)
        for l in range(spec.l_max + 1):
            if spec.radial_count(l) == 0:
                continue
            radial = spec.norms[l][:, None] * spherical_jn(l, np.outer(spec.roots[l], rr[chunk]))
            weights = expansion.blocks[l].T @ radial
            total += np.sum(weights * harmonic_block(l, theta[chunk], phi[chunk]), axis=0)
        values[chunk] = total.real

    data = np.zeros(n**3, dtype=np.float64)
    data[inside] = values
    return Volume(data=data.reshape(n, n, n), voxel_size=voxel_size)


def lowpass(expansion: BallExpansion, l_cut: int) -> BallExpansion:
    """Zero every coefficient with l > l_cut."""
    if not 0 <= l_cut <= expansion.spec.l_max:
        raise ValueError(f"l_cut={l_cut} outside [0, {expansion.spec.l_max}]")
    blocks = [b if l <= l_cut else np.zeros_like(b) for l, b in enumerate(expansion.blocks)]
    return BallExpansion(spec=expansion.spec, blocks=blocks, real=expansion.real)


def truncated(expansion: BallExpansion, l_cut: int) -> BallExpansion:
    """Expansion restricted to degrees <= l_cut over the correspondingly smaller basis."""
    if not 0 <= l_cut <= expansion.spec.l_max:
        raise ValueError(f"l_cut={l_cut} outside [0, {expansion.spec.l_max}]")
    spec = expansion.spec
    small = BasisSpec(l_max=l_cut, lambda_cut=spec.lambda_cut, roots=spec.roots[: l_cut + 1], norms=spec.norms[: l_cut + 1])
    return BallExpansion(spec=small, blocks=expansion.blocks[: l_cut + 1], real=expansion.real)

