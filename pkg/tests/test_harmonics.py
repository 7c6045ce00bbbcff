import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import roots_legendre

from src.basis.harmonics import associated_block, harmonic_block, spherical_harmonic


def _sphere_grid(n: int):
    u, wu = roots_legendre(n)
    phi = 2.0 * np.pi * np.arange(2 * n) / (2 * n)
    theta = np.arccos(u)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    weights = np.outer(wu, np.full(phi.size, 2.0 * np.pi / phi.size))
    return tt.ravel(), pp.ravel(), weights.ravel()


def test_monopole():
    assert_allclose(spherical_harmonic(0, 0, 0.3, 1.2), 0.5 / np.sqrt(np.pi))


def test_orthonormal_on_sphere():
    theta, phi, weights = _sphere_grid(12)
    rows = np.concatenate([harmonic_block(l, theta, phi) for l in range(5)])
    gram = (rows * weights) @ rows.conj().T
    assert_allclose(gram, np.eye(rows.shape[0]), atol=1e-12)


def test_negative_order_symmetry():
    theta = np.array([0.2, 1.1, 2.5])
    phi = np.array([0.0, 2.0, 4.0])
    for l in range(1, 6):
        block = harmonic_block(l, theta, phi)
        for m in range(1, l + 1):
            assert_allclose(block[l - m], (-1) ** m * np.conj(block[l + m]), atol=1e-14)


def test_block_rows_match_scalar_calls():
    theta = np.array([0.4, 1.7])
    phi = np.array([0.3, 5.0])
    block = harmonic_block(3, theta, phi)
    for m in range(-3, 4):
        assert_allclose(block[m + 3], spherical_harmonic(3, m, theta, phi))


def test_associated_block_is_phi_independent_profile():
    theta = np.linspace(0.1, 3.0, 7)
    phi = np.full_like(theta, 0.9)
    full = harmonic_block(4, theta, phi)
    profile = associated_block(4, theta)
    m = np.arange(-4, 5)[:, None]
    assert_allclose(full, profile * np.exp(1j * m * phi[None, :]), atol=1e-14)


def test_order_out_of_range():
    with pytest.raises(ValueError):
        spherical_harmonic(2, 3, 0.1, 0.2)
