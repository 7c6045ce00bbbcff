import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import roots_legendre, spherical_jn

from src.basis.bessel import bessel_zero, radial_function, radial_norm, zero_table, zeros_below
from src.basis.expansion import EmptyBasisError, build_spec, default_lambda_cut


def test_degree_zero_roots_are_multiples_of_pi():
    for k in range(1, 6):
        assert_allclose(bessel_zero(0, k), k * np.pi, rtol=1e-14)


def test_first_root_of_j1():
    # tan(x) = x
    assert_allclose(bessel_zero(1, 1), 4.493409457909064, rtol=1e-12)


def test_roots_are_zeros():
    for l in (1, 5, 12, 30):
        for k in (1, 2, 7):
            assert abs(spherical_jn(l, bessel_zero(l, k))) < 1e-12


def test_roots_interlace():
    table = zero_table(10, 6)
    for l in range(1, 11):
        for k in range(5):
            assert table[l - 1, k] < table[l, k] < table[l - 1, k + 1]


def test_invalid_index():
    with pytest.raises(ValueError):
        bessel_zero(-1, 1)
    with pytest.raises(ValueError):
        bessel_zero(2, 0)


def test_radial_functions_are_orthonormal():
    x, w = roots_legendre(200)
    r = 0.5 * (x + 1.0)
    weights = 0.5 * w * r**2
    for l in (0, 3, 8):
        roots = np.array([bessel_zero(l, k) for k in range(1, 5)])
        norms = np.array([radial_norm(l, k) for k in range(1, 5)])
        profiles = radial_function(l, roots, norms, r)
        gram = (profiles * weights) @ profiles.T
        assert_allclose(gram, np.eye(4), atol=1e-10)


def test_zeros_below_respects_cutoff():
    cut = 20.0
    roots = zeros_below(6, cut)
    assert len(roots) == 7
    assert roots[0].size == int(cut // np.pi)
    for l, lam in enumerate(roots):
        assert np.all(lam <= cut)
        # nothing retained beyond the cutoff was skipped
        assert bessel_zero(l, lam.size + 1) > cut


def test_build_spec_rejects_cutoff_below_pi():
    with pytest.raises(EmptyBasisError):
        build_spec(4, 3.0)


def test_build_spec_single_function():
    spec = build_spec(0, np.pi + 0.1)
    assert spec.size == 1
    assert spec.block_shapes() == [(1, 1)]


def test_high_degrees_can_be_empty():
    spec = build_spec(20, 10.0)
    # first zero of j_l grows past 10 well before l = 20
    assert spec.radial_count(20) == 0
    assert spec.radial_count(0) == 3


def test_default_cutoff_is_nyquist_when_cap_does_not_bind():
    assert_allclose(default_lambda_cut(32, 4), np.pi * 16)


def test_default_cutoff_respects_coefficient_cap():
    n = 8
    cut = default_lambda_cut(n, 42, max_coefficient_fraction=0.1)
    assert cut < np.pi * n / 2
    assert 0 < build_spec(42, cut).size <= int(n**3 * 0.1)
