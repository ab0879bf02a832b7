"""The quadratic form: closed form, route agreement, exactness properties."""

import numpy as np
import pytest

from sqglab.bilinear import (
    QUADRATURE_SIZE_LIMIT,
    BilinearForm,
    bilinear_block,
    bilinear_quadrature,
    coupling_tensor,
    quadratic_diagonal,
)
from sqglab.sampling import random_mean_zero_field
from sqglab.spectral import FrequencyLattice, SpectralField, riesz_velocity


def band_limited(lattice, rng, decay=1.0):
    f = random_mean_zero_field(lattice, rng, decay=decay)
    keep = lattice.radius < lattice.xi_max / 2
    return SpectralField(lattice, np.where(keep, f.coeffs, 0.0))


def test_closed_form_cosine_pair(lattice32):
    # theta = cos(x1) + cos(2 x2) worked out by hand:
    #   u = grad^perp Lambda^{-1} theta = (sin(2 x2), -sin(x1))
    #   div(theta u) = sin(x1) sin(2 x2)
    #   (-Delta)^{-1} of that = (cos(x1 - 2 x2) - cos(x1 + 2 x2)) / 10
    # wavenumbers 1 and 2 are lattice indices 4 and 8 at h_xi = 1/4
    theta = SpectralField.cosine(lattice32, (4, 0)) + SpectralField.cosine(
        lattice32, (0, 8)
    )
    want = 0.1 * (
        SpectralField.cosine(lattice32, (4, -8)).coeffs
        - SpectralField.cosine(lattice32, (4, 8)).coeffs
    )
    got = quadratic_diagonal(theta)
    assert np.max(np.abs(got.coeffs - want)) <= 1e-12


def test_closed_form_velocity(lattice32):
    theta = SpectralField.cosine(lattice32, (4, 0))
    u = riesz_velocity(theta)
    x1 = lattice32.physical_coordinates()[0]
    assert np.max(np.abs(u.component(0).physical_real())) <= 1e-13
    assert np.max(np.abs(u.component(1).physical_real() + np.sin(x1))) <= 1e-13


def test_three_routes_agree(lattice32):
    rng = np.random.default_rng(31)
    f = band_limited(lattice32, rng)
    g = band_limited(lattice32, rng)
    slow = bilinear_quadrature(f, g)
    fast = bilinear_block(f, g)
    scale = np.max(np.abs(slow.coeffs))
    assert np.max(np.abs(fast.coeffs - slow.coeffs)) <= 1e-12 * scale

    diag = quadratic_diagonal(f)
    slow_diag = bilinear_quadrature(f, f)
    scale = np.max(np.abs(slow_diag.coeffs))
    assert np.max(np.abs(diag.coeffs - slow_diag.coeffs)) <= 1e-12 * scale


def test_block_form_is_symmetric(lattice32):
    rng = np.random.default_rng(32)
    f = band_limited(lattice32, rng)
    g = band_limited(lattice32, rng)
    a = bilinear_block(f, g).coeffs
    b = bilinear_block(g, f).coeffs
    assert np.array_equal(a, b)


def test_bilinearity_exact_for_dyadic_scalars(lattice32):
    # scaling by powers of two commutes exactly with every step of the
    # fast form, so bilinearity holds bitwise, not just to rounding
    rng = np.random.default_rng(33)
    f = band_limited(lattice32, rng)
    g = band_limited(lattice32, rng)
    base = bilinear_block(f, g).coeffs
    assert np.array_equal(bilinear_block(2.0 * f, g).coeffs, 2.0 * base)
    assert np.array_equal(bilinear_block(f, 0.25 * g).coeffs, 0.25 * base)
    assert np.array_equal(
        quadratic_diagonal(2.0 * f).coeffs, 4.0 * quadratic_diagonal(f).coeffs
    )


def test_output_is_mean_zero_and_real(lattice32):
    rng = np.random.default_rng(34)
    f = band_limited(lattice32, rng)
    out = quadratic_diagonal(f)
    assert out.mean_coefficient() == 0.0
    scale = np.max(np.abs(out.coeffs))
    assert out.hermitian_defect() <= 1e-13 * scale
    out.physical_real()  # must not raise


def test_quadrature_size_limit():
    big = FrequencyLattice(m=2 * QUADRATURE_SIZE_LIMIT, h_xi=0.25)
    f = SpectralField.cosine(big, (4, 0))
    with pytest.raises(ValueError, match="limited to m <="):
        bilinear_quadrature(f, f)
    with pytest.raises(ValueError, match="limited to m <="):
        BilinearForm(big, "quadrature")


def test_coupling_tensor_shape_checks(lattice32):
    f = SpectralField.cosine(lattice32, (4, 0))
    with pytest.raises(ValueError, match="scalar first argument"):
        coupling_tensor(f, f)


def test_lattice_mismatch_rejected(lattice32, lattice128):
    f = SpectralField.cosine(lattice32, (4, 0))
    g = SpectralField.cosine(lattice128, (4, 0))
    with pytest.raises(ValueError, match="different lattices"):
        bilinear_block(f, g)


def test_form_variant_dispatch(lattice32):
    rng = np.random.default_rng(35)
    f = band_limited(lattice32, rng)
    g = band_limited(lattice32, rng)
    with pytest.raises(ValueError, match="unknown variant"):
        BilinearForm(lattice32, "fancy")
    diag = BilinearForm(lattice32, "diagonal-fast")
    with pytest.raises(ValueError, match="theta, theta"):
        diag.apply(f, g)
    assert np.array_equal(diag.apply(f).coeffs, quadratic_diagonal(f).coeffs)
    block = BilinearForm(lattice32)
    assert np.array_equal(block.apply(f, g).coeffs, bilinear_block(f, g).coeffs)
