"""Core spectral layer: lattice validation, field construction, Fourier
multipliers, the dealiased product against a direct convolution oracle,
dyadic rescaling, and field snapshots."""

import numpy as np
import pytest
from scipy.signal import convolve2d

from sqglab.sampling import random_mean_zero_field
from sqglab.spectral import (
    FrequencyLattice,
    SpectralField,
    divergence,
    dyadic_rescale,
    inverse_laplacian,
    load_field,
    multiply,
    neg_laplacian,
    riesz_velocity,
    save_field,
)


def direct_convolution(f: SpectralField, g: SpectralField) -> np.ndarray:
    """O(m^4) convolution oracle: direct sums on centered index arrays,
    cropped to the symmetric box with the unpaired edge dropped."""
    m = f.lattice.m
    a = np.fft.fftshift(f.coeffs)
    b = np.fft.fftshift(g.coeffs)
    full = convolve2d(a, b, mode="full")  # frequency zero sits at index m
    lo = m - m // 2
    box = full[lo : lo + m, lo : lo + m].copy()
    box[0, :] = 0.0
    box[:, 0] = 0.0
    return np.fft.ifftshift(box)


# -- lattice -----------------------------------------------------------------


@pytest.mark.parametrize("bad_m", [0, 4, 7, 48, 100])
def test_lattice_rejects_non_power_of_two(bad_m):
    with pytest.raises(ValueError, match="power of two"):
        FrequencyLattice(m=bad_m, h_xi=0.25)


def test_lattice_rejects_nonpositive_spacing():
    with pytest.raises(ValueError, match="h_xi"):
        FrequencyLattice(m=32, h_xi=0.0)


def test_lattice_geometry():
    lat = FrequencyLattice(m=64, h_xi=0.125)
    assert lat.xi_max == pytest.approx(4.0)
    assert lat.box_length == pytest.approx(16.0 * np.pi)
    assert lat.quadrature_weight == pytest.approx(lat.dx**2)
    assert lat.radius[0, 0] == 0.0
    # FFT ordering: index m/2 carries the negative Nyquist frequency
    assert lat.k1[lat.m // 2, 0] == -32


# -- field construction ------------------------------------------------------


def test_cosine_matches_sampled_cosine(lattice32):
    x1, x2 = lattice32.physical_coordinates()
    f = SpectralField.cosine(lattice32, (3, -2), amplitude=1.5)
    want = 1.5 * np.cos(lattice32.h_xi * (3 * x1 - 2 * x2))
    assert np.max(np.abs(f.physical_real() - want)) < 1e-12


def test_from_modes_rejects_unpaired_edge(lattice32):
    with pytest.raises(ValueError, match="symmetric box"):
        SpectralField.from_modes(lattice32, {(-16, 0): 1.0})


def test_physical_roundtrip(lattice32):
    rng = np.random.default_rng(0)
    f = random_mean_zero_field(lattice32, rng)
    back = SpectralField.from_physical(lattice32, f.physical())
    assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-13


def test_random_field_is_real_and_mean_zero(lattice32):
    rng = np.random.default_rng(1)
    f = random_mean_zero_field(lattice32, rng)
    assert f.hermitian_defect() < 1e-14
    assert f.mean_coefficient() == 0
    f.physical_real()  # must not raise


def test_mismatched_lattice_rejected(lattice32):
    other = FrequencyLattice(m=64, h_xi=0.25)
    with pytest.raises(ValueError, match="incompatible lattices"):
        SpectralField.zeros(lattice32) + SpectralField.zeros(other)


# -- multipliers -------------------------------------------------------------


def test_inverse_laplacian_per_coefficient(lattice32):
    rng = np.random.default_rng(2)
    f = random_mean_zero_field(lattice32, rng)
    got = inverse_laplacian(f).coeffs
    rsq = lattice32.radius_sq
    want = np.divide(f.coeffs, rsq, out=np.zeros_like(f.coeffs), where=rsq > 0)
    scale = np.max(np.abs(want))
    assert np.max(np.abs(got - want)) <= 1e-13 * scale


def test_neg_laplacian_inverts(lattice32):
    rng = np.random.default_rng(3)
    f = random_mean_zero_field(lattice32, rng)
    back = neg_laplacian(inverse_laplacian(f))
    assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-12


def test_velocity_is_divergence_free(lattice32):
    rng = np.random.default_rng(4)
    theta = random_mean_zero_field(lattice32, rng)
    div = divergence(riesz_velocity(theta))
    assert np.max(np.abs(div.coeffs)) < 1e-13


def test_velocity_of_cosine():
    # theta = cos(x1) gives u = (0, -sin(x1)): perp gradient of the
    # half-wave inverse square root is just a quarter-turn here
    lat = FrequencyLattice(m=32, h_xi=0.25)
    theta = SpectralField.cosine(lat, (4, 0))
    u = riesz_velocity(theta)
    x1, _ = lat.physical_coordinates()
    assert np.max(np.abs(u.component(0).physical_real())) < 1e-13
    want = -np.sin(x1)
    assert np.max(np.abs(u.component(1).physical_real() - want)) < 1e-12


# -- dealiased product -------------------------------------------------------


@pytest.mark.parametrize("m,seed", [(16, 0), (32, 1), (64, 2)])
def test_multiply_matches_direct_convolution(m, seed):
    lat = FrequencyLattice(m=m, h_xi=0.25)
    rng = np.random.default_rng(seed)
    f = random_mean_zero_field(lat, rng, decay=1.0)
    g = random_mean_zero_field(lat, rng, decay=1.0)
    got = multiply(f, g).coeffs
    want = direct_convolution(f, g)
    scale = np.max(np.abs(want))
    assert np.max(np.abs(got - want)) <= 1e-12 * scale


def test_multiply_single_modes():
    lat = FrequencyLattice(m=16, h_xi=0.25)
    f = SpectralField.from_modes(lat, {(1, 2): 1.0}, hermitian=False)
    g = SpectralField.from_modes(lat, {(3, -1): 1.0}, hermitian=False)
    out = multiply(f, g).coeffs
    assert out[4, 1] == pytest.approx(1.0, abs=1e-14)
    masked = out.copy()
    masked[4, 1] = 0.0
    assert np.max(np.abs(masked)) < 1e-14


def test_multiply_retains_mean(lattice32):
    rng = np.random.default_rng(5)
    f = random_mean_zero_field(lattice32, rng)
    out = multiply(f, f)
    # the product of a real field with itself has mass at frequency zero
    assert abs(out.mean_coefficient()) > 0


def test_multiply_rejects_small_padding(field_pair):
    f, g = field_pair
    with pytest.raises(ValueError, match="pad_factor"):
        multiply(f, g, pad_factor=1)


def test_multiply_scalar_vector(lattice32):
    rng = np.random.default_rng(6)
    theta = random_mean_zero_field(lattice32, rng)
    u = riesz_velocity(theta)
    prod = multiply(theta, u)
    assert prod.rank == 1
    for i in (0, 1):
        want = multiply(theta, u.component(i)).coeffs
        assert np.max(np.abs(prod.component(i).coeffs - want)) == 0.0


# -- dyadic rescaling --------------------------------------------------------


def test_rescale_roundtrip_is_identity(lattice128, partition128):
    from sqglab.sampling import single_shell_field

    rng = np.random.default_rng(7)
    f = single_shell_field(lattice128, partition128, 1, rng)
    back = dyadic_rescale(dyadic_rescale(f, 2), -2)
    assert np.max(np.abs(back.coeffs - f.coeffs)) == 0.0


def test_rescale_rejects_off_sublattice(lattice32):
    f = SpectralField.from_modes(lattice32, {(3, 0): 1.0})
    with pytest.raises(ValueError, match="off-lattice"):
        dyadic_rescale(f, -1)


def test_rescale_rejects_box_overflow(lattice32):
    f = SpectralField.from_modes(lattice32, {(9, 0): 1.0})
    with pytest.raises(ValueError, match="overflows"):
        dyadic_rescale(f, 1)


def test_rescale_moves_modes_with_amplitude():
    lat = FrequencyLattice(m=64, h_xi=0.25)
    f = SpectralField.from_modes(lat, {(2, -1): 0.5})
    g = dyadic_rescale(f, 2, amplitude_power=3)
    assert g.coeffs[8, (-4) % 64] == pytest.approx(0.5 * 64.0)
    assert g.nonzero_modes() == 2


# -- snapshots ---------------------------------------------------------------


def test_snapshot_roundtrip(tmp_path, lattice32):
    rng = np.random.default_rng(8)
    f = random_mean_zero_field(lattice32, rng)
    path = str(tmp_path / "field.npz")
    save_field(f, path)
    g = load_field(path)
    assert g.lattice == f.lattice
    assert np.array_equal(g.coeffs, f.coeffs)
