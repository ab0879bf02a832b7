"""Three equivalent realizations of the quadratic nonlinearity.

The stationary model couples the scalar to its Riesz velocity through
u . grad(theta); inverting the Laplacian turns that into a bounded
quadratic map.  Three computational routes are kept side by side:

* ``bilinear_quadrature``: the literal frequency quadrature, composing
  the coupling tensor with a double divergence.  O(m**4), small
  lattices only; this is the definitional oracle.
* ``bilinear_block``: the symmetrized single-divergence form built from
  dealiased products.  Works on any lattice and is the workhorse.
* ``quadratic_diagonal``: the single-divergence form for equal
  arguments, one product cheaper than the block form.

The three agree to rounding for mean-zero inputs; the test suite and
the identity experiment hold them together.  Phase conventions (who
carries the factors of i) are pinned by that agreement, not by
bookkeeping: the coupling tensor uses the plain real symbol, which
makes it anti-Hermitian for real inputs, and the double-divergence
contraction carries the compensating factor of i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .spectral import (
    FrequencyLattice,
    Multiplier,
    SpectralField,
    apply_symbol,
    divergence,
    inverse_laplacian,
    multiply,
    riesz_velocity,
)

__all__ = [
    "QUADRATURE_SIZE_LIMIT",
    "BilinearForm",
    "coupling_tensor",
    "bilinear_quadrature",
    "bilinear_block",
    "quadratic_diagonal",
]

# The quadrature costs O(m**4); beyond this edge size it stops being a
# practical oracle and the fast forms take over.
QUADRATURE_SIZE_LIMIT = 64


def _check_quadrature_size(lattice: FrequencyLattice) -> None:
    if lattice.m > QUADRATURE_SIZE_LIMIT:
        raise ValueError(
            f"direct quadrature is O(m**4) and is limited to m <= "
            f"{QUADRATURE_SIZE_LIMIT}; got m = {lattice.m}; use the block or "
            "diagonal fast form instead"
        )


def _check_scalar_pair(f: SpectralField, g: SpectralField) -> FrequencyLattice:
    if f.rank != 0 or g.rank != 0:
        raise ValueError("the bilinear form takes scalar fields")
    if f.lattice != g.lattice:
        raise ValueError("operands live on different lattices")
    return f.lattice


def coupling_tensor(scalar_part: SpectralField, vector_part: SpectralField) -> SpectralField:
    """Direct frequency quadrature of the coupling tensor.

    Entry (k, l) at output frequency xi is the lattice sum over eta of

        (xi - 2 eta)_k / (2 (|eta| + |xi - eta|)) * a_hat(xi - eta) * v_hat_l(eta)

    with the eta = 0 and xi - eta = 0 terms omitted (mean-zero
    convention) and eta restricted so both factors sit inside the
    frequency box.  Output frequencies on the unpaired k = -m/2 edge are
    dropped, matching the retained box of ``multiply``.  For real inputs
    the output is anti-Hermitian: i times it is the physically real
    tensor.
    """
    lat = scalar_part.lattice
    _check_quadrature_size(lat)
    if scalar_part.rank != 0 or vector_part.rank != 1:
        raise ValueError("expected a scalar first argument and a 2-vector second")
    if vector_part.lattice != lat:
        raise ValueError("operands live on different lattices")

    m = lat.m
    h = m // 2
    # centered layout: index i holds wavenumber i - h
    a = np.fft.fftshift(scalar_part.coeffs).copy()
    v = np.fft.fftshift(vector_part.coeffs, axes=(-2, -1)).copy()
    a[h, h] = 0.0
    v[:, h, h] = 0.0

    wave = (np.arange(m) - h) * lat.h_xi
    eta1 = np.broadcast_to(wave[:, None], (m, m))
    eta2 = np.broadcast_to(wave[None, :], (m, m))
    r_eta = np.hypot(eta1, eta2)

    # 3m-wide zero frame so the xi - eta lookup is a reversed slice
    big_a = np.zeros((3 * m, 3 * m), dtype=np.complex128)
    big_a[m : 2 * m, m : 2 * m] = a
    big_r = np.zeros((3 * m, 3 * m))
    big_r[m : 2 * m, m : 2 * m] = r_eta

    out = np.zeros((2, 2, m, m), dtype=np.complex128)
    # centered index 0 is the unpaired k = -m/2 edge, excluded from the output
    for i1 in range(1, m):
        xi1 = wave[i1]
        s1 = i1 + h + 1
        for i2 in range(1, m):
            xi2 = wave[i2]
            s2 = i2 + h + 1
            a_slice = big_a[s1 : s1 + m, s2 : s2 + m][::-1, ::-1]
            r_slice = big_r[s1 : s1 + m, s2 : s2 + m][::-1, ::-1]
            sigma = r_eta + r_slice
            inv = np.where(sigma > 0.0, 0.5, 0.0) / np.where(sigma > 0.0, sigma, 1.0)
            sym = np.stack(((xi1 - 2.0 * eta1) * inv, (xi2 - 2.0 * eta2) * inv))
            prod = a_slice * v
            out[:, :, i1, i2] = np.einsum("kij,lij->kl", sym, prod)

    return SpectralField(lat, np.fft.ifftshift(out, axes=(-2, -1)))


def bilinear_quadrature(f: SpectralField, g: SpectralField) -> SpectralField:
    """Definitional form: coupling tensor contracted by a double divergence.

    The first argument enters through its half-order lift, the second
    through its Riesz velocity; the contraction phase is fixed so the
    result agrees with the divergence forms (which also makes it
    symmetric in the arguments, mean-zero, and real for real inputs).
    """
    lat = _check_scalar_pair(f, g)
    tensor = coupling_tensor(apply_symbol(f, Multiplier.power(-1.0)), riesz_velocity(g))
    t = tensor.coeffs
    contracted = (
        lat.xi1 * lat.xi1 * t[0, 0]
        + lat.xi1 * lat.xi2 * (t[0, 1] + t[1, 0])
        + lat.xi2 * lat.xi2 * t[1, 1]
    )
    weight = np.zeros((m := lat.m, m))
    np.divide(1.0, lat.radius_sq, out=weight, where=lat.radius_sq > 0.0)
    return SpectralField(lat, 1j * weight * contracted)


def bilinear_block(f: SpectralField, g: SpectralField) -> SpectralField:
    """Fast symmetrized single-divergence form, any lattice size.

    Computes (1/2) (-Delta)^{-1} div[f (grad^perp Lambda^{-1} g)
    + (grad^perp Lambda^{-1} f) g].  The underlying symbol identity does
    not use spectral localization, so this is a general fast path and
    not just a per-block one; the suite verifies that numerically
    against the quadrature.
    """
    _check_scalar_pair(f, g)
    flux = multiply(f, riesz_velocity(g)) + multiply(g, riesz_velocity(f))
    return inverse_laplacian(divergence(0.5 * flux))


def quadratic_diagonal(theta: SpectralField) -> SpectralField:
    """(-Delta)^{-1} div(theta u) with u the Riesz velocity of theta."""
    if theta.rank != 0:
        raise ValueError("the bilinear form takes scalar fields")
    flux = multiply(theta, riesz_velocity(theta))
    return inverse_laplacian(divergence(flux))


@dataclass(frozen=True)
class BilinearForm:
    """Pins which realization of the nonlinearity an experiment uses."""

    lattice: FrequencyLattice
    variant: str = "block-fast"

    VARIANTS: ClassVar[tuple[str, ...]] = ("quadrature", "block-fast", "diagonal-fast")

    def __post_init__(self) -> None:
        if self.variant not in self.VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; pick one of {self.VARIANTS}")
        if self.variant == "quadrature":
            _check_quadrature_size(self.lattice)

    def apply(self, f: SpectralField, g: SpectralField | None = None) -> SpectralField:
        if f.lattice != self.lattice:
            raise ValueError("field lattice does not match the form's lattice")
        if self.variant == "diagonal-fast":
            if g is not None and g is not f:
                raise ValueError("the diagonal variant evaluates B[theta, theta] only")
            return quadratic_diagonal(f)
        if g is None:
            g = f
        if self.variant == "quadrature":
            return bilinear_quadrature(f, g)
        return bilinear_block(f, g)
