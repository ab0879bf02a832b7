"""Frequency lattice, spectral fields, and Fourier-multiplier plumbing.

Everything downstream works on a square lattice of frequencies
``xi = h_xi * (k1, k2)`` with integer indices ``k_i in [-m/2, m/2)``.  The
physical box is the torus of side ``L = 2*pi/h_xi`` sampled at ``m`` points
per axis, so synthesis/analysis are plain FFTs with the "forward"
normalization: a coefficient is the amplitude of ``exp(i x.xi)`` and Parseval
holds with the quadrature weight ``(L/m)**2`` per physical sample.

Fields are immutable; every operation returns a new field.  Coefficient
arrays are stored in FFT index order (0, 1, ..., m/2-1, -m/2, ..., -1 per
axis), which is also the layout of the on-disk snapshot format (see
``save_field``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

__all__ = [
    "FrequencyLattice",
    "SpectralField",
    "Multiplier",
    "apply_symbol",
    "inverse_laplacian",
    "neg_laplacian",
    "riesz_velocity",
    "divergence",
    "dyadic_rescale",
    "multiply",
    "strip_unpaired_edge",
    "save_field",
    "load_field",
    "set_fft_workers",
]

_FFT_WORKERS = -1


def set_fft_workers(n: int) -> None:
    """Set the worker count passed to every scipy.fft call (-1 = all cores)."""
    global _FFT_WORKERS
    _FFT_WORKERS = int(n)


def _fft2(a: np.ndarray, overwrite: bool = False) -> np.ndarray:
    return scipy.fft.fft2(a, norm="forward", workers=_FFT_WORKERS, overwrite_x=overwrite)


def _ifft2(a: np.ndarray, overwrite: bool = False) -> np.ndarray:
    return scipy.fft.ifft2(a, norm="forward", workers=_FFT_WORKERS, overwrite_x=overwrite)


@dataclass(frozen=True)
class FrequencyLattice:
    """Square frequency lattice: ``m`` modes per axis, spacing ``h_xi``.

    Parameters
    ----------
    m:
        Modes per axis.  Power of two, at least 8, so dyadic rescaling and
        padded transforms stay exact.
    h_xi:
        Frequency spacing (inverse length).  The physical box has side
        ``2*pi/h_xi``.
    """

    m: int = 1024
    h_xi: float = 0.125

    def __post_init__(self) -> None:
        if self.m < 8 or (self.m & (self.m - 1)) != 0:
            raise ValueError(f"m must be a power of two >= 8, got {self.m}")
        if not (self.h_xi > 0):
            raise ValueError(f"h_xi must be positive, got {self.h_xi}")

    @property
    def box_length(self) -> float:
        return 2.0 * np.pi / self.h_xi

    @property
    def xi_max(self) -> float:
        """Nyquist frequency ``h_xi * m / 2`` (per axis)."""
        return self.h_xi * self.m / 2.0

    @property
    def dx(self) -> float:
        return self.box_length / self.m

    @property
    def quadrature_weight(self) -> float:
        """Physical cell area ``(L/m)**2`` used by all L^p sums."""
        return self.dx * self.dx

    @cached_property
    def k1(self) -> np.ndarray:
        """Integer index along axis 0, FFT order, broadcast to (m, m)."""
        k = np.fft.fftfreq(self.m, d=1.0 / self.m).astype(np.int64)
        return np.broadcast_to(k[:, None], (self.m, self.m))

    @cached_property
    def k2(self) -> np.ndarray:
        k = np.fft.fftfreq(self.m, d=1.0 / self.m).astype(np.int64)
        return np.broadcast_to(k[None, :], (self.m, self.m))

    @cached_property
    def xi1(self) -> np.ndarray:
        return self.h_xi * self.k1

    @cached_property
    def xi2(self) -> np.ndarray:
        return self.h_xi * self.k2

    @cached_property
    def radius(self) -> np.ndarray:
        """|xi| on the lattice."""
        return np.hypot(self.xi1, self.xi2)

    @cached_property
    def radius_sq(self) -> np.ndarray:
        return self.xi1 * self.xi1 + self.xi2 * self.xi2

    def physical_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.dx * np.arange(self.m)
        return np.broadcast_to(x[:, None], (self.m, self.m)), np.broadcast_to(
            x[None, :], (self.m, self.m)
        )

    def __repr__(self) -> str:  # keep reports compact
        return f"FrequencyLattice(m={self.m}, h_xi={self.h_xi})"


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=np.complex128)
    out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SpectralField:
    """Immutable set of Fourier coefficients on a :class:`FrequencyLattice`.

    ``coeffs`` has shape ``(m, m)`` for scalars, ``(2, m, m)`` for vector
    fields and ``(2, 2, m, m)`` for rank-2 tensors, always in FFT index
    order.  Real-valued physical fields correspond to Hermitian-symmetric
    coefficients; nothing enforces that on construction, but
    :meth:`hermitian_defect` measures it and the operator layer preserves it.
    """

    lattice: FrequencyLattice
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = _as_readonly(self.coeffs)
        m = self.lattice.m
        if c.shape not in ((m, m), (2, m, m), (2, 2, m, m)):
            raise ValueError(
                f"coefficient shape {c.shape} does not match lattice m={m} "
                "(expected (m,m), (2,m,m) or (2,2,m,m))"
            )
        object.__setattr__(self, "coeffs", c)

    # -- construction ------------------------------------------------------

    @classmethod
    def zeros(cls, lattice: FrequencyLattice, rank: int = 0) -> "SpectralField":
        shape = (2,) * rank + (lattice.m, lattice.m)
        return cls(lattice, np.zeros(shape, dtype=np.complex128))

    @classmethod
    def from_physical(cls, lattice: FrequencyLattice, samples: np.ndarray) -> "SpectralField":
        samples = np.asarray(samples)
        return cls(lattice, _fft2(samples.astype(np.complex128)))

    @classmethod
    def from_modes(
        cls,
        lattice: FrequencyLattice,
        modes: dict[tuple[int, int], complex],
        hermitian: bool = True,
    ) -> "SpectralField":
        """Field with prescribed coefficients at integer lattice indices.

        With ``hermitian=True`` the conjugate coefficient is installed at
        ``-k`` as well, so real amplitudes build ``2*amp*cos(x.xi)``.
        """
        c = np.zeros((lattice.m, lattice.m), dtype=np.complex128)
        half = lattice.m // 2
        for (a, b), amp in modes.items():
            if not (-half < a < half and -half < b < half):
                raise ValueError(
                    f"mode {(a, b)} outside the symmetric box (|k| <= {half - 1}); "
                    f"the k = -{half} edge has no conjugate partner on this lattice"
                )
            c[a % lattice.m, b % lattice.m] += amp
            if hermitian:
                c[(-a) % lattice.m, (-b) % lattice.m] += np.conj(amp)
        return cls(lattice, c)

    @classmethod
    def cosine(
        cls, lattice: FrequencyLattice, k: tuple[int, int], amplitude: float = 1.0
    ) -> "SpectralField":
        """``amplitude * cos(h_xi * k . x)`` as a spectral field."""
        return cls.from_modes(lattice, {tuple(k): amplitude / 2.0})

    # -- basic queries -----------------------------------------------------

    @property
    def rank(self) -> int:
        return self.coeffs.ndim - 2

    def physical(self) -> np.ndarray:
        """Physical samples on the ``m x m`` grid (complex; real fields have
        vanishing imaginary part up to rounding)."""
        return _ifft2(self.coeffs)

    def physical_real(self, tol: float = 1e-10) -> np.ndarray:
        p = self.physical()
        scale = np.max(np.abs(p)) or 1.0
        imag = np.max(np.abs(p.imag))
        if imag > tol * scale:
            raise ValueError(f"field is not real: max imag {imag:.3e} vs scale {scale:.3e}")
        return p.real

    def hermitian_defect(self) -> float:
        """Max |c(-xi) - conj(c(xi))| over the lattice."""
        c = self.coeffs
        mirrored = c
        for ax in (-2, -1):
            mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
        return float(np.max(np.abs(mirrored - np.conj(c))))

    def mean_coefficient(self) -> complex:
        idx = (0,) * self.rank + (0, 0)
        return complex(self.coeffs[idx])

    def nonzero_modes(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    # -- algebra -----------------------------------------------------------

    def _check_compatible(self, other: "SpectralField") -> None:
        if other.lattice != self.lattice:
            raise ValueError(
                f"incompatible lattices: {self.lattice} vs {other.lattice}"
            )
        if other.rank != self.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.lattice, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.lattice, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.lattice, -self.coeffs)

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.lattice, coeffs)

    def component(self, *idx: int) -> "SpectralField":
        if len(idx) != self.rank:
            raise ValueError(f"need {self.rank} component indices, got {len(idx)}")
        return SpectralField(self.lattice, self.coeffs[idx]) if idx else self


# ---------------------------------------------------------------------------
# Fourier multipliers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Multiplier:
    """Symbol of a Fourier multiplier on the lattice.

    Kinds: ``power`` is ``|xi|**alpha``, ``component`` is ``i*xi_axis``,
    ``perp_gradient`` is the vector symbol ``i*(-xi_2, xi_1)`` (raises the
    rank by one), ``product`` composes factors.  Homogeneous symbols are
    singular at the origin; the value at ``xi = 0`` is defined to be zero,
    which implements the mean-zero (quotient by constants) convention.
    """

    kind: str
    alpha: float = 0.0
    axis: int = 0
    factors: tuple["Multiplier", ...] = ()

    @classmethod
    def power(cls, alpha: float) -> "Multiplier":
        return cls(kind="power", alpha=float(alpha))

    @classmethod
    def component(cls, axis: int) -> "Multiplier":
        if axis not in (0, 1):
            raise ValueError("axis must be 0 or 1")
        return cls(kind="component", axis=axis)

    @classmethod
    def perp_gradient(cls) -> "Multiplier":
        return cls(kind="perp_gradient")

    @classmethod
    def product(cls, *factors: "Multiplier") -> "Multiplier":
        vec = sum(f.raises_rank for f in factors)
        if vec > 1:
            raise ValueError("at most one vector-valued factor in a product")
        return cls(kind="product", factors=tuple(factors))

    @property
    def raises_rank(self) -> bool:
        if self.kind == "perp_gradient":
            return True
        if self.kind == "product":
            return any(f.raises_rank for f in self.factors)
        return False

    def values(self, lattice: FrequencyLattice) -> np.ndarray:
        """Symbol values on the lattice; shape (m, m) or (2, m, m)."""
        if self.kind == "power":
            r = lattice.radius
            with np.errstate(divide="ignore", invalid="ignore"):
                v = np.where(r > 0, r**self.alpha, 0.0)
            return v.astype(np.complex128)
        if self.kind == "component":
            xi = lattice.xi1 if self.axis == 0 else lattice.xi2
            return 1j * xi.astype(np.complex128)
        if self.kind == "perp_gradient":
            return np.stack([-1j * lattice.xi2, 1j * lattice.xi1]).astype(np.complex128)
        if self.kind == "product":
            out: np.ndarray | None = None
            for f in self.factors:
                v = f.values(lattice)
                out = v if out is None else out * v
            assert out is not None
            return out
        raise ValueError(f"unknown multiplier kind {self.kind!r}")


def apply_symbol(field: SpectralField, multiplier: Multiplier) -> SpectralField:
    """Apply a Fourier multiplier; checks the output stayed finite.

    A non-finite amplitude means the symbol blew up on this lattice
    (typically a strongly negative power against near-zero frequencies).
    """
    v = multiplier.values(field.lattice)
    if multiplier.raises_rank:
        if field.rank != 0:
            raise ValueError("vector symbols apply to scalar fields only")
        out = v * field.coeffs[None, :, :]
    else:
        out = v * field.coeffs
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(
            f"multiplier {multiplier.kind} produced non-finite amplitudes "
            f"(alpha={multiplier.alpha}); lattice {field.lattice} cannot "
            "resolve this symbol"
        )
    return SpectralField(field.lattice, out)


def inverse_laplacian(field: SpectralField) -> SpectralField:
    """Coefficientwise division by |xi|^2, zero mode annihilated."""
    return apply_symbol(field, Multiplier.power(-2.0))


def neg_laplacian(field: SpectralField) -> SpectralField:
    return apply_symbol(field, Multiplier.power(2.0))


def riesz_velocity(theta: SpectralField) -> SpectralField:
    """Divergence-free velocity ``u = perp-grad (-Delta)^{-1/2} theta``.

    Mode for mode an isometry: |u_hat(xi)| = |theta_hat(xi)| for xi != 0.
    """
    return apply_symbol(
        theta, Multiplier.product(Multiplier.perp_gradient(), Multiplier.power(-1.0))
    )


def divergence(vec: SpectralField) -> SpectralField:
    if vec.rank != 1:
        raise ValueError("divergence needs a vector field")
    lat = vec.lattice
    out = 1j * lat.xi1 * vec.coeffs[0] + 1j * lat.xi2 * vec.coeffs[1]
    return SpectralField(lat, out)


# ---------------------------------------------------------------------------
# Dyadic rescaling
# ---------------------------------------------------------------------------


def dyadic_rescale(
    field: SpectralField, exponent: int, amplitude_power: int = 1
) -> SpectralField:
    """Relocate the spectrum ``xi -> 2**exponent * xi`` with amplitude
    ``2**(exponent * amplitude_power)``.

    ``amplitude_power=1`` is the solution-side scaling (``lam*f(lam x)``),
    ``amplitude_power=3`` the forcing-side one.  Downscaling requires every
    active mode to sit on the coarser sublattice; anything else would land
    off-lattice and raises.
    """
    if field.rank != 0:
        raise ValueError("dyadic_rescale is defined for scalar fields")
    lam_pow = int(exponent)
    if lam_pow == 0:
        return SpectralField(field.lattice, field.coeffs)
    m = field.lattice.m
    half = m // 2
    c = field.coeffs
    idx1, idx2 = np.nonzero(c)
    out = np.zeros_like(c)
    if idx1.size == 0:
        return SpectralField(field.lattice, out)
    k1 = np.where(idx1 < half, idx1, idx1 - m).astype(np.int64)
    k2 = np.where(idx2 < half, idx2, idx2 - m).astype(np.int64)
    if lam_pow >= 0:
        n1, n2 = k1 << lam_pow, k2 << lam_pow
    else:
        q = 1 << (-lam_pow)
        if np.any(k1 % q) or np.any(k2 % q):
            raise ValueError(
                f"spectrum does not fit the 2**{-lam_pow}-coarser sublattice; "
                "active modes would land off-lattice under this rescale"
            )
        n1, n2 = k1 // q, k2 // q
    if np.any(np.abs(n1) > half - 1) or np.any(np.abs(n2) > half - 1):
        raise ValueError(
            f"rescaled spectrum overflows the symmetric box (m={m}); "
            f"max index {max(np.max(np.abs(n1)), np.max(np.abs(n2)))} vs {half - 1}"
        )
    amp = 2.0 ** (lam_pow * amplitude_power)
    out[n1 % m, n2 % m] = amp * c[idx1, idx2]
    return SpectralField(field.lattice, out)


# ---------------------------------------------------------------------------
# Dealiased products
# ---------------------------------------------------------------------------


def _pad_coeffs(c: np.ndarray, m: int, p: int) -> np.ndarray:
    """Embed FFT-ordered (m, m) coefficients into a (p, p) FFT-ordered array."""
    half = m // 2
    out = np.zeros(c.shape[:-2] + (p, p), dtype=np.complex128)
    # copy the four FFT-order corner blocks
    out[..., :half, :half] = c[..., :half, :half]
    out[..., :half, p - half :] = c[..., :half, half:]
    out[..., p - half :, :half] = c[..., half:, :half]
    out[..., p - half :, p - half :] = c[..., half:, half:]
    return out


def _crop_coeffs(c: np.ndarray, m: int) -> np.ndarray:
    half = m // 2
    p = c.shape[-1]
    out = np.empty(c.shape[:-2] + (m, m), dtype=np.complex128)
    out[..., :half, :half] = c[..., :half, :half]
    out[..., :half, half:] = c[..., :half, p - half :]
    out[..., half:, :half] = c[..., p - half :, :half]
    out[..., half:, half:] = c[..., p - half :, p - half :]
    return out


def strip_unpaired_edge(c: np.ndarray) -> np.ndarray:
    """Zero the k = -m/2 row and column in place, returning the array.

    Those frequencies have no conjugate partner inside the box, so energy
    there cannot belong to a real field together with its mirror; product
    operations drop them from their output.
    """
    half = c.shape[-1] // 2
    c[..., half, :] = 0.0
    c[..., :, half] = 0.0
    return c


def multiply(f: SpectralField, g: SpectralField, pad_factor: int = 2) -> SpectralField:
    """Pointwise physical product via zero-padded transforms.

    With ``pad_factor >= 2`` the padded grid holds the full linear
    convolution of the two spectra, so the retained coefficients are the
    exact (plane-truncated) convolution sum: no aliased energy lands on any
    retained mode.  Scalar*scalar and scalar*vector are supported; the zero
    mode of the product is retained.

    The retained box is the symmetric one: the unpaired k = -m/2 edge is
    dropped from the output, so products of real fields stay real.  Inputs
    are expected to keep that edge empty as well (every mode constructor
    and sampler here does); edge energy in an input would break Hermitian
    symmetry at interior output modes, which no cropping can repair.
    """
    if f.lattice != g.lattice:
        raise ValueError(f"incompatible lattices: {f.lattice} vs {g.lattice}")
    if pad_factor < 2:
        raise ValueError("pad_factor must be at least 2 for exact dealiasing")
    if f.rank > g.rank:
        f, g = g, f
    if f.rank != 0:
        raise ValueError("one factor must be scalar")
    m = f.lattice.m
    p = pad_factor * m
    # padded arrays are throwaways, so the transforms may scribble on them
    # and the product happens in place; at large m the peak working set is
    # what decides whether this runs at all
    fp = _ifft2(_pad_coeffs(f.coeffs, m, p), overwrite=True)
    if g.rank == 0:
        gp = _ifft2(_pad_coeffs(g.coeffs, m, p), overwrite=True)
        gp *= fp
        out = _crop_coeffs(_fft2(gp, overwrite=True), m)
    else:
        comps = []
        for idx in np.ndindex(*g.coeffs.shape[:-2]):
            gp = _ifft2(_pad_coeffs(g.coeffs[idx], m, p), overwrite=True)
            gp *= fp
            comps.append(_crop_coeffs(_fft2(gp, overwrite=True), m))
        out = np.stack(comps).reshape(g.coeffs.shape)
    return SpectralField(f.lattice, strip_unpaired_edge(out))


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------

_SNAPSHOT_FORMAT = "sqglab-field-v1"


def save_field(field: SpectralField, path: str) -> None:
    """Write a self-describing snapshot (.npz).

    Layout (stable): ``format`` tag, ``m``, ``h_xi``, ``rank`` and
    ``coeffs`` -- the complex coefficient array in row-major FFT index
    order, exactly as held in memory.
    """
    np.savez(
        path,
        format=np.array(_SNAPSHOT_FORMAT),
        m=np.array(field.lattice.m, dtype=np.int64),
        h_xi=np.array(field.lattice.h_xi, dtype=np.float64),
        rank=np.array(field.rank, dtype=np.int64),
        coeffs=np.ascontiguousarray(field.coeffs),
    )


def load_field(path: str) -> SpectralField:
    with np.load(path) as data:
        tag = str(data["format"])
        if tag != _SNAPSHOT_FORMAT:
            raise ValueError(f"not a field snapshot (format tag {tag!r})")
        lattice = FrequencyLattice(m=int(data["m"]), h_xi=float(data["h_xi"]))
        coeffs = data["coeffs"]
        rank = int(data["rank"])
        if coeffs.ndim - 2 != rank:
            raise ValueError(
                f"snapshot rank field {rank} disagrees with array shape {coeffs.shape}"
            )
    return SpectralField(lattice, coeffs)
