"""Dyadic frequency decomposition, Besov norms, and probe bumps.

The ring system is the classical one: a radial profile ``phi0`` supported in
``{1/2 <= |xi| <= 2}``, equal to 1 on ``{7/8 <= |xi| <= 5/4}``, with
``phi_j(xi) = phi0(2**-j xi)`` summing to 1 away from the origin.  We build
``phi0(xi) = step(|xi|) - step(2|xi|)`` from a :class:`~sqglab.profiles.SmoothStep`
whose transition interval is configurable (default ``(5/4, 7/4)``); the
telescoping structure makes ring sums collapse to two step evaluations, which is
what the partition-of-unity and window-coverage checks lean on.

Norms follow the homogeneous convention: the zero mode is quotiented out, so
a non-mean-zero input is rejected rather than silently truncated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .profiles import SmoothStep
from .spectral import FrequencyLattice, SpectralField

__all__ = [
    "BesovIndex",
    "DyadicPartition",
    "build_partition",
    "shell_project",
    "lp_norm",
    "shell_profile",
    "besov_norm",
    "ProbeFunction",
    "build_probe",
    "bony_split",
    "WindowCoverageWarning",
]

DIAGONAL = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


class WindowCoverageWarning(UserWarning):
    """Spectral mass sits outside the partition's shell window."""


@dataclass(frozen=True)
class BesovIndex:
    """Index triple (s, p, q) of a homogeneous Besov space."""

    s: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if not (self.p >= 1 and self.q >= 1):
            raise ValueError(f"p, q must be >= 1 (math.inf allowed), got {self}")

    @classmethod
    def data_index(cls, p: float, q: float) -> "BesovIndex":
        """Critical regularity for forcings: s = 2/p - 3."""
        return cls(2.0 / p - 3.0, p, q)

    @classmethod
    def solution_index(cls, p: float, q: float) -> "BesovIndex":
        """Critical regularity for solutions: s = 2/p - 1."""
        return cls(2.0 / p - 1.0, p, q)

    def label(self) -> str:
        return f"B^{self.s:g}_({self.p:g},{self.q:g})"


class DyadicPartition:
    """Lattice realization of the dyadic ring system.

    ``j_min``/``j_max`` span every ring whose (open) support interval meets a
    nonzero lattice radius, so the window covers the whole lattice and the
    telescoped ring sum equals 1 at every nonzero mode.  Narrower windows can
    be requested explicitly; norms then report the dropped mass.
    """

    def __init__(
        self,
        lattice: FrequencyLattice,
        step: SmoothStep,
        j_min: int,
        j_max: int,
    ) -> None:
        if j_max < j_min:
            raise ValueError(f"empty shell window: j_max {j_max} < j_min {j_min}")
        self.lattice = lattice
        self.step = step
        self.j_min = int(j_min)
        self.j_max = int(j_max)
        self._ring_cache: dict[int, np.ndarray] = {}

    @property
    def shells(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def ring_values(self, j: int) -> np.ndarray:
        """Values of ``phi_j`` on the lattice (real array)."""
        cached = self._ring_cache.get(j)
        if cached is not None:
            return cached
        r = self.lattice.radius
        vals = self.step(r * 2.0 ** (-j)) - self.step(r * 2.0 ** (1 - j))
        vals.flags.writeable = False
        if len(self._ring_cache) < 32:
            self._ring_cache[j] = vals
        return vals

    def support_interval(self, j: int) -> tuple[float, float]:
        """Open radial interval on which ``phi_j`` can be nonzero."""
        return (self.step.t0 / 2.0 * 2.0**j, self.step.t1 * 2.0**j)

    def plateau_interval(self, j: int) -> tuple[float, float]:
        """Closed radial interval on which ``phi_j`` equals 1 exactly."""
        return (self.step.t1 / 2.0 * 2.0**j, self.step.t0 * 2.0**j)

    def coverage(self) -> np.ndarray:
        """Telescoped ring sum over the window, evaluated in closed form."""
        r = self.lattice.radius
        return self.step(r * 2.0 ** (-self.j_max)) - self.step(r * 2.0 ** (1 - self.j_min))

    def window_defect(self, field: SpectralField) -> float:
        """Fraction of squared coefficient mass outside the covered window."""
        cov = self.coverage()
        c = field.coeffs
        mass = np.abs(c) ** 2
        if field.rank:
            mass = mass.sum(axis=tuple(range(field.rank)))
        mass = mass.copy()
        mass[0, 0] = 0.0
        total = float(mass.sum())
        if total == 0.0:
            return 0.0
        outside = float(mass[cov < 1.0 - 1e-9].sum())
        return outside / total

    def __repr__(self) -> str:
        return (
            f"DyadicPartition(lattice={self.lattice!r}, "
            f"transition=({self.step.t0}, {self.step.t1}), "
            f"j_min={self.j_min}, j_max={self.j_max})"
        )


def build_partition(
    lattice: FrequencyLattice,
    transition: tuple[float, float] = (1.25, 1.75),
    j_min: int | None = None,
    j_max: int | None = None,
) -> DyadicPartition:
    """Construct the ring system on a lattice.

    The transition interval must sit inside ``[5/4, 7/4]`` so the three ring
    constraints (support in the annulus ``[1/2, 2]``, plateau covering
    ``[7/8, 5/4]``, values in ``[0, 1]``) hold simultaneously.
    """
    t0, t1 = transition
    if not (1.25 <= t0 < t1 <= 1.75):
        raise ValueError(
            f"transition interval {transition} must satisfy 5/4 <= t0 < t1 <= 7/4"
        )
    step = SmoothStep(t0, t1)
    r_lo = lattice.h_xi
    r_hi = lattice.h_xi * (lattice.m / 2.0) * math.sqrt(2.0)
    auto_min = math.ceil(math.log2(r_lo / t1)) if j_min is None else j_min
    # smallest j whose open support (t0/2 * 2^j, t1 * 2^j) reaches r_lo
    while j_min is None and t1 * 2.0**auto_min <= r_lo:
        auto_min += 1
    auto_max = math.floor(math.log2(2.0 * r_hi / t0)) if j_max is None else j_max
    while j_max is None and t0 / 2.0 * 2.0**auto_max >= r_hi:
        auto_max -= 1
    return DyadicPartition(lattice, step, auto_min, auto_max)


def shell_project(field: SpectralField, partition: DyadicPartition, j: int) -> SpectralField:
    """Multiply coefficients by the ring ``phi_j`` (free-space mollifier)."""
    if not (partition.j_min <= j <= partition.j_max):
        raise ValueError(
            f"shell {j} outside the partition window [{partition.j_min}, {partition.j_max}]"
        )
    return SpectralField(field.lattice, field.coeffs * partition.ring_values(j))


def lp_norm(samples: np.ndarray, p: float, cell_area: float) -> float:
    """L^p quadrature norm of physical samples (sup norm for p = inf)."""
    mags = np.abs(samples)
    if math.isinf(p):
        return float(mags.max())
    return float((cell_area * np.sum(mags**p)) ** (1.0 / p))


def _check_mean_zero(field: SpectralField) -> None:
    c0 = abs(field.mean_coefficient())
    scale = float(np.max(np.abs(field.coeffs)))
    if c0 > 1e-12 * max(scale, 1e-300):
        raise ValueError(
            f"input is not mean-zero (|c(0)| = {c0:.3e}); homogeneous norms "
            "quotient out constants, remove the mean first"
        )


def shell_profile(
    field: SpectralField,
    s: float,
    p: float,
    partition: DyadicPartition,
) -> list[tuple[int, float]]:
    """Per-shell weighted norms ``(j, 2**(s j) * ||phi_j * f||_p)``.

    Zero shells are reported as exact zeros without a transform.
    """
    if field.rank != 0:
        raise ValueError("shell profiles are defined for scalar fields")
    _check_mean_zero(field)
    out: list[tuple[int, float]] = []
    area = field.lattice.quadrature_weight
    for j in partition.shells:
        proj = field.coeffs * partition.ring_values(j)
        if not proj.any():
            out.append((j, 0.0))
            continue
        samples = SpectralField(field.lattice, proj).physical()
        out.append((j, 2.0 ** (s * j) * lp_norm(samples, p, area)))
    return out


def _lq_aggregate(entries: list[float], q: float) -> float:
    vals = [e for e in entries]
    if math.isinf(q):
        return max(vals) if vals else 0.0
    # strongly graded sums: accumulate ascending in extended precision
    powered = sorted(v**q for v in vals)
    return math.fsum(powered) ** (1.0 / q)


def besov_norm(
    field: SpectralField,
    index: BesovIndex,
    partition: DyadicPartition,
) -> float:
    """Homogeneous Besov norm by shellwise L^p quadrature and an l^q sum.

    Mass outside the partition window (possible only for explicitly narrowed
    windows) triggers :class:`WindowCoverageWarning` rather than silent
    truncation.
    """
    defect = partition.window_defect(field)
    if defect > 1e-12:
        warnings.warn(
            f"{defect:.2e} of the squared spectral mass lies outside the "
            f"shell window [{partition.j_min}, {partition.j_max}]; the norm "
            "only sees the covered part",
            WindowCoverageWarning,
            stacklevel=2,
        )
    profile = shell_profile(field, index.s, index.p, partition)
    return _lq_aggregate([v for _, v in profile], index.q)


# ---------------------------------------------------------------------------
# Probe bumps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeFunction:
    """Small bump at ``2**j * a`` that the ring ``phi_j`` reproduces.

    ``gap`` controls the radius ``~2**(j-gap)``; at least 3 keeps the support
    inside the plateau of shell ``j``, which is what makes the probe satisfy
    ``psi_j = phi_j * psi_j`` identically.
    """

    lattice: FrequencyLattice
    j: int
    gap: int = 3
    direction: tuple[float, float] = DIAGONAL
    t0: float = 1.25
    t1: float = 1.75

    def __post_init__(self) -> None:
        if self.gap < 3:
            raise ValueError(
                f"probe gap {self.gap} < 3 cannot keep the bump inside the "
                "ring plateau"
            )
        norm = math.hypot(*self.direction)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"direction must be a unit vector, |a| = {norm}")

    @property
    def center(self) -> tuple[float, float]:
        scale = 2.0**self.j
        return (scale * self.direction[0], scale * self.direction[1])

    @property
    def radius(self) -> float:
        """Radius outside of which the symbol vanishes."""
        return self.t1 * 2.0 ** (self.j - self.gap - 1)

    def _offset_radius(self, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        cx, cy = self.center
        return np.hypot(xi1 - cx, xi2 - cy)

    def symbol(self, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        """Closed-form symbol: the step profile at the rescaled offset."""
        step = SmoothStep(self.t0, self.t1)
        return step(self._offset_radius(xi1, xi2) * 2.0 ** (self.gap + 1 - self.j))

    def symbol_from_rings(self, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        """Definitional symbol: 1 minus the ring sum from shell j-gap up.

        The tail is summed until the rings vanish on the given points, so
        this is the literal construction rather than its closed form.
        """
        step = SmoothStep(self.t0, self.t1)
        rho = self._offset_radius(xi1, xi2)
        r_top = float(np.max(rho))
        k_top = self.j - self.gap
        while self.t0 / 2.0 * 2.0**k_top < r_top:
            k_top += 1
        total = np.zeros_like(rho)
        for k in range(self.j - self.gap, k_top + 1):
            total = total + (step(rho * 2.0 ** (-k)) - step(rho * 2.0 ** (1 - k)))
        return 1.0 - total

    def values(self) -> np.ndarray:
        lat = self.lattice
        return self.symbol(lat.xi1, lat.xi2)

    def project(self, field: SpectralField) -> SpectralField:
        """Convolution with the probe = coefficientwise multiplication."""
        return SpectralField(field.lattice, field.coeffs * self.values())


def build_probe(
    lattice: FrequencyLattice,
    j: int,
    gap: int = 3,
    direction: tuple[float, float] = DIAGONAL,
    transition: tuple[float, float] = (1.25, 1.75),
) -> ProbeFunction:
    """Build a probe, rejecting shells the lattice cannot see.

    An empty support means the bump of radius ``~2**(j-gap)`` around
    ``2**j * a`` misses every lattice point; a finer ``h_xi`` or a smaller
    gap (not below 3) fixes that.
    """
    probe = ProbeFunction(
        lattice, j, gap=gap, direction=direction, t0=transition[0], t1=transition[1]
    )
    if not probe.values().any():
        raise ValueError(
            f"probe at shell {j} (gap {gap}) has empty support on {lattice!r}: "
            f"no lattice point within {probe.radius:.3e} of {probe.center}; "
            "use a finer h_xi or a smaller gap"
        )
    return probe


# ---------------------------------------------------------------------------
# Paraproduct (Bony) splitting
# ---------------------------------------------------------------------------


def bony_split(
    f: SpectralField,
    g: SpectralField,
    partition: DyadicPartition,
    bilinear_op,
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Split ``B[f, g]`` into low-high, high-low and diagonal parts.

    ``B1`` collects shell pairs ``(k, l)`` of (f, g) with ``k <= l - 3``,
    ``B2`` the mirrored pairs, ``B3`` the near-diagonal band ``|k - l| <= 2``.
    ``bilinear_op(a, b)`` must be bilinear; the low-pass sums are accumulated
    so the cost stays linear in the number of shells.
    """
    js = list(partition.shells)
    f_shells = {j: shell_project(f, partition, j) for j in js}
    g_shells = {j: shell_project(g, partition, j) for j in js}
    f_live = {j for j, fld in f_shells.items() if fld.coeffs.any()}
    g_live = {j for j, fld in g_shells.items() if fld.coeffs.any()}

    def lowhigh(a_shells, a_live, b_shells, b_live):
        total = SpectralField.zeros(f.lattice)
        running = SpectralField.zeros(f.lattice)
        accumulated_to = js[0] - 1
        for l in js:
            if l not in b_live:
                continue
            while accumulated_to < l - 3:
                accumulated_to += 1
                if accumulated_to in a_live:
                    running = running + a_shells[accumulated_to]
            if running.coeffs.any():
                total = total + bilinear_op(running, b_shells[l])
        return total

    b1 = lowhigh(f_shells, f_live, g_shells, g_live)
    b2 = lowhigh(g_shells, g_live, f_shells, f_live)

    b3 = SpectralField.zeros(f.lattice)
    for k in js:
        if k not in f_live:
            continue
        band = SpectralField.zeros(f.lattice)
        have = False
        for l in range(k - 2, k + 3):
            if l in g_live:
                band = band + g_shells[l]
                have = True
        if have:
            b3 = b3 + bilinear_op(f_shells[k], band)
    return b1, b2, b3
