"""Diagnostics for the quadratic response to modulated forcing.

Everything here interrogates the second Picard iterate theta2 =
B[theta1, theta1] of a carrier-band forcing: the three-way split of its
coefficient at a low probe frequency, the low-frequency floor that
witnesses mass appearing far below the forcing band, and the per-shell
inflation profile with its little-ell-q aggregates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .besov import DyadicPartition, _lq_aggregate, build_probe, lp_norm, shell_project
from .forcing import ForceSpec
from .spectral import SpectralField

__all__ = [
    "SplitSample",
    "second_iterate_split",
    "low_frequency_profile",
    "low_frequency_floor",
    "InflationReport",
    "inflation_profile",
]


@dataclass(frozen=True)
class SplitSample:
    """The three-way split of the second iterate's coefficient at one probe.

    ``main`` is the xi1*xi2*eta1**2 term that survives at low frequency,
    ``cross`` the mixed eta1*eta2/eta2**2 term, ``perp`` the term
    proportional to xi dot eta-perp.  Their sum reproduces the full
    bilinear coefficient whenever the input spectrum has no eta1 = 0 mass
    and every interacting pair straddles the two carrier half-planes.
    """

    index: tuple[int, int]
    frequency: tuple[float, float]
    main: complex
    cross: complex
    perp: complex

    @property
    def total(self) -> complex:
        return self.main + self.cross + self.perp


def _aligned_mirror(arr: np.ndarray, a: int, b: int) -> np.ndarray:
    """arr sampled at xi - eta, as an array over centered eta indices.

    Reverse both axes and shift by (a + 1, b + 1) with zero fill; entries
    whose xi - eta falls outside the box are zero, matching the plane
    truncation of the quadrature bilinear form.
    """
    m = arr.shape[-1]
    rev = arr[::-1, ::-1]
    out = np.zeros_like(arr)
    lo1, hi1 = max(0, a + 1), min(m, m + a + 1)
    lo2, hi2 = max(0, b + 1), min(m, m + b + 1)
    out[lo1:hi1, lo2:hi2] = rev[lo1 - (a + 1) : hi1 - (a + 1), lo2 - (b + 1) : hi2 - (b + 1)]
    return out


def second_iterate_split(
    theta1: SpectralField,
    probes: Sequence[tuple[int, int]],
    xi_bound: float = 1.0,
) -> list[SplitSample]:
    """Direct-quadrature split of B[theta1, theta1] at each probe frequency.

    For probe xi the full coefficient is a lattice sum over eta of the
    antisymmetric kernel against g(xi - eta) g(eta), g = theta1-hat / |.|.
    Restricting eta to the half-plane eta1 > 0 (its partner to eta1 < 0)
    and expanding the kernel splits the sum into main + cross + perp; the
    half-plane restriction doubles, which is exact because the kernel is
    even under eta -> xi - eta.

    ``xi_bound`` is the admissible probe radius: 1 for forcing supported
    on a single carrier band, the bottom of the envelope band for
    translated-block forcing.
    """
    lat = theta1.lattice
    m, half = lat.m, lat.m // 2
    if not xi_bound > 0:
        raise ValueError(f"xi_bound must be positive, got {xi_bound}")

    g_raw = np.fft.fftshift(theta1.coeffs)
    r_eta = np.fft.fftshift(lat.radius)
    eta1 = np.fft.fftshift(lat.xi1)
    eta2 = np.fft.fftshift(lat.xi2)
    g = np.divide(g_raw, r_eta, out=np.zeros_like(g_raw), where=r_eta > 0)
    g_pos = np.where(eta1 > 0, g, 0.0)
    g_neg = np.where(eta1 < 0, g, 0.0)

    samples = []
    for a, b in probes:
        if not (-half < a < half and -half < b < half):
            raise ValueError(
                f"probe {(a, b)} outside the lattice symmetric box "
                f"(|k| <= {half - 1})"
            )
        x1, x2 = lat.h_xi * a, lat.h_xi * b
        rho_sq = x1 * x1 + x2 * x2
        if rho_sq == 0.0:
            raise ValueError("probe at frequency zero is not admissible (the split divides by |xi|^2)")
        if math.sqrt(rho_sq) > xi_bound * (1.0 + 1e-12):
            raise ValueError(
                f"probe {(a, b)} at radius {math.sqrt(rho_sq):g} exceeds the "
                f"admissible bound {xi_bound:g}"
            )
        mirror_g = _aligned_mirror(g_neg, a, b)
        mirror_r = _aligned_mirror(r_eta, a, b)
        pair = g_pos * mirror_g
        sigma = r_eta + mirror_r
        kernel = np.divide(pair, sigma, out=np.zeros_like(pair), where=sigma > 0)
        main = (2.0 * x1 * x2 / rho_sq) * complex(np.sum(eta1 * eta1 * kernel))
        cross = (2.0 / rho_sq) * complex(
            np.sum(((x2 * x2 - x1 * x1) * eta1 * eta2 - x1 * x2 * eta2 * eta2) * kernel)
        )
        perp = -complex(np.sum((x2 * eta1 - x1 * eta2) * kernel))
        samples.append(SplitSample((a, b), (x1, x2), main, cross, perp))
    return samples


def low_frequency_profile(
    theta2: SpectralField,
    partition: DyadicPartition,
    j_range: tuple[int, int] | None = None,
) -> list[tuple[int, float]]:
    """Per-shell values 2**(-j) sup |phi_j theta2| over the negative shells.

    The effective witness of the low-frequency floor is usually the top
    shell j = -1; the whole profile is reported so the drift across j is
    visible.
    """
    if j_range is None:
        j_range = (partition.j_min, -1)
    j_lo, j_hi = j_range
    if j_lo > j_hi:
        raise ValueError(f"empty shell range {j_range}")
    if j_lo < partition.j_min:
        raise ValueError(
            f"shell range starts at {j_lo}, below the partition window "
            f"(j_min = {partition.j_min})"
        )
    if j_hi > -1:
        raise ValueError(
            f"shell range ends at {j_hi}; the low-frequency floor only "
            "looks at shells j <= -1"
        )
    area = theta2.lattice.quadrature_weight
    profile = []
    for j in range(j_lo, j_hi + 1):
        ring = partition.ring_values(j)
        if not np.any((ring > 0) & (theta2.coeffs != 0)):
            profile.append((j, 0.0))
            continue
        piece = shell_project(theta2, partition, j)
        value = 2.0 ** (-j) * lp_norm(np.abs(piece.physical()), math.inf, area)
        profile.append((j, value))
    return profile


def low_frequency_floor(
    theta2: SpectralField,
    partition: DyadicPartition,
    j_range: tuple[int, int] | None = None,
) -> float:
    """Sup over low shells of 2**(-j) sup |phi_j theta2| (zero field gives 0)."""
    profile = low_frequency_profile(theta2, partition, j_range)
    return max((value for _, value in profile), default=0.0)


def _q_label(q: float) -> str:
    return "inf" if math.isinf(q) else f"{q:g}"


@dataclass(frozen=True)
class InflationReport:
    """Per-shell inflation measurements and their little-ell-q aggregates.

    ``entries`` rows are (n, shell, 2**(-shell/2) L4-norm of the probe
    projection of theta2).  ``aggregates`` pairs with ``q_values``;
    construction recomputes every aggregate from the entries and rejects
    inconsistency, which also enforces the monotone ordering l1 >= l2 >=
    l-infinity.
    """

    force: dict
    entries: tuple[tuple[int, int, float], ...]
    q_values: tuple[float, ...]
    aggregates: tuple[float, ...]
    data_norm: float | None = None
    low_floor: float | None = None

    def __post_init__(self) -> None:
        if len(self.q_values) != len(self.aggregates):
            raise ValueError("aggregates and q_values must pair up")
        if any(b <= a for a, b in zip(self.q_values, self.q_values[1:])):
            raise ValueError(f"q_values must be strictly increasing, got {self.q_values}")
        values = [v for _, _, v in self.entries]
        for q, agg in zip(self.q_values, self.aggregates):
            expected = _lq_aggregate(values, q)
            if not math.isclose(agg, expected, rel_tol=1e-9, abs_tol=1e-300):
                raise ValueError(
                    f"aggregate for q = {_q_label(q)} is {agg!r}, inconsistent "
                    f"with the entries (expected {expected!r})"
                )

    def aggregate(self, q: float) -> float:
        for known, value in zip(self.q_values, self.aggregates):
            if known == q or (math.isinf(known) and math.isinf(q)):
                return value
        raise KeyError(f"no aggregate recorded for q = {_q_label(q)}")

    def to_jsonable(self) -> dict:
        return {
            "force": self.force,
            "entries": [
                {"n": n, "shell": shell, "value": value} for n, shell, value in self.entries
            ],
            "aggregates": [
                {"q": _q_label(q), "value": value}
                for q, value in zip(self.q_values, self.aggregates)
            ],
            "data_norm": self.data_norm,
            "low_floor": self.low_floor,
        }


def inflation_profile(
    theta2: SpectralField,
    spec: ForceSpec,
    partition: DyadicPartition,
    q_values: Sequence[float] = (1.0, 2.0, math.inf),
    data_norm: float | None = None,
    low_floor: float | None = None,
) -> InflationReport:
    """Probe theta2 at every block shell and aggregate across shells.

    Entry for block n at shell j is 2**(-j/2) times the L4 norm of the
    probe projection of theta2; a shell whose probe has empty lattice
    support raises (the probe ball shrinks like 2**(j - gap), so shells
    too close to the lattice floor cannot be probed).
    """
    lat = theta2.lattice
    area = lat.quadrature_weight
    entries = []
    for n, shell in zip(spec.block_indices(), spec.block_shells()):
        probe = build_probe(lat, shell, gap=spec.probe_gap)
        piece = probe.project(theta2)
        value = 2.0 ** (-0.5 * shell) * lp_norm(np.abs(piece.physical()), 4.0, area)
        entries.append((n, shell, value))
    values = [v for _, _, v in entries]
    qs = tuple(float(q) for q in q_values)
    aggregates = tuple(_lq_aggregate(values, q) for q in qs)
    return InflationReport(
        force=spec.describe(),
        entries=tuple(entries),
        q_values=qs,
        aggregates=aggregates,
        data_norm=data_norm,
        low_floor=low_floor,
    )