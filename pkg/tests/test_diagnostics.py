"""Probing the second iterate: splits, floors, inflation profiles."""

import math

import numpy as np
import pytest

from sqglab.besov import build_partition
from sqglab.bilinear import quadratic_diagonal
from sqglab.diagnostics import (
    InflationReport,
    inflation_profile,
    low_frequency_floor,
    low_frequency_profile,
    second_iterate_split,
)
from sqglab.forcing import ExponentMap, ForceSpec, modulated_bump_force, translated_block_force
from sqglab.spectral import FrequencyLattice, SpectralField, inverse_laplacian


@pytest.fixture(scope="module")
def carrier_setup():
    lat = FrequencyLattice(m=256, h_xi=0.25)
    spec = ForceSpec(variant="bump", delta=0.01, size=3)
    theta1 = inverse_laplacian(modulated_bump_force(lat, spec))
    return lat, theta1, quadratic_diagonal(theta1)


def test_split_reassembles_the_direct_coefficient(carrier_setup):
    lat, theta1, theta2 = carrier_setup
    probes = [(1, 1), (2, 1), (1, -2)]
    samples = second_iterate_split(theta1, probes)
    assert [s.index for s in samples] == probes
    for s in samples:
        a, b = s.index
        assert s.frequency == (lat.h_xi * a, lat.h_xi * b)
        direct = theta2.coeffs[a % lat.m, b % lat.m]
        assert abs(direct) > 0
        assert abs(s.total - direct) <= 1e-12 * abs(direct)
        assert s.total == s.main + s.cross + s.perp


def test_split_probe_validation(carrier_setup):
    lat, theta1, _ = carrier_setup
    with pytest.raises(ValueError, match="outside the lattice symmetric box"):
        second_iterate_split(theta1, [(200, 0)])
    with pytest.raises(ValueError, match="frequency zero"):
        second_iterate_split(theta1, [(0, 0)])
    with pytest.raises(ValueError, match="exceeds the admissible bound"):
        second_iterate_split(theta1, [(8, 0)])
    with pytest.raises(ValueError, match="xi_bound"):
        second_iterate_split(theta1, [(1, 1)], xi_bound=0.0)
    # a wider bound admits the same probe
    assert second_iterate_split(theta1, [(8, 0)], xi_bound=4.0)


def test_low_frequency_profile_values(carrier_setup):
    lat, _, theta2 = carrier_setup
    partition = build_partition(lat)
    profile = low_frequency_profile(theta2, partition)
    assert [j for j, _ in profile] == list(range(partition.j_min, 0))
    values = dict(profile)
    area = lat.quadrature_weight
    for j, value in profile:
        ring = partition.ring_values(j)
        piece = SpectralField(lat, theta2.coeffs * ring)
        want = 2.0 ** (-j) * float(np.max(np.abs(piece.physical())))
        assert value == pytest.approx(want, rel=1e-12)
    assert low_frequency_floor(theta2, partition) == max(values.values())


def test_low_frequency_profile_range_checks(carrier_setup):
    lat, _, theta2 = carrier_setup
    partition = build_partition(lat)
    with pytest.raises(ValueError, match="empty shell range"):
        low_frequency_profile(theta2, partition, (-1, -2))
    with pytest.raises(ValueError, match="below the partition window"):
        low_frequency_profile(theta2, partition, (partition.j_min - 1, -1))
    with pytest.raises(ValueError, match="only\\s+looks at shells"):
        low_frequency_profile(theta2, partition, (-2, 0))


def test_floor_of_zero_field():
    lat = FrequencyLattice(m=32, h_xi=0.25)
    partition = build_partition(lat)
    assert low_frequency_floor(SpectralField.zeros(lat), partition) == 0.0


def blocks_setup():
    lat = FrequencyLattice(m=256, h_xi=0.25)
    partition = build_partition(lat)
    spec = ForceSpec(
        variant="blocks",
        delta=0.01,
        size=2,
        block_range=(1, 2),
        exponents=ExponentMap.affine(2, -2),  # shells 0 and 2
        carrier_exponent=4,
        stride=lat.box_length / 4.0,
    )
    spec.validate(lat)
    _, forcing = translated_block_force(lat, spec, partition)
    theta2 = -1.0 * quadratic_diagonal(inverse_laplacian(forcing))
    return lat, partition, spec, theta2


def test_inflation_profile_entries_and_aggregates():
    lat, partition, spec, theta2 = blocks_setup()
    report = inflation_profile(theta2, spec, partition)
    assert [(n, shell) for n, shell, _ in report.entries] == [(1, 0), (2, 2)]
    values = [v for _, _, v in report.entries]
    assert all(v > 0 for v in values)
    # recompute one entry by hand: probe projection, weighted L4 norm
    from sqglab.besov import build_probe, lp_norm

    probe = build_probe(lat, 0, gap=spec.probe_gap)
    piece = probe.project(theta2)
    want = lp_norm(np.abs(piece.physical()), 4.0, lat.quadrature_weight)
    assert values[0] == pytest.approx(want, rel=1e-12)  # 2**(-0/2) = 1

    assert report.aggregate(1.0) >= report.aggregate(2.0) >= report.aggregate(math.inf)
    assert report.aggregate(math.inf) == max(values)
    with pytest.raises(KeyError):
        report.aggregate(3.0)
    payload = report.to_jsonable()
    assert payload["force"]["variant"] == "blocks"
    assert len(payload["entries"]) == 2
    assert payload["aggregates"][0]["q"] == "1"


def test_inflation_report_rejects_inconsistency():
    entries = ((1, 0, 3.0), (2, 2, 4.0))
    good = InflationReport(
        force={},
        entries=entries,
        q_values=(1.0, math.inf),
        aggregates=(7.0, 4.0),
    )
    assert good.aggregate(math.inf) == 4.0
    with pytest.raises(ValueError, match="inconsistent"):
        InflationReport(
            force={}, entries=entries, q_values=(1.0,), aggregates=(6.0,)
        )
    with pytest.raises(ValueError, match="pair up"):
        InflationReport(force={}, entries=entries, q_values=(1.0,), aggregates=())
    with pytest.raises(ValueError, match="strictly increasing"):
        InflationReport(
            force={}, entries=entries, q_values=(2.0, 1.0), aggregates=(5.0, 7.0)
        )
