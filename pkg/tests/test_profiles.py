"""The smooth step profile everything frequency-side is built from."""

import numpy as np
import pytest

from sqglab.profiles import SmoothStep


def test_plateau_and_tail_are_exact():
    step = SmoothStep(1.25, 1.75)
    r = np.linspace(0.0, 3.0, 601)
    vals = step(r)
    assert np.all(vals[r <= 1.25] == 1.0)
    assert np.all(vals[r >= 1.75] == 0.0)
    mid = (r > 1.25) & (r < 1.75)
    assert np.all((vals[mid] >= 0.0) & (vals[mid] <= 1.0))
    # strictly interior values are strictly between the levels (the flat
    # tails of exp(-1/t) round to the levels right at the edges)
    core = (r > 1.4) & (r < 1.6)
    assert np.all((vals[core] > 0.0) & (vals[core] < 1.0))


def test_monotone_decreasing():
    step = SmoothStep(1.0, 2.0)
    r = np.linspace(0.9, 2.1, 400)
    vals = step(r)
    assert np.all(np.diff(vals) <= 0.0)


def test_partition_ramp_telescopes_exactly():
    # the defining property behind the exact ring sums: the up-ramp and
    # the down-ramp at dyadically related radii cancel in floating point
    step = SmoothStep(1.25, 1.75)
    r = np.linspace(0.01, 64.0, 2000)
    total = np.zeros_like(r)
    for j in range(-8, 9):
        total += step(r * 2.0**-j) - step(r * 2.0 ** (1 - j))
    inner = (r >= 1.75 * 2.0**-8) & (r <= 1.25 * 2.0**8 / 2)
    assert np.max(np.abs(total[inner] - 1.0)) == 0.0


def test_scalar_input():
    step = SmoothStep(1.0, 2.0)
    assert step(0.5) == 1.0
    assert step(2.5) == 0.0
    assert 0.0 < float(step(1.5)) < 1.0


def test_rejects_bad_interval():
    with pytest.raises(ValueError, match="t0 < t1"):
        SmoothStep(2.0, 1.0)
    with pytest.raises(ValueError, match="t0 < t1"):
        SmoothStep(0.0, 1.0)
