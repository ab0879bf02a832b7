"""Smooth radial cutoffs built from the standard exp(-1/t) mollifier.

One profile family drives the whole frequency-side geometry: the dyadic
partition rings, the probe bumps and the low-pass envelope are all values of
``SmoothStep`` at rescaled radii.  ``SmoothStep(t0, t1)`` equals 1 on
``[0, t0]``, 0 on ``[t1, inf)`` and transitions smoothly in between; the
transition is a true partition-of-unity ramp, i.e. ``step(r) + (1 - step)``
built from the same two exponentials, so telescoping ring sums cancel
exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SmoothStep"]


def _bump(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) for t > 0, else 0; no overflow warnings."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


@dataclass(frozen=True)
class SmoothStep:
    """Smooth decreasing step: 1 on [0, t0], 0 on [t1, inf)."""

    t0: float
    t1: float

    def __post_init__(self) -> None:
        if not (0 < self.t0 < self.t1):
            raise ValueError(f"need 0 < t0 < t1, got ({self.t0}, {self.t1})")

    def __call__(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        t = (self.t1 - r) / (self.t1 - self.t0)
        a = _bump(t)
        b = _bump(1.0 - t)
        with np.errstate(invalid="ignore"):
            out = np.where(t >= 1.0, 1.0, np.where(t <= 0.0, 0.0, a / (a + b)))
        return out
