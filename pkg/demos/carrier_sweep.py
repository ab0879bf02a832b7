"""Desk-scale version of the ill-posedness sweep.

Pushes the modulated-bump carrier up one octave at a time and prints how
the data norm at (8, 2) shrinks while the low-frequency floor of the
second iterate refuses to follow it down.  The production run lives in
``sqglab illpose-step1``; this script keeps the lattice small enough to
finish in seconds and shows the same mechanism through the library API.
"""

from sqglab.besov import BesovIndex, besov_norm, build_partition
from sqglab.bilinear import quadratic_diagonal
from sqglab.diagnostics import low_frequency_floor
from sqglab.forcing import ForceSpec, modulated_bump_force
from sqglab.spectral import FrequencyLattice, inverse_laplacian

lat = FrequencyLattice(m=512, h_xi=0.125)
part = build_partition(lat)
data_index = BesovIndex.data_index(8.0, 2.0)
delta = 0.01

print("size  carrier  data norm     floor/delta^2")
norms = []
previous = None
for size in (4, 5, 6):
    spec = ForceSpec(variant="bump", delta=delta, size=size, carrier_exponent=size - 2)
    spec.validate(lat)
    force = modulated_bump_force(lat, spec)
    theta1 = inverse_laplacian(force)
    theta2 = quadratic_diagonal(theta1)
    norm = besov_norm(force, data_index, part)
    floor = low_frequency_floor(theta2, part)
    step = "" if previous is None else f"  (x {norm / previous:.4f})"
    print(f"{size:4d}  {size - 2:7d}  {norm:<12.6g}  {floor / delta**2:<12.6g}{step}")
    norms.append(norm)
    previous = norm

mean_step = (norms[-1] / norms[0]) ** (1.0 / (len(norms) - 1))
print(f"\nmean per-step factor {mean_step:.4f} vs 2**-1/4 = 0.8409; the floor holds")
print("its order of magnitude while the data norm drifts down octave by octave.")
