"""
Noisy W state on three qubits
=============================

Walk through the detection curve of ``(1-q) I/8 + q |W><W|`` with the Pauli
triple on each qubit and ``(-, -, +)`` sign flips on the last one.
"""

import numpy as np

from lurgme import BoundProvider, NoiseFamily, gme_criterion, pauli_family, w_state
from lurgme.analysis import find_threshold, w_signs

# The state family and the observables
noise = NoiseFamily(w_state(3))
family = pauli_family(w_signs(3))

# Subset bounds U come from minimising each variance sum along the family itself
provider = BoundProvider.family_minimum(noise)

# f < 0 certifies genuine tripartite entanglement
for q in np.linspace(0, 1, 11):
    report = gme_criterion(noise.at(q), family, provider)
    pb = report.argmin
    print(f"q={q:.1f}  f={report.f:+.5f}  {report.verdict:<12} "
          f"argmin {pb.partition.label()}  U=({pb.u_left:.4f}, {pb.u_right:.4f})")

# Bisection for the crossing
result = find_threshold(noise, family, provider)
print(f"\ndetected for q >= {result.q_star:.6f}")
