"""
Three qutrits with spin observables
===================================

``u = Jx_1 - Jx_2 - Jx_3`` and ``v = Jy_1 - Jy_2 - Jy_3`` on the noisy state
``(1-x) I/27 + x |phi><phi|`` with ``|phi> = (|012> + |021> + |102>)/sqrt(3)``.
The subset bound is ``|sum h_i g_i <Jz_i>|`` on the state's own reductions.
"""

import numpy as np

from lurgme import NoiseFamily, SpinConfig, qutrit_phi, spin_gme_criterion

noise = NoiseFamily(qutrit_phi())
config = SpinConfig(h=(1, -1, -1), g=(1, -1, -1))

for x in np.linspace(0, 1, 6):
    report = spin_gme_criterion(noise.at(x), 1, config)
    print(f"x={x:.1f}  F={report.f_total:.4f}  bound={report.min_bound:.4f}  f={report.f:+.4f}")

# The two-operator bound is weak here: f stays positive on the whole family,
# so this configuration never certifies the state.
