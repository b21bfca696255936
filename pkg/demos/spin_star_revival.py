"""
Coherence revival in the spin-star model
========================================

A central spin dephases while its rate is positive, then recovers coherence
once the rate turns negative at t = pi/4. A signed ensemble follows this
without ever needing a reverse-jump partner.
"""

import math

import numpy as np

from nmep import SignedEnsemble, SolverConfig, run
from nmep.core import projector
from nmep.models import SpinStarParams, coherence_factor, dephasing_rate, spin_star_model

params = SpinStarParams()
model = spin_star_model(params)

# the rate changes sign at pi/4 and stays negative until 3 pi/4
for t in (0.2, math.pi / 4 - 0.01, math.pi / 4 + 0.01, 1.2):
    print(f"gamma({t:.3f}) = {float(dephasing_rate(params, t)):+.4f}")

psi0 = np.array([1 / math.sqrt(2), (1 + 1j) / 2])
rho12_0 = projector(psi0)[0, 1]
rho12 = np.array([[0, 0], [1, 0]], dtype=complex)

# a coarse step keeps this quick
t_max = math.pi / 2 + 0.5
cfg = SolverConfig(0.0, t_max, 5e-4 * t_max, 20_000, seed=11, record_stride=200)
result = run(model, cfg, SignedEnsemble.pure(psi0, 20_000), {"rho12": rho12})
s = result.series

f_exact = coherence_factor(params, s.t)
print("\n   t      |f~|    |f|    members")
for t, c, f, n in zip(s.t, s["rho12"], f_exact, s["n_distinct_members"]):
    print(f"{t:6.3f}  {abs(c / rho12_0):.4f}  {abs(f):.4f}  {n:6d}")
