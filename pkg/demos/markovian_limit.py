"""
Markovian limit: three solvers, one answer
==========================================

With a constant positive rate, the signed ensemble, plain quantum jumps and
the density-matrix integrator all describe the same decay.
"""

import math

import numpy as np

from nmep import SignedEnsemble, SolverConfig, run
from nmep.core import SIGMA_MINUS, SIGMA_Z, projector
from nmep.models import constant_model
from nmep.reference import ReferenceConfig, rk4_run

model = constant_model(np.zeros((2, 2)), [(SIGMA_MINUS, 1.0)])
psi0 = np.array([1 / math.sqrt(2), (1 + 1j) / 2])
n = 10_000

runs = {}
for kind in ("mcwf", "nmep"):
    cfg = SolverConfig(0.0, 3.0, 1e-3, n, seed=4, kind=kind, record_stride=500)
    runs[kind] = run(model, cfg, SignedEnsemble.pure(psi0, n), {"sz": SIGMA_Z}).series
runs["rk4"] = rk4_run(model, ReferenceConfig(0.0, 3.0, 1e-3, record_stride=500), projector(psi0), {"sz": SIGMA_Z})

# <sz> = 2 p_exc(0) exp(-t) - 1
exact = 2 * 0.5 * np.exp(-runs["rk4"].t) - 1
print("   t     exact     rk4      mcwf     nmep")
for i, t in enumerate(runs["rk4"].t):
    row = "  ".join(f"{runs[k]['sz'][i].real:+.4f}" for k in ("rk4", "mcwf", "nmep"))
    print(f"{t:4.1f}  {exact[i]:+.4f}  {row}")
print(f"\nstatistical scale 1/sqrt(N) = {1 / math.sqrt(n):.4f}")
