"""
A transmon under 1/f noise
==========================

The rates come from oscillatory integrals of the noise spectrum, tabulated
once on the time grid. Here we look at the tables and a short ensemble run.
"""

import numpy as np

from nmep import SignedEnsemble, SolverConfig, run
from nmep.models import TransmonModel, TransmonParams, transmon_tables

# at alpha = 1 the integrals are sin x and 1 - cos x, a handy sanity check
exact = transmon_tables(TransmonParams(alpha=1.0))
print("alpha=1 table error:", max(np.max(np.abs(exact.fcos - np.sin(exact.x))),
                                   np.max(np.abs(exact.fsin - 1 + np.cos(exact.x)))))

transmon = TransmonModel(TransmonParams(alpha=0.9, c=1e-4, s_max=0.5, table_points=10_001))
for s in (0.1, 0.25, 0.5):
    rates, _, _ = transmon.channels(s)
    print(f"s={s:.2f} rates:", " ".join(f"{r:+.3e}" for r in rates))

# a short run; negative rates are absorbed by negative-count members
psi0 = np.array([1, 1j]) / np.sqrt(2)
cfg = SolverConfig(0.0, 0.5, 5e-5, 10_000, seed=9, record_stride=2000)
rho12 = np.array([[0, 0], [1, 0]])
s = run(transmon.as_model(), cfg, SignedEnsemble.pure(psi0, 10_000), {"rho12": rho12}).series
for t, c, n in zip(s.t, s["rho12"], s["n_distinct_members"]):
    print(f"s={t:.2f}  |rho12|={abs(c):.4f}  members={n}")
