"""Deterministic density-matrix integration and positivity checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import as_operator, dagger, is_hermitian, min_eigenvalue
from .errors import DimensionMismatch, NotHermitian
from .models.base import LindbladModel, ModelSnapshot
from .series import ColumnError, TimeSeries, compare_series

__all__ = [
    "ColumnError",
    "PositivityViolation",
    "ReferenceConfig",
    "compare_series",
    "generator_rhs",
    "positivity_report",
    "rk4_run",
    "series_positivity",
]


def _rhs(rho: NDArray[np.complex128], snap: ModelSnapshot) -> NDArray[np.complex128]:
    h = snap.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for gamma, a in zip(snap.rates, snap.operators):
        if gamma == 0.0:
            continue
        ad = dagger(a)
        ada = ad @ a
        out = out + gamma * (a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada))
    return out


def generator_rhs(rho: ArrayLike, m: LindbladModel, t: float) -> NDArray[np.complex128]:
    """``-i[H, rho] + sum_l gamma_l (A rho A^dag - {A^dag A, rho}/2)`` at time ``t``."""
    rho = as_operator(rho)
    if rho.shape[0] != m.dim:
        raise DimensionMismatch(f"density matrix dim {rho.shape[0]} vs model dim {m.dim}")
    return _rhs(rho, m.at(t))


@dataclass(frozen=True)
class ReferenceConfig:
    t0: float
    t_max: float
    dt: float
    record_stride: int = 1
    monitor_positivity: bool = False
    positivity_tol: float = 1e-9

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("the run must contain at least one step")
        if self.record_stride < 1:
            raise ValueError("record_stride must be positive")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_max - self.t0) / self.dt))

    def time(self, k: int) -> float:
        return self.t0 + k * self.dt


def rk4_run(
    m: LindbladModel,
    cfg: ReferenceConfig,
    rho0: ArrayLike,
    observables: Mapping[str, ArrayLike] | Sequence[ArrayLike] = (),
) -> TimeSeries:
    """Classic fixed-step RK4 with compensated (Kahan) accumulation of rho.

    Records every observable as ``tr(O rho)``, the trace, the Hermiticity
    defect and, when monitoring, the smallest eigenvalue.
    """
    rho = as_operator(rho0)
    if rho.shape[0] != m.dim:
        raise DimensionMismatch(f"initial state dim {rho.shape[0]} vs model dim {m.dim}")
    if not is_hermitian(rho):
        raise NotHermitian("initial density matrix must be Hermitian")
    if isinstance(observables, Mapping):
        ops = {str(k): as_operator(v) for k, v in observables.items()}
    else:
        ops = {f"o{i}": as_operator(v) for i, v in enumerate(observables)}

    times, vals = [], {k: [] for k in ops}
    traces, defects, mins = [], [], []

    def record(k):
        times.append(cfg.time(k))
        for name, op in ops.items():
            vals[name].append(complex(np.trace(op @ rho)))
        traces.append(complex(np.trace(rho)))
        defects.append(float(np.max(np.abs(rho - dagger(rho)))))
        if cfg.monitor_positivity:
            mins.append(min_eigenvalue(0.5 * (rho + dagger(rho))))

    dt = cfg.dt
    carry = np.zeros_like(rho)
    n = cfg.n_steps
    record(0)
    for k in range(n):
        t = cfg.time(k)
        s0, s_half, s1 = m.at(t), m.at(t + 0.5 * dt), m.at(t + dt)
        k1 = _rhs(rho, s0)
        k2 = _rhs(rho + 0.5 * dt * k1, s_half)
        k3 = _rhs(rho + 0.5 * dt * k2, s_half)
        k4 = _rhs(rho + dt * k3, s1)
        inc = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - carry
        new = rho + inc
        carry = (new - rho) - inc
        rho = new
        if (k + 1) % cfg.record_stride == 0 or k + 1 == n:
            record(k + 1)

    cols = {k: np.array(v, dtype=complex) for k, v in vals.items()}
    cols["trace"] = np.array(traces, dtype=complex)
    cols["hermiticity_defect"] = np.array(defects)
    if cfg.monitor_positivity:
        cols["min_eigenvalue"] = np.array(mins)
    series = TimeSeries(np.array(times), cols)
    if cfg.monitor_positivity:
        hit = series_positivity(series, cfg.positivity_tol)
        if hit is not None:
            series.comments.append(f"positivity violated at t={hit.time!r}: min eigenvalue {hit.eigenvalue!r}")
    return series


class PositivityViolation(NamedTuple):
    time: float
    eigenvalue: float


def positivity_report(times: ArrayLike, matrices, tol: float = 1e-9) -> PositivityViolation | None:
    """Earliest recorded time whose smallest eigenvalue is below ``-tol``."""
    for t, rho in zip(np.asarray(times, dtype=float), matrices):
        lam = min_eigenvalue(rho)
        if lam < -tol:
            return PositivityViolation(float(t), lam)
    return None


def series_positivity(series: TimeSeries, tol: float = 1e-9) -> PositivityViolation | None:
    """Like :func:`positivity_report`, from a recorded ``min_eigenvalue`` column."""
    lam = np.asarray(series["min_eigenvalue"], dtype=float)
    bad = np.flatnonzero(lam < -tol)
    if bad.size == 0:
        return None
    return PositivityViolation(float(series.t[bad[0]]), float(lam[bad[0]]))
