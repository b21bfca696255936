from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..core import as_operator, min_eigenvalue
from ..ensemble import DEFAULT_TOL, SignedEnsemble, consolidate, density_matrix
from ..errors import CountNotConserved, InvalidEnsemble, NMEPError
from ..models.base import LindbladModel
from ..reference import series_positivity
from ..series import TimeSeries
from .random import StepRandomness
from .steps import _check_rates, _forward_step, nmqj_step

KINDS = ("mcwf", "nmep", "nmqj")


@dataclass(frozen=True)
class SolverConfig:
    """Time grid, ensemble size, seed and bookkeeping cadence of a stochastic run.

    The grid is ``t0 + k dt`` for ``k = 0 .. n_steps`` with
    ``n_steps = round((t_max - t0) / dt)``.
    """

    t0: float
    t_max: float
    dt: float
    n_ensemble: int
    seed: int = 0
    consolidation_tol: float = DEFAULT_TOL
    consolidation_stride: int = 1
    record_stride: int = 1
    kind: str = "nmep"
    monitor_positivity: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("the run must contain at least one step")
        if self.n_ensemble < 1:
            raise ValueError("n_ensemble must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.consolidation_stride < 1 or self.record_stride < 1:
            raise ValueError("strides must be positive")
        if not self.consolidation_tol > 0:
            raise ValueError("consolidation_tol must be positive")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_max - self.t0) / self.dt))

    def time(self, k: int) -> float:
        return self.t0 + k * self.dt


class RunResult(NamedTuple):
    series: TimeSeries
    ensemble: SignedEnsemble


def _named(observables) -> dict[str, np.ndarray]:
    if isinstance(observables, Mapping):
        return {str(k): as_operator(v) for k, v in observables.items()}
    return {f"o{i}": as_operator(v) for i, v in enumerate(observables)}


def run(
    model: LindbladModel,
    cfg: SolverConfig,
    initial: SignedEnsemble,
    observables: Mapping[str, ArrayLike] | Sequence[ArrayLike] = (),
    *,
    threads: int = 1,
    callback: Callable[[int, float, SignedEnsemble], None] | None = None,
) -> RunResult:
    """Advance ``initial`` from ``t0`` to ``t_max``; rates are taken at each step's left end.

    Records ``t``, every observable, the number of distinct members, the
    total count and (optionally) the smallest eigenvalue of the
    reconstructed density matrix. A solver error is re-raised with its step
    and time filled in and the data recorded so far attached as ``partial``.
    """
    if initial.total != cfg.n_ensemble:
        raise InvalidEnsemble(f"initial ensemble holds {initial.total} copies, config asks for {cfg.n_ensemble}")
    if initial.dim != model.dim:
        raise InvalidEnsemble(f"ensemble dim {initial.dim} does not match model dim {model.dim}")
    ops = _named(observables)
    rnd = StepRandomness(cfg.seed)
    n = cfg.n_steps

    times, values, members, totals, mins = [], {k: [] for k in ops}, [], [], []

    def record(k, e):
        rho = density_matrix(e)
        times.append(cfg.time(k))
        for name, op in ops.items():
            values[name].append(complex(np.trace(op @ rho)))
        members.append(len(e))
        totals.append(int(e.counts.sum()))
        if cfg.monitor_positivity:
            mins.append(min_eigenvalue(rho))

    def series():
        cols = {k: np.array(v, dtype=complex) for k, v in values.items()}
        cols["n_distinct_members"] = np.array(members, dtype=np.int64)
        cols["total_count"] = np.array(totals, dtype=np.int64)
        if cfg.monitor_positivity:
            cols["min_eigenvalue"] = np.array(mins)
        out = TimeSeries(np.array(times), cols)
        if cfg.monitor_positivity:
            hit = series_positivity(out)
            if hit is not None:
                out.comments.append(f"positivity violated at t={hit.time!r}: min eigenvalue {hit.eigenvalue!r}")
        return out

    e = initial if cfg.kind != "nmqj" else consolidate(initial, cfg.consolidation_tol)
    record(0, e)
    k = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for k in range(n):
            t = cfg.time(k)
            e = _advance(e, model, t, cfg, rnd, k, pool)
            total = int(e.counts.sum())
            if total != cfg.n_ensemble:
                raise CountNotConserved(f"count {total} differs from {cfg.n_ensemble}")
            if (k + 1) % cfg.record_stride == 0 or k + 1 == n:
                record(k + 1, e)
            if callback is not None:
                callback(k + 1, cfg.time(k + 1), e)
    except NMEPError as exc:
        exc.annotate(k, cfg.time(k))
        exc.partial = RunResult(series(), e)
        raise
    finally:
        if pool is not None:
            pool.shutdown()
    return RunResult(series(), e)


def _advance(e, model, t, cfg, rnd, k, pool):
    if cfg.kind == "nmqj":
        return nmqj_step(e, model, t, cfg.dt, rnd, step=k, tol=cfg.consolidation_tol, pool=pool)
    snap = model.at(t)
    if cfg.kind == "mcwf":
        _check_rates(snap, t)
    tol = cfg.consolidation_tol if (k + 1) % cfg.consolidation_stride == 0 else None
    return _forward_step(e, snap, cfg.dt, rnd, k, tol, pool, exclusive=cfg.kind == "mcwf")
