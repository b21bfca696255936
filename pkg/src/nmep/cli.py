"""Command line entry point: ``simulate``, ``compare`` and ``export-analytic``.

Exit codes: 0 success, 1 comparison outside tolerance, 2 configuration or
input error, 3 solver error (partial output is still written).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import RunConfig, evaluate, load_config, load_model_params
from .core import as_operator, normalize
from .ensemble import SignedEnsemble
from .errors import ConfigError, DimensionMismatch, GridMismatch, NMEPError, NonMonotonicTimes
from .models import SpinStarParams, TransmonModel, TransmonParams, load_tabulated, spin_star_analytic, spin_star_model
from .models.spin_star import coherence_factor
from .reference import ReferenceConfig, rk4_run
from .series import TimeSeries, compare_series, observable, read_series
from .solvers import SolverConfig, run

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
DEFAULT_STATE = np.array([1 / math.sqrt(2), (1 + 1j) / 2])


def thread_count() -> int:
    raw = os.environ.get("NMEP_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"NMEP_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def build_model(cfg: RunConfig):
    try:
        if cfg.model_kind == "spin_star":
            return spin_star_model(SpinStarParams(**cfg.model_params))
        if cfg.model_kind == "transmon":
            params = dict(cfg.model_params)
            if "table_points" not in params:
                s_max = params.get("s_max", TransmonParams.s_max)
                params["table_points"] = max(1000, math.ceil(s_max / cfg.dt) + 1)
            return TransmonModel(TransmonParams(**params)).as_model()
        return load_tabulated(cfg.model_file)
    except NMEPError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "[model]") from None


def _observables(names, dim):
    ops, absolute = {}, set()
    for name in names:
        try:
            op, take_abs = observable(name, dim)
        except DimensionMismatch as exc:
            raise ConfigError(str(exc), "[output] observables") from None
        ops[name] = op
        if take_abs:
            absolute.add(name)
    return ops, absolute


def _finish(series: TimeSeries, absolute) -> TimeSeries:
    cols = {}
    for name, col in series.columns.items():
        if name in absolute:
            cols[name] = np.abs(col)
        elif name in ("trace",):
            cols[name] = np.real(col)
        else:
            cols[name] = col
    return TimeSeries(series.t, cols, series.comments)


def simulate(cfg: RunConfig, output: Path, threads: int = 1, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    model = build_model(cfg)
    ops, absolute = _observables(cfg.observables, model.dim)
    start = time.perf_counter()
    if cfg.solver_kind == "rk4":
        rho0 = as_operator(cfg.initial_density)
        if rho0.shape[0] != model.dim:
            raise ConfigError(f"density has dim {rho0.shape[0]}, model has dim {model.dim}", "[initial] density")
        ref = ReferenceConfig(cfg.t0, cfg.t_max, cfg.dt, cfg.record_stride, cfg.monitor_positivity)
        series = _finish(rk4_run(model, ref, rho0, ops), absolute)
        series.to_csv(output)
        print(f"rk4: {len(series)} records to t={float(series.t[-1])!r}, wall {time.perf_counter() - start:.2f} s", file=out)
        return EXIT_OK

    psi = cfg.initial_state
    if len(psi) != model.dim:
        raise ConfigError(f"state has dim {len(psi)}, model has dim {model.dim}", "[initial] state")
    scfg = SolverConfig(
        cfg.t0,
        cfg.t_max,
        cfg.dt,
        cfg.n_ensemble,
        cfg.seed,
        cfg.consolidation_tol,
        cfg.consolidation_stride,
        cfg.record_stride,
        cfg.solver_kind,
        cfg.monitor_positivity,
    )
    initial = SignedEnsemble.pure(normalize(psi), cfg.n_ensemble)
    try:
        result = run(model, scfg, initial, ops, threads=threads)
    except NMEPError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            series = _finish(partial.series, absolute)
            message = exc.args[0] if exc.args else ""
            series.comments.append(f"terminated: {type(exc).__name__}: {message} at t={exc.time!r}")
            series.to_csv(output)
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_SOLVER
    series = _finish(result.series, absolute)
    series.to_csv(output)
    print(
        f"{cfg.solver_kind}: {len(result.ensemble)} distinct members at t={float(series.t[-1])!r}, "
        f"wall {time.perf_counter() - start:.2f} s",
        file=out,
    )
    return EXIT_OK


def compare(a: Path, b: Path, columns, tol: float, out=None) -> int:
    out = out or sys.stdout
    report = compare_series(read_series(a), read_series(b), columns)
    ok = True
    for name, stats in report.items():
        flag = "ok" if stats.max_abs <= tol else "FAIL"
        ok &= stats.max_abs <= tol
        print(f"{name}: max_abs={stats.max_abs:.6g} rmse={stats.rmse:.6g} {flag}", file=out)
    return EXIT_OK if ok else EXIT_TOLERANCE


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("grid must read t0:t_max:n", "--grid")
    try:
        t0, t1 = (float(evaluate(p)) for p in parts[:2])
        n = int(parts[2])
    except (ValueError, TypeError):
        raise ConfigError(f"bad grid {text!r}", "--grid") from None
    if n < 2 or not t1 > t0:
        raise ConfigError("grid needs n >= 2 and t_max > t0", "--grid")
    h = (t1 - t0) / (n - 1)
    return t0 + np.arange(n) * h


def export_analytic(kind: str, params_path: Path | None, grid: np.ndarray, output: Path) -> int:
    if kind != "spin_star":
        raise ConfigError(f"no closed-form solution for model kind {kind!r}", "--model")
    params, state = {}, DEFAULT_STATE
    if params_path is not None:
        file_kind, params, file_state = load_model_params(params_path)
        if file_kind != "spin_star":
            raise ConfigError(f"no closed-form solution for model kind {file_kind!r}", str(params_path))
        if file_state is not None:
            state = file_state
    try:
        p = SpinStarParams(**params)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), str(params_path)) from None
    psi = normalize(state)
    rho0 = np.outer(psi, np.conj(psi))
    rho12 = np.array([spin_star_analytic(p, rho0, t)[0, 1] for t in grid])
    f = coherence_factor(p, grid)
    TimeSeries(grid, {"rho12": rho12, "abs_f": np.abs(f), "re_f": f.real, "im_f": f.imag}).to_csv(output)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nmep", description="Signed-ensemble quantum trajectory simulations.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", help="run a configured simulation and write a CSV series")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--output", type=Path)
    c = sub.add_parser("compare", help="compare columns of two CSV series")
    c.add_argument("--a", required=True, type=Path)
    c.add_argument("--b", required=True, type=Path)
    c.add_argument("--columns", required=True)
    c.add_argument("--tol", required=True, type=float)
    e = sub.add_parser("export-analytic", help="write the closed-form spin-star solution")
    e.add_argument("--model", required=True)
    e.add_argument("--params", type=Path)
    e.add_argument("--grid", required=True)
    e.add_argument("--output", required=True, type=Path)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = load_config(args.config)
            output = args.output or cfg.output
            if output is None:
                raise ConfigError("no output path (use --output or [output] path)", str(args.config))
            return simulate(cfg, output, thread_count())
        if args.command == "compare":
            cols = [c.strip() for c in args.columns.split(",") if c.strip()]
            return compare(args.a, args.b, cols, args.tol)
        return export_analytic(args.model, args.params, parse_grid(args.grid), args.output)
    except (ConfigError, GridMismatch, NonMonotonicTimes, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NMEPError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
