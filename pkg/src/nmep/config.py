"""INI run configurations.

Values may be arithmetic expressions over numbers, complex literals
(``1j``), ``pi``, ``e`` and the functions ``sqrt exp cos sin``; lists use
commas (``state = 1/sqrt(2), (1+1j)/2``) and matrices nest brackets
(``density = [[0.5, 0.5], [0.5, 0.5]]``).
"""

from __future__ import annotations

import ast
import cmath
import configparser
import math
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

_NAMES = {"pi": math.pi, "e": math.e, "j": 1j}
_FUNCS = {"sqrt": cmath.sqrt, "exp": cmath.exp, "cos": cmath.cos, "sin": cmath.sin}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _simplify(x):
    if isinstance(x, complex) and x.imag == 0:
        return x.real
    return x


def evaluate(text: str):
    """Evaluate a restricted arithmetic expression (no names beyond the whitelist)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
            return _simplify(_FUNCS[node.func.id](*(ev(a) for a in node.args)))
        if isinstance(node, (ast.List, ast.Tuple)):
            return [ev(x) for x in node.elts]
        raise ValueError(f"unsupported expression element {ast.dump(node)[:40]!r}")

    return ev(tree)


MODEL_KINDS = ("spin_star", "transmon", "tabulated")
SOLVER_KINDS = ("mcwf", "nmep", "nmqj", "rk4")


@dataclass
class RunConfig:
    model_kind: str
    model_params: dict = field(default_factory=dict)
    model_file: Path | None = None
    solver_kind: str = "nmep"
    t0: float = 0.0
    t_max: float = 1.0
    dt: float = 1e-3
    n_ensemble: int = 1
    seed: int = 0
    consolidation_tol: float = 1e-6
    consolidation_stride: int = 1
    record_stride: int = 1
    monitor_positivity: bool = False
    initial_state: np.ndarray | None = None
    initial_density: np.ndarray | None = None
    observables: list[str] = field(default_factory=lambda: ["rho12", "abs_rho12"])
    output: Path | None = None


class _Reader:
    def __init__(self, parser, text, source):
        self.parser = parser
        self.lines = text.splitlines()
        self.source = source

    def where(self, section, key=None):
        current = None
        for n, line in enumerate(self.lines, start=1):
            stripped = line.strip()
            m = re.fullmatch(r"\[([^\]]+)\]", stripped)
            if m:
                current = m[1].strip()
                if key is None and current == section:
                    return f"{self.source}:{n} [{section}]"
                continue
            if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
                return f"{self.source}:{n} [{section}] {key}"
        return f"{self.source} [{section}]" + (f" {key}" if key else "")

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def raw(self, section, key, default=None, required=False):
        if not self.parser.has_section(section):
            if required:
                raise ConfigError("missing section", f"{self.source} [{section}]")
            return default
        if not self.parser.has_option(section, key):
            if required:
                raise ConfigError("missing key", self.where(section, key))
            return default
        return self.parser.get(section, key)

    def value(self, section, key, kind, default=None, required=False):
        text = self.raw(section, key, None, required)
        if text is None:
            return default
        where = self.where(section, key)
        try:
            if kind is str:
                return text.strip()
            if kind is bool:
                low = text.strip().lower()
                if low in ("1", "true", "yes", "on"):
                    return True
                if low in ("0", "false", "no", "off"):
                    return False
                raise ValueError(f"expected a boolean, got {text!r}")
            v = evaluate(text)
            if kind is int:
                if isinstance(v, float) and v.is_integer():
                    v = int(v)
                if not isinstance(v, int):
                    raise ValueError(f"expected an integer, got {text!r}")
                return v
            if kind is float:
                if isinstance(v, complex) or isinstance(v, list):
                    raise ValueError(f"expected a real number, got {text!r}")
                return float(v)
            if kind is complex:
                arr = np.asarray(v if isinstance(v, list) else [v], dtype=complex)
                return arr
        except (ValueError, TypeError, ZeroDivisionError, OverflowError) as exc:
            raise ConfigError(str(exc), where) from None
        raise AssertionError(kind)


def _reader(text, source):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], source) from None
    return _Reader(parser, text, source)


def _model_section(r: _Reader, base_dir):
    kind = r.value("model", "kind", str, required=True)
    if kind not in MODEL_KINDS:
        raise ConfigError(f"model kind must be one of {MODEL_KINDS}", r.where("model", "kind"))
    params: dict = {}
    model_file = None
    if kind == "spin_star":
        for key, typ in (("alpha", float), ("n_spins", int), ("beta_omega", float)):
            if r.has("model", key):
                params[key] = r.value("model", key, typ)
    elif kind == "transmon":
        for key, typ in (("alpha", float), ("c", float), ("s_max", float), ("table_points", int)):
            if r.has("model", key):
                params[key] = r.value("model", key, typ)
    else:
        name = r.value("model", "file", str, required=True)
        model_file = (base_dir or Path(".")) / name
        if not model_file.is_file():
            raise ConfigError(f"model file {str(model_file)!r} does not exist", r.where("model", "file"))
    return kind, params, model_file


def _initial_state(r: _Reader):
    psi = r.value("initial", "state", complex)
    if psi.ndim != 1 or not np.linalg.norm(psi) > 0:
        raise ConfigError("state must be a non-zero vector", r.where("initial", "state"))
    return psi


def parse_config(text: str, source: str = "<string>", base_dir: Path | None = None) -> RunConfig:
    r = _reader(text, source)
    cfg = RunConfig(*_model_section(r, base_dir))
    cfg.solver_kind = r.value("solver", "kind", str, required=True)
    if cfg.solver_kind not in SOLVER_KINDS:
        raise ConfigError(f"solver kind must be one of {SOLVER_KINDS}", r.where("solver", "kind"))
    cfg.dt = r.value("solver", "dt", float, required=True)
    cfg.t0 = r.value("solver", "t0", float, 0.0)
    cfg.t_max = r.value("solver", "t_max", float, required=True)
    cfg.record_stride = r.value("solver", "record_stride", int, 1)
    cfg.monitor_positivity = r.value("solver", "monitor_positivity", bool, False)
    if not cfg.dt > 0:
        raise ConfigError("dt must be positive", r.where("solver", "dt"))
    if round((cfg.t_max - cfg.t0) / cfg.dt) < 1:
        raise ConfigError("t_max - t0 must span at least one step", r.where("solver", "t_max"))
    if cfg.record_stride < 1:
        raise ConfigError("record_stride must be positive", r.where("solver", "record_stride"))
    if cfg.solver_kind != "rk4":
        cfg.n_ensemble = r.value("solver", "n_ensemble", int, required=True)
        cfg.seed = r.value("solver", "seed", int, 0)
        cfg.consolidation_tol = r.value("solver", "consolidation_tol", float, 1e-6)
        cfg.consolidation_stride = r.value("solver", "consolidation_stride", int, 1)
        if cfg.n_ensemble < 1:
            raise ConfigError("n_ensemble must be positive", r.where("solver", "n_ensemble"))
        if not cfg.consolidation_tol > 0:
            raise ConfigError("consolidation_tol must be positive", r.where("solver", "consolidation_tol"))
        if cfg.consolidation_stride < 1:
            raise ConfigError("consolidation_stride must be positive", r.where("solver", "consolidation_stride"))

    if cfg.solver_kind == "rk4":
        if not r.has("initial", "density"):
            raise ConfigError("solver kind rk4 needs an initial density matrix", r.where("initial"))
        rho = r.value("initial", "density", complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ConfigError("density must be a square matrix", r.where("initial", "density"))
        cfg.initial_density = rho
    else:
        if not r.has("initial", "state"):
            raise ConfigError("stochastic solvers need an initial pure state", r.where("initial"))
        cfg.initial_state = _initial_state(r)

    obs = r.value("output", "observables", str)
    if obs:
        cfg.observables = [o.strip() for o in obs.split(",") if o.strip()]
    out = r.value("output", "path", str)
    if out:
        cfg.output = (base_dir or Path(".")) / out
    return cfg


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config(_read(path), str(path), path.parent)


def load_model_params(path: str | Path):
    """``(kind, params, state or None)`` from a file with a [model] and optional [initial] section."""
    path = Path(path)
    r = _reader(_read(path), str(path))
    kind, params, _ = _model_section(r, path.parent)
    state = _initial_state(r) if r.has("initial", "state") else None
    return kind, params, state
