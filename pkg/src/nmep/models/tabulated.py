"""User-supplied models: constant operators with sampled, linearly interpolated rates.

File format (UTF-8)::

    # comments start with '#'
    dim=2 channels=1
    channel sz
    1+0j  0+0j
    0+0j -1+0j
    rates:
    0.0  0.0
    1.0  2.0
    hamiltonian
    0+0j 0+0j
    0+0j 0+0j
    rates:          # optional scalar envelope h(t); constant when absent
    0.0 1.0
    1.0 1.0

Each channel block is a keyword line, ``dim`` matrix rows of complex
literals and a ``rates:`` block of ``t value`` pairs. The Hamiltonian block
is optional (zero Hamiltonian when absent).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core import as_operator, is_hermitian
from ..errors import ConfigError, DimensionMismatch, NonMonotonicTimes, NotHermitian, OutOfRange
from .base import JumpChannel, LindbladModel, ModelSnapshot


@dataclass(frozen=True)
class Samples:
    """Piecewise-linear function through ``(t_k, v_k)``, defined on ``[t_0, t_last]``."""

    times: NDArray[np.float64]
    values: NDArray[np.float64]

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise DimensionMismatch("sample times and values must be equal-length 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise NonMonotonicTimes("sample times must increase strictly")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __call__(self, t: float) -> float:
        if t < self.times[0] or t > self.times[-1]:
            raise OutOfRange(f"t={t!r} outside sampled range [{self.times[0]}, {self.times[-1]}]")
        return float(np.interp(t, self.times, self.values))


@dataclass(frozen=True)
class TabulatedSpec:
    dim: int
    channel_operators: list[NDArray[np.complex128]]
    channel_rates: list[Samples]
    hamiltonian: NDArray[np.complex128] | None = None
    hamiltonian_envelope: Samples | None = None
    channel_names: list[str] = field(default_factory=list)


def tabulated_model(spec: TabulatedSpec) -> LindbladModel:
    dim = spec.dim
    ops = [as_operator(a) for a in spec.channel_operators]
    if len(ops) != len(spec.channel_rates):
        raise DimensionMismatch("one rate table is required per channel")
    for k, a in enumerate(ops):
        if a.shape[0] != dim:
            raise DimensionMismatch(f"channel {k} operator has dim {a.shape[0]}, expected {dim}")
    h0 = np.zeros((dim, dim), dtype=complex) if spec.hamiltonian is None else as_operator(spec.hamiltonian)
    if h0.shape[0] != dim:
        raise DimensionMismatch(f"hamiltonian has dim {h0.shape[0]}, expected {dim}")
    if not is_hermitian(h0):
        raise NotHermitian("tabulated hamiltonian must be Hermitian")
    env = spec.hamiltonian_envelope
    names = spec.channel_names or [f"c{k}" for k in range(len(ops))]
    stacked = np.stack(ops) if ops else np.zeros((0, dim, dim), dtype=complex)

    def hamiltonian_at(t):
        return h0 if env is None else env(t) * h0

    def snapshot(t):
        return ModelSnapshot(hamiltonian_at(t), stacked, np.array([r(t) for r in spec.channel_rates]))

    chans = tuple(JumpChannel(lambda t, a=a: a, r, name=n) for a, r, n in zip(ops, spec.channel_rates, names))
    return LindbladModel(dim, hamiltonian_at, chans, snapshot=snapshot, name="tabulated")


def sampled_model(hamiltonian: ArrayLike, channels, envelope: Samples | None = None) -> LindbladModel:
    """Convenience wrapper: ``channels`` is a list of ``(operator, Samples)``."""
    h = as_operator(hamiltonian)
    return tabulated_model(
        TabulatedSpec(h.shape[0], [a for a, _ in channels], [r for _, r in channels], h, envelope)
    )


# -- file parsing --------------------------------------------------------------


def _parse_complex(token: str, where: str) -> complex:
    try:
        return complex(token.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"bad complex literal {token!r}", where) from None


def parse_tabulated(text: str, source: str = "<string>") -> TabulatedSpec:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise ConfigError("empty model file", source)

    lineno, header = lines[0]
    fields = dict(tok.split("=", 1) for tok in header.split() if "=" in tok)
    try:
        dim = int(fields["dim"])
        n_channels = int(fields["channels"])
    except (KeyError, ValueError):
        raise ConfigError("header must read 'dim=<n> channels=<k>'", f"{source}:{lineno}") from None
    if dim < 1 or n_channels < 0:
        raise ConfigError("dim must be >= 1 and channels >= 0", f"{source}:{lineno}")

    pos = 1

    def read_matrix(where):
        nonlocal pos
        rows = []
        for _ in range(dim):
            if pos >= len(lines):
                raise ConfigError(f"expected {dim} matrix rows", where)
            ln, body = lines[pos]
            toks = body.split()
            if len(toks) != dim:
                raise ConfigError(f"expected {dim} entries, found {len(toks)}", f"{source}:{ln}")
            rows.append([_parse_complex(t, f"{source}:{ln}") for t in toks])
            pos += 1
        return np.array(rows, dtype=complex)

    def read_rates(where, required):
        nonlocal pos
        if pos >= len(lines) or lines[pos][1].lower() != "rates:":
            if required:
                raise ConfigError("expected a 'rates:' block", where)
            return None
        pos += 1
        ts, vs = [], []
        while pos < len(lines):
            ln, body = lines[pos]
            head = body.split()[0].lower()
            if head in ("channel", "hamiltonian"):
                break
            toks = body.split()
            if len(toks) != 2:
                raise ConfigError("rate samples are 't value' pairs", f"{source}:{ln}")
            try:
                ts.append(float(toks[0]))
                vs.append(float(toks[1]))
            except ValueError:
                raise ConfigError(f"bad number in {body!r}", f"{source}:{ln}") from None
            pos += 1
        if not ts:
            raise ConfigError("rates block is empty", where)
        try:
            return Samples(np.array(ts), np.array(vs))
        except NonMonotonicTimes as exc:
            raise NonMonotonicTimes(f"{where}: {exc}") from None

    ops, rates, names = [], [], []
    hamiltonian = envelope = None
    while pos < len(lines):
        ln, body = lines[pos]
        toks = body.split()
        keyword = toks[0].lower()
        where = f"{source}:{ln}"
        pos += 1
        if keyword == "channel":
            names.append(toks[1] if len(toks) > 1 else f"c{len(ops)}")
            ops.append(read_matrix(where))
            rates.append(read_rates(where, required=True))
        elif keyword == "hamiltonian":
            if hamiltonian is not None:
                raise ConfigError("duplicate hamiltonian block", where)
            hamiltonian = read_matrix(where)
            envelope = read_rates(where, required=False)
        else:
            raise ConfigError(f"unexpected line {body!r}", where)
    if len(ops) != n_channels:
        raise ConfigError(f"header declares {n_channels} channels, found {len(ops)}", source)
    return TabulatedSpec(dim, ops, rates, hamiltonian, envelope, names)


def load_tabulated(path: str | Path) -> LindbladModel:
    path = Path(path)
    return tabulated_model(parse_tabulated(path.read_text(encoding="utf-8"), str(path)))


def format_tabulated(spec: TabulatedSpec) -> str:
    """Inverse of :func:`parse_tabulated` (full float precision)."""
    out = [f"dim={spec.dim} channels={len(spec.channel_operators)}"]

    def matrix(m):
        for row in np.asarray(m, dtype=complex).tolist():
            out.append(" ".join(f"{z.real!r}{z.imag:+.17g}j" for z in row))

    def samples(s):
        out.append("rates:")
        out.extend(f"{t!r} {v!r}" for t, v in zip(s.times.tolist(), s.values.tolist()))

    names = spec.channel_names or [f"c{k}" for k in range(len(spec.channel_operators))]
    for name, a, r in zip(names, spec.channel_operators, spec.channel_rates):
        out.append(f"channel {name}")
        matrix(a)
        samples(r)
    if spec.hamiltonian is not None:
        out.append("hamiltonian")
        matrix(spec.hamiltonian)
        if spec.hamiltonian_envelope is not None:
            samples(spec.hamiltonian_envelope)
    return "\n".join(out) + "\n"
