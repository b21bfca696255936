"""Recorded time series and their CSV form.

CSV layout: one header row, then ``t``, one column per observable (real
part, plus ``<name>_im`` only when some imaginary part exceeds 1e-10), then
bookkeeping columns. Floats are written with ``repr`` so they read back
bit-exactly. Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from .core import SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Y, SIGMA_Z
from .errors import ConfigError, DimensionMismatch, GridMismatch, NonMonotonicTimes

IMAG_CUTOFF = 1e-10
GRID_SLACK = 1e-12


@dataclass
class TimeSeries:
    """Columns sampled on a common, strictly increasing time grid."""

    t: NDArray[np.float64]
    columns: dict[str, NDArray] = field(default_factory=dict)
    comments: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name, col in self.columns.items():
            if len(col) != len(self.t):
                raise DimensionMismatch(f"column {name!r} has {len(col)} rows, grid has {len(self.t)}")

    def __getitem__(self, name: str) -> NDArray:
        return self.columns[name]

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def __len__(self) -> int:
        return len(self.t)

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def to_csv(self, path: str | Path | None = None) -> str:
        header, cols = ["t"], [self.t]
        for name, col in self.columns.items():
            col = np.asarray(col)
            if np.iscomplexobj(col):
                header.append(name)
                cols.append(col.real)
                if np.any(np.abs(col.imag) > IMAG_CUTOFF):
                    header.append(f"{name}_im")
                    cols.append(col.imag)
            else:
                header.append(name)
                cols.append(col)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        rows = [c.tolist() for c in cols]
        for i in range(len(self.t)):
            writer.writerow([repr(r[i]) if isinstance(r[i], float) else r[i] for r in rows])
        for line in self.comments:
            buf.write(f"# {line}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def _cell(token: str, where: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"not a number: {token!r}", where) from None


def parse_series(text: str, source: str = "<string>") -> TimeSeries:
    header = None
    rows, comments = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        fields = next(csv.reader([line]))
        if header is None:
            header = [f.strip() for f in fields]
            if not header or header[0] != "t":
                raise ConfigError("first column must be 't'", f"{source}:{lineno}")
            continue
        if len(fields) != len(header):
            raise ConfigError(f"expected {len(header)} fields, found {len(fields)}", f"{source}:{lineno}")
        rows.append([_cell(f.strip(), f"{source}:{lineno}") for f in fields])
    if header is None:
        raise ConfigError("no header row", source)
    table = list(zip(*rows)) if rows else [()] * len(header)
    t = np.array(table[0], dtype=float)
    if np.any(np.diff(t) <= 0):
        raise NonMonotonicTimes(f"{source}: time column must increase strictly")
    columns: dict[str, NDArray] = {}
    for name, values in zip(header[1:], table[1:]):
        if name.endswith("_im") and name[:-3] in columns:
            columns[name[:-3]] = columns[name[:-3]] + 1j * np.array(values, dtype=float)
        elif all(isinstance(v, int) for v in values) and values:
            columns[name] = np.array(values, dtype=np.int64)
        else:
            columns[name] = np.array(values, dtype=float)
    return TimeSeries(t, columns, comments)


def read_series(path: str | Path) -> TimeSeries:
    path = Path(path)
    return parse_series(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class ColumnError:
    max_abs: float
    rmse: float


def compare_series(a: TimeSeries, b: TimeSeries, columns: Iterable[str]) -> dict[str, ColumnError]:
    """Per-column max-abs and RMS differences on a shared time grid.

    Grid points may differ only by floating-point noise (``GRID_SLACK``
    relative to the largest time); anything else is a GridMismatch.
    """
    if len(a.t) != len(b.t):
        raise GridMismatch(f"time grids differ in length ({len(a.t)} vs {len(b.t)})")
    scale = max(1.0, float(np.max(np.abs(a.t), initial=0.0)))
    if np.any(np.abs(a.t - b.t) > GRID_SLACK * scale):
        raise GridMismatch("time grids differ; resample before comparing")
    report = {}
    for name in columns:
        if name not in a or name not in b:
            missing = "first" if name not in a else "second"
            raise ConfigError(f"column {name!r} missing from the {missing} series")
        diff = np.abs(np.asarray(a[name]) - np.asarray(b[name]))
        report[name] = ColumnError(float(diff.max(initial=0.0)), float(np.sqrt(np.mean(diff**2))) if len(diff) else 0.0)
    return report


_NAMED = {"sx": SIGMA_X, "sy": SIGMA_Y, "sz": SIGMA_Z, "sp": SIGMA_PLUS, "sm": SIGMA_MINUS}
_RHO = re.compile(r"rho(\d)(\d)$")


def observable(name: str, dim: int) -> tuple[NDArray[np.complex128], bool]:
    """Operator for an observable name and whether only its modulus is wanted.

    Names: ``sx sy sz sp sm`` (dim 2), ``p<k>`` level projectors, ``id``,
    and ``rho<i><j>`` whose expectation is the matrix element ``rho_ij``.
    Indices count from 1. An ``abs_`` prefix asks for the modulus.
    """
    take_abs = name.startswith("abs_")
    base = name[4:] if take_abs else name
    if base in _NAMED:
        if dim != 2:
            raise DimensionMismatch(f"{base} needs dim 2")
        return _NAMED[base], take_abs
    if base == "id":
        return np.eye(dim, dtype=complex), take_abs
    if re.fullmatch(r"p\d+", base):
        k = int(base[1:]) - 1
        if not 0 <= k < dim:
            raise DimensionMismatch(f"projector {base} out of range for dim {dim}")
        op = np.zeros((dim, dim), dtype=complex)
        op[k, k] = 1
        return op, take_abs
    match = _RHO.match(base)
    if match:
        i, j = int(match[1]) - 1, int(match[2]) - 1
        if not (0 <= i < dim and 0 <= j < dim):
            raise DimensionMismatch(f"{base} out of range for dim {dim}")
        op = np.zeros((dim, dim), dtype=complex)
        op[j, i] = 1
        return op, take_abs
    raise ConfigError(f"unknown observable {name!r}")
