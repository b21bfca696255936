"""Transmon qubit under 1/f^alpha noise, in dimensionless time ``s``.

The coefficient matrix of the master equation is diagonalized at every
instant; one eigen-rate is positive and the other negative for all
``s > 0``. Time-dependent integrals

    f_cos(x) = int_0^x alpha w^(alpha-1) cos(w) dw
    f_sin(x) = int_0^x alpha w^(alpha-1) sin(w) dw

are tabulated once on a uniform grid and interpolated linearly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray
from scipy.special import gamma as gamma_fn

from ..core import SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, hermitian_eig2
from ..errors import InvalidExponent, OutOfTableRange
from .base import JumpChannel, LindbladModel, ModelSnapshot

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
GRADED_PANELS = 32
LADDER = np.stack([SIGMA_PLUS, SIGMA_MINUS])


@dataclass(frozen=True)
class TransmonParams:
    alpha: float = 0.9
    c: float = 1e-4
    s_max: float = 2.0
    table_points: int = 40_001

    def __post_init__(self):
        _check_exponent(self.alpha)
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not self.s_max > 0:
            raise ValueError("s_max must be positive")
        if self.table_points < 1000:
            raise ValueError("table_points must be at least 1000")


def _check_exponent(alpha):
    if not 0 < alpha < 2:
        raise InvalidExponent(f"spectral exponent must lie in (0, 2), got {alpha!r}")


def _gauss_legendre(lo, hi, alpha):
    """Integrals of ``alpha w^(alpha-1) (cos w, sin w)`` over panels ``[lo, hi]``."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    w = mid[:, None] + half[:, None] * GL_NODES
    weight = half[:, None] * GL_WEIGHTS * alpha * w ** (alpha - 1)
    return (weight * np.cos(w)).sum(axis=1), (weight * np.sin(w)).sum(axis=1)


def oscillatory_integrals(x: NDArray[np.float64], alpha: float) -> tuple[NDArray, NDArray]:
    """Cumulative ``(f_cos, f_sin)`` on an increasing grid starting at 0.

    Composite 16-point Gauss-Legendre per grid interval. The first interval
    carries the ``w^(alpha-1)`` endpoint singularity and is split into
    panels graded quadratically towards ``w = 0``; the innermost panel is
    integrated in ``u = w^alpha`` instead.
    """
    x = np.asarray(x, dtype=float)
    if x[0] != 0.0 or np.any(np.diff(x) <= 0):
        raise ValueError("grid must start at 0 and increase strictly")
    fc = np.zeros_like(x)
    fs = np.zeros_like(x)
    if x.size == 1:
        return fc, fs
    edges = (np.arange(GRADED_PANELS + 1) / GRADED_PANELS) ** 2 * x[1]
    c0, s0 = _gauss_legendre(edges[1:-1], edges[2:], alpha)
    # innermost panel in u = w^alpha, where the integrand cos/sin(u^(1/alpha)) is bounded
    half = 0.5 * edges[1] ** alpha
    w = (half * (1 + GL_NODES)) ** (1 / alpha)
    c0 = np.concatenate([[half * GL_WEIGHTS @ np.cos(w)], c0])
    s0 = np.concatenate([[half * GL_WEIGHTS @ np.sin(w)], s0])
    ci, si = _gauss_legendre(x[1:-1], x[2:], alpha)
    fc[1:] = np.cumsum(np.concatenate([[c0.sum()], ci]))
    fs[1:] = np.cumsum(np.concatenate([[s0.sum()], si]))
    return fc, fs


@dataclass(frozen=True)
class TransmonTables:
    """Tabulated ``f_cos`` / ``f_sin`` on ``x in [0, 2 pi s_max]``."""

    params: TransmonParams
    x: NDArray[np.float64] = field(repr=False)
    fcos: NDArray[np.float64] = field(repr=False)
    fsin: NDArray[np.float64] = field(repr=False)

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    def _lookup(self, table, x):
        x = np.asarray(x, dtype=float)
        slack = 1e-12 * max(1.0, self.x_max)
        if np.any(x < -slack) or np.any(x > self.x_max + slack):
            raise OutOfTableRange(f"x outside the tabulated range [0, {self.x_max}]")
        return np.interp(x, self.x, table)

    def f_cos(self, x):
        return self._lookup(self.fcos, x)

    def f_sin(self, x):
        return self._lookup(self.fsin, x)


def transmon_tables(p: TransmonParams) -> TransmonTables:
    _check_exponent(p.alpha)
    x = np.linspace(0.0, 2 * np.pi * p.s_max, p.table_points)
    fc, fs = oscillatory_integrals(x, p.alpha)
    for arr in (x, fc, fs):
        arr.setflags(write=False)
    return TransmonTables(p, x, fc, fs)


def transmon_rates(tables: TransmonTables, s):
    """``(gamma_plus, gamma_minus, omega_ls)`` at dimensionless time ``s``.

    Diverges at ``alpha = 1`` (pole of the gamma function), where
    :class:`InvalidExponent` is raised.
    """
    a = tables.params.alpha
    if a == 1.0:
        raise InvalidExponent("coefficients diverge at alpha = 1")
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > tables.params.s_max * (1 + 1e-12)):
        raise OutOfTableRange(f"s outside [0, {tables.params.s_max}]")
    fc = tables.f_cos(2 * np.pi * s)
    fs = tables.f_sin(2 * np.pi * s)
    pref = 2 * gamma_fn(a - 1) / a
    sp, cp = np.sin(np.pi * a / 2), np.cos(np.pi * a / 2)
    return pref * (sp * fc + cp * fs), pref * (sp * fc - cp * fs), pref * sp * fs


def coefficient_matrix(gp, gm, omega):
    gp, gm, omega = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (gp, gm, omega)))
    d = np.empty(gp.shape + (2, 2), dtype=complex)
    off = -(gp + gm) / 2
    d[..., 0, 0] = gp
    d[..., 1, 1] = gm
    d[..., 0, 1] = off - 1j * omega
    d[..., 1, 0] = off + 1j * omega
    return d


def _align(ref, u, lam):
    """Reorder and rephase columns of ``u`` to follow ``ref`` continuously."""
    overlap = np.conj(ref).T @ u
    if abs(overlap[0, 1]) + abs(overlap[1, 0]) > abs(overlap[0, 0]) + abs(overlap[1, 1]):
        u = u[:, ::-1]
        lam = lam[::-1]
        overlap = overlap[:, ::-1]
    diag = np.diag(overlap)
    mag = np.abs(diag)
    phase = np.where(mag > 0, np.conj(diag) / np.where(mag > 0, mag, 1), 1)
    return u * phase, lam


class TransmonModel:
    """Builds the two-channel model and keeps eigen-branches continuous.

    Branch continuity is resolved once along the table grid at construction
    time; evaluation at any ``s`` aligns the instantaneous eigenvectors to
    the grid node just below ``s``, so evaluation is a pure function of ``s``.
    """

    def __init__(self, params: TransmonParams):
        if params.alpha == 1.0:
            raise InvalidExponent("coefficients diverge at alpha = 1")
        self.params = params
        self.tables = transmon_tables(params)
        self.s_nodes = self.tables.x / (2 * np.pi)
        self._u_nodes = self._track_branches()

    def _track_branches(self):
        gp, gm, om = transmon_rates(self.tables, self.s_nodes)
        lam, u = hermitian_eig2(coefficient_matrix(gp, gm, om))
        n = len(self.s_nodes)
        # node 0 is degenerate (all coefficients vanish); start at node 1
        prev, cur = u[1:-1], u[2:]
        ov = np.einsum("nki,nkj->nij", np.conj(prev), cur)
        swap = np.abs(ov[:, 0, 1]) + np.abs(ov[:, 1, 0]) > np.abs(ov[:, 0, 0]) + np.abs(ov[:, 1, 1])
        parity = np.concatenate([[False], np.cumsum(swap) % 2 == 1])
        u = u.copy()
        u[1:][parity] = u[1:][parity][:, :, ::-1]
        ov = np.einsum("nki,nki->ni", np.conj(u[1:-1]), u[2:])
        theta = np.concatenate([np.zeros((1, 2)), np.cumsum(np.angle(ov), axis=0)])
        u[1:] = u[1:] * np.exp(-1j * theta)[:, None, :]
        u[0] = u[1]
        u.setflags(write=False)
        assert u.shape[0] == n
        return u

    @cached_property
    def rates_on_grid(self):
        """Effective channel rates at every table node (for inspection)."""
        gp, gm, om = transmon_rates(self.tables, self.s_nodes)
        d = coefficient_matrix(gp, gm, om)
        lam = np.einsum("nki,nkl,nli->ni", np.conj(self._u_nodes), d, self._u_nodes).real
        return 2 * self.params.c * lam

    def node_unitary(self, j: int) -> NDArray[np.complex128]:
        return self._u_nodes[j]

    def channels(self, s: float):
        """``(rates, operators, hamiltonian)`` at dimensionless time ``s``."""
        gp, gm, om = (float(v) for v in transmon_rates(self.tables, s))
        lam, u = hermitian_eig2(coefficient_matrix(gp, gm, om))
        h = (len(self.s_nodes) - 1) / self.params.s_max
        j = min(int(np.floor(s * h)), len(self.s_nodes) - 1)
        u, lam = _align(self._u_nodes[j], u, lam)
        rates = 2 * self.params.c * lam
        # (A_1, A_2) = U^T (sigma_+, sigma_-)
        ops = np.einsum("km,kij->mij", u, LADDER)
        hamiltonian = -(np.pi + self.params.c * om) * SIGMA_Z
        return rates, ops, hamiltonian

    def snapshot(self, s: float) -> ModelSnapshot:
        rates, ops, h = self.channels(s)
        return ModelSnapshot(h, ops, rates)

    def as_model(self) -> LindbladModel:
        chans = tuple(
            JumpChannel(lambda s, m=m: self.channels(s)[1][m], lambda s, m=m: float(self.channels(s)[0][m]), name=f"A{m + 1}")
            for m in range(2)
        )
        return LindbladModel(2, lambda s: self.channels(s)[2], chans, snapshot=self.snapshot, name="transmon")


def transmon_model(p: TransmonParams) -> LindbladModel:
    return TransmonModel(p).as_model()


def transmon_channels(model: TransmonModel, s: float):
    return model.channels(s)
