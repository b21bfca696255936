"""Central spin dephased by a thermal bath of N spins (ZZ coupling).

Rates and Lamb shift follow from the logarithmic derivative of the exact
coherence factor ``f(t)``; the generator is

    d rho/dt = -i [delta(t) sz, rho] + gamma(t) (sz rho sz - rho),

which gives ``rho_01(t) = rho_01(0) f(t)`` with diagonals frozen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core import SIGMA_Z, as_operator
from ..errors import DimensionMismatch
from .base import JumpChannel, LindbladModel, ModelSnapshot


@dataclass(frozen=True)
class SpinStarParams:
    alpha: float = 1.0
    n_spins: int = 4
    beta_omega: float = 2.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise ValueError("n_spins must be a positive integer")


# Rates and f(t) are evaluated in extended precision and rounded once, so the
# fixed constants sinh/cosh/tanh(bW) carry no double-precision bias that would
# put a ~1e-15 floor under integrator error studies.
_X = np.longdouble


def _ld(t):
    return np.asarray(t, dtype=float).astype(_X)


def lamb_shift(p: SpinStarParams, t):
    bw = _X(p.beta_omega)
    x = 4 * _X(p.alpha) * _ld(t)
    return (_X(p.alpha) * p.n_spins * np.sinh(-bw) / (np.cos(x) + np.cosh(-bw))).astype(float)


def dephasing_rate(p: SpinStarParams, t):
    x = 4 * _X(p.alpha) * _ld(t)
    return (_X(p.alpha) * p.n_spins * np.sin(x) / (np.cos(x) + np.cosh(-_X(p.beta_omega)))).astype(float)


def coherence_factor(p: SpinStarParams, t):
    """``(cos 2at - i tanh(-bW/2) sin 2at)^N``."""
    x = 2 * _X(p.alpha) * _ld(t)
    base = np.cos(x) - 1j * np.tanh(-_X(p.beta_omega) / 2) * np.sin(x)
    return (base ** int(p.n_spins)).astype(complex)


def spin_star_model(p: SpinStarParams) -> LindbladModel:
    def hamiltonian_at(t):
        return float(lamb_shift(p, t)) * SIGMA_Z

    def snapshot(t):
        return ModelSnapshot(hamiltonian_at(t), SIGMA_Z[None], np.array([float(dephasing_rate(p, t))]))

    channel = JumpChannel(lambda t: SIGMA_Z, lambda t: float(dephasing_rate(p, t)), name="sz")
    return LindbladModel(2, hamiltonian_at, (channel,), snapshot=snapshot, name="spin_star")


def spin_star_analytic(p: SpinStarParams, rho0: ArrayLike, t: float) -> NDArray[np.complex128]:
    """Exact reduced state at ``t`` given the state ``rho0`` at ``t = 0``."""
    rho0 = as_operator(rho0)
    if rho0.shape != (2, 2):
        raise DimensionMismatch("the spin-star model is two-dimensional")
    f = complex(coherence_factor(p, t))
    rho = rho0.copy()
    rho[0, 1] *= f
    rho[1, 0] *= np.conj(f)
    return rho
