from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.typing import NDArray

from ..core import as_operator, dagger
from ..errors import DimensionMismatch


@dataclass(frozen=True)
class JumpChannel:
    """Jump operator ``A(t)`` with signed rate ``gamma(t)``."""

    operator_at: Callable[[float], NDArray[np.complex128]]
    rate_at: Callable[[float], float]
    name: str = ""


class ModelSnapshot(NamedTuple):
    """Everything a stepper needs at one instant."""

    hamiltonian: NDArray[np.complex128]
    operators: NDArray[np.complex128]  # (n_channels, dim, dim)
    rates: NDArray[np.float64]

    @property
    def effective_hamiltonian(self) -> NDArray[np.complex128]:
        heff = self.hamiltonian.astype(complex)
        for gamma, a in zip(self.rates, self.operators):
            if gamma != 0.0:
                heff = heff - 0.5j * gamma * (dagger(a) @ a)
        return heff


@dataclass(frozen=True)
class LindbladModel:
    """Time-local master equation ``H_S(t)`` plus channels ``(A_l(t), gamma_l(t))``.

    ``snapshot`` may be supplied by models that compute all channels jointly
    (e.g. from one eigendecomposition); otherwise it is assembled from the
    per-channel callables.
    """

    dim: int
    hamiltonian_at: Callable[[float], NDArray[np.complex128]]
    channels: Sequence[JumpChannel] = ()
    snapshot: Callable[[float], ModelSnapshot] | None = field(default=None, repr=False)
    name: str = "model"

    def at(self, t: float) -> ModelSnapshot:
        if self.snapshot is not None:
            return self.snapshot(t)
        h = as_operator(self.hamiltonian_at(t), self.dim)
        if self.channels:
            ops = np.stack([as_operator(ch.operator_at(t), self.dim) for ch in self.channels])
            rates = np.array([float(ch.rate_at(t)) for ch in self.channels])
        else:
            ops = np.zeros((0, self.dim, self.dim), dtype=complex)
            rates = np.zeros(0)
        return ModelSnapshot(h, ops, rates)


def effective_hamiltonian(m: LindbladModel, t: float) -> NDArray[np.complex128]:
    """``H_S(t) - (i/2) sum_l gamma_l(t) A_l^dagger(t) A_l(t)``."""
    return m.at(t).effective_hamiltonian


def constant_model(hamiltonian, channels: Sequence[tuple[object, float]] = (), name: str = "constant") -> LindbladModel:
    """Time-independent model from a Hamiltonian and ``(operator, rate)`` pairs."""
    h = as_operator(hamiltonian)
    dim = h.shape[0]
    chans = []
    for k, (op, rate) in enumerate(channels):
        op = as_operator(op)
        if op.shape[0] != dim:
            raise DimensionMismatch(f"channel {k} has dim {op.shape[0]}, expected {dim}")
        chans.append(JumpChannel(lambda t, op=op: op, lambda t, rate=float(rate): rate, name=f"c{k}"))
    ops = np.stack([c.operator_at(0.0) for c in chans]) if chans else np.zeros((0, dim, dim), complex)
    rates = np.array([c.rate_at(0.0) for c in chans])
    snap = ModelSnapshot(h, ops, rates)
    return LindbladModel(dim, lambda t: h, tuple(chans), snapshot=lambda t: snap, name=name)
