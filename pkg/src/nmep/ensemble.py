"""Signed ensembles of pure states with integer occupation counts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .core import as_operator, canonical_phase, normalize
from .errors import DimensionMismatch, EmptyEnsemble, InvalidEnsemble

DEFAULT_TOL = 1e-6


class EnsembleMember(NamedTuple):
    state: NDArray[np.complex128]
    count: int


@dataclass(frozen=True, eq=False)
class SignedEnsemble:
    """Pure states stored row-wise with signed integer counts.

    ``states`` has shape ``(m, dim)`` and ``counts`` shape ``(m,)``. The counts
    always sum to ``total``; row order is the insertion order used for
    tie-breaking and for deriving random substreams.
    """

    states: NDArray[np.complex128]
    counts: NDArray[np.int64]
    total: int

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        counts = np.asarray(self.counts, dtype=np.int64)
        if states.ndim != 2 or counts.shape != (states.shape[0],):
            raise InvalidEnsemble(f"states {states.shape} and counts {counts.shape} do not line up")
        if self.total < 1:
            raise InvalidEnsemble("total count must be positive")
        if int(counts.sum()) != self.total:
            raise InvalidEnsemble(f"counts sum to {int(counts.sum())}, expected {self.total}")
        states.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_members(cls, members: Iterable[tuple[ArrayLike, int]], total: int | None = None) -> SignedEnsemble:
        members = list(members)
        if not members:
            raise EmptyEnsemble("an ensemble needs at least one member")
        states = normalize(np.array([np.asarray(s, dtype=complex) for s, _ in members]))
        counts = np.array([int(c) for _, c in members], dtype=np.int64)
        return cls(states, counts, int(counts.sum()) if total is None else total)

    @classmethod
    def pure(cls, state: ArrayLike, n: int) -> SignedEnsemble:
        return cls.from_members([(state, n)])

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def members(self) -> list[EnsembleMember]:
        return [EnsembleMember(s.copy(), int(c)) for s, c in zip(self.states, self.counts)]

    def __len__(self) -> int:
        return self.states.shape[0]


def density_matrix(e: SignedEnsemble) -> NDArray[np.complex128]:
    """``(1/N) sum_a N_a |psi_a><psi_a|``, Hermitian by symmetrization."""
    if len(e) == 0:
        raise EmptyEnsemble("density of an empty ensemble")
    psi = e.states
    outer = e.counts[:, None, None] * (psi[:, :, None] * np.conj(psi[:, None, :]))
    rho = outer.sum(axis=0) / e.total
    return 0.5 * (rho + np.conj(rho.T))


def expectation(e: SignedEnsemble, obs: ArrayLike) -> complex:
    """``(1/N) sum_a N_a <psi_a|obs|psi_a>``."""
    if len(e) == 0:
        raise EmptyEnsemble("expectation over an empty ensemble")
    obs = as_operator(obs)
    if obs.shape[0] != e.dim:
        raise DimensionMismatch(f"observable dim {obs.shape[0]} vs ensemble dim {e.dim}")
    psi = e.states
    values = np.einsum("mi,ij,mj->m", np.conj(psi), obs, psi)
    return complex(np.sum(e.counts * values) / e.total)


def consolidate(e: SignedEnsemble, tol: float = DEFAULT_TOL) -> SignedEnsemble:
    """Merge members equal up to a global phase and drop zero counts.

    States are phase-canonicalized, then members whose canonical states lie
    closer than ``tol`` (Euclidean) are merged transitively. A merged group
    keeps the state of its member with the largest ``|count|`` (earliest
    member on ties) and sits at the position of its earliest member.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    states = canonical_phase(e.states)
    counts = e.counts
    labels, n_groups = _group(states, tol)
    if n_groups == len(e):
        keep = counts != 0
        return SignedEnsemble(states[keep], counts[keep], e.total)

    sums = np.zeros(n_groups, dtype=np.int64)
    np.add.at(sums, labels, counts)
    # representative: largest |count|, then earliest index
    order = np.lexsort((np.arange(len(e)), -np.abs(counts), labels))
    first_of_label = np.ones(len(order), dtype=bool)
    first_of_label[1:] = labels[order][1:] != labels[order][:-1]
    rep = np.empty(n_groups, dtype=np.intp)
    rep[labels[order][first_of_label]] = order[first_of_label]
    earliest = np.full(n_groups, len(e), dtype=np.intp)
    np.minimum.at(earliest, labels, np.arange(len(e)))

    position = np.argsort(earliest, kind="stable")
    position = position[sums[position] != 0]
    return SignedEnsemble(states[rep[position]], sums[position], e.total)


def _group(states: NDArray[np.complex128], tol: float) -> tuple[NDArray[np.intp], int]:
    """Connected components of the ``distance < tol`` graph over rows."""
    m = states.shape[0]
    if m <= 1:
        return np.zeros(m, dtype=np.intp), m
    points = np.ascontiguousarray(np.concatenate([states.real, states.imag], axis=1))
    # bitwise duplicates are common; fold them before the neighbour search
    uniq, first, inverse = np.unique(points, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    if uniq.shape[0] > 1:
        pairs = cKDTree(uniq).query_pairs(tol, output_type="ndarray")
        if len(pairs):
            dist = np.linalg.norm(uniq[pairs[:, 0]] - uniq[pairs[:, 1]], axis=1)
            pairs = pairs[dist < tol]
    else:
        pairs = np.empty((0, 2), dtype=np.intp)
    k = uniq.shape[0]
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(k, k))
    n_groups, uniq_labels = connected_components(graph, directed=False)
    # relabel so label order follows first appearance
    first_seen = np.full(n_groups, m, dtype=np.intp)
    np.minimum.at(first_seen, uniq_labels, first)
    relabel = np.empty(n_groups, dtype=np.intp)
    relabel[np.argsort(first_seen, kind="stable")] = np.arange(n_groups)
    return relabel[uniq_labels][inverse], n_groups

