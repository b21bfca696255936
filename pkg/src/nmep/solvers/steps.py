"""Single time steps of the MCWF, NMEP and NMQJ unravelings.

All three share the forward branching of a member into its deterministic
successor ``(1 - i H_eff dt) psi`` and its jump states ``A_l psi``. The
number of copies routed into jump state ``l`` is drawn as

    sgn(N_a gamma_l) * Binomial(|N_a|, dt |gamma_l| ||A_l psi||^2)

and the deterministic branch keeps the remainder, so the total count is
conserved exactly. Channels whose operators are identical at time ``t``
share one uniform per member and pool their jump counts, which makes a
pair of channels with opposite rates cancel exactly instead of only on
average.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree

from ..core import apply, as_state, canonical_phase, normalize
from ..ensemble import DEFAULT_TOL, EnsembleMember, SignedEnsemble, consolidate
from ..errors import InvalidEnsemble, NegativeRate, ReverseTargetMissing, StepTooLarge
from ..models.base import JumpChannel, LindbladModel, ModelSnapshot
from .random import StepRandomness, binomial_from_uniform

MAX_JUMP_PROBABILITY = 0.1
PARALLEL_THRESHOLD = 1024


def _state_of(member) -> NDArray[np.complex128]:
    return as_state(member.state if isinstance(member, EnsembleMember) else member)


def jump_probability(member, channel: JumpChannel, t: float, dt: float) -> float:
    """``dt |gamma(t)| ||A(t) psi||^2`` for one member (state or EnsembleMember)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    gamma = float(channel.rate_at(t))
    if gamma == 0.0:
        return 0.0
    v = apply(channel.operator_at(t), _state_of(member))
    p = dt * abs(gamma) * float(np.vdot(v, v).real)
    if p > MAX_JUMP_PROBABILITY:
        raise StepTooLarge(f"jump probability {p:.3g} exceeds {MAX_JUMP_PROBABILITY}; reduce dt")
    return p


def deterministic_successor(member, model: LindbladModel, t: float, dt: float) -> NDArray[np.complex128]:
    """Normalized first-order no-jump update ``(1 - i H_eff(t) dt) psi``."""
    psi = _state_of(member)
    heff = model.at(t).effective_hamiltonian
    return normalize(psi - 1j * dt * apply(heff, psi))


def jump_successor(member, channel: JumpChannel, t: float) -> NDArray[np.complex128]:
    """Normalized jump state ``A(t) psi``; ZeroVector if A annihilates psi."""
    return normalize(apply(channel.operator_at(t), _state_of(member)))


def channel_keys(operators: NDArray[np.complex128]) -> list[int]:
    """Random-substream key per channel: the first channel with an identical operator."""
    keys = []
    for l, a in enumerate(operators):
        keys.append(next(k for k in range(l + 1) if np.array_equal(operators[k], a)))
    return keys


class _Branches:
    """Forward branching of a block of members (rows ``offset`` onwards).

    With ``exclusive`` each copy jumps through at most one channel: the
    counts are drawn as a multinomial by sequential conditional binomials,
    so every channel's marginal is still ``Binomial(|N|, P_l)``.
    """

    def __init__(self, psi, counts, snap: ModelSnapshot, heff, dt, rnd, step, offset, keys, active, exclusive):
        self.det = normalize(psi - 1j * dt * apply(heff, psi))
        self.det_counts = counts.copy()
        self.jump_states, self.jump_counts, self.weights = [], [], []
        index = np.arange(offset, offset + len(counts), dtype=np.int64)
        # channels sharing an operator pool their draws under the first such channel
        pooled = {}
        images = []
        n_left = np.abs(counts)
        p_left = np.ones(len(counts))
        for l, (a, gamma) in enumerate(zip(snap.operators, snap.rates)):
            apsi = apply(a, psi)
            images.append(apsi)
            w = np.einsum("mi,mi->m", apsi.real, apsi.real) + np.einsum("mi,mi->m", apsi.imag, apsi.imag)
            self.weights.append(w)
            if gamma == 0.0 or not active[l]:
                continue
            p = dt * abs(gamma) * w
            worst = int(np.argmax(p))
            if p[worst] > MAX_JUMP_PROBABILITY:
                raise StepTooLarge(
                    f"jump probability {p[worst]:.3g} on channel {l} (member {offset + worst}) "
                    f"exceeds {MAX_JUMP_PROBABILITY}; reduce dt"
                )
            u = rnd.uniforms(step, index, keys[l])
            if exclusive:
                k = binomial_from_uniform(u, n_left, np.minimum(p / p_left, 1.0))
                n_left = n_left - k
                p_left = p_left - p
                k = k * np.sign(counts)
            else:
                k = binomial_from_uniform(u, np.abs(counts), p) * np.sign(counts) * int(np.sign(gamma))
            self.det_counts -= k
            pooled[keys[l]] = pooled.get(keys[l], 0) + k
        for l, apsi in enumerate(images):
            k = pooled.get(l)
            if k is None:
                self.jump_states.append(apsi[:0])
                self.jump_counts.append(counts[:0])
                continue
            hit = k != 0
            self.jump_states.append(normalize(apsi[hit]))
            self.jump_counts.append(k[hit])


def _branch(e: SignedEnsemble, snap: ModelSnapshot, dt, rnd, step, active, pool=None, exclusive=False):
    """Branch every member; with a thread pool, large ensembles are split into row blocks.

    Each row's arithmetic and random draws depend only on that row, so the
    result is bit-identical for any block split.
    """
    heff = snap.effective_hamiltonian
    keys = list(range(len(snap.rates))) if exclusive else channel_keys(snap.operators)
    m = len(e)
    workers = getattr(pool, "_max_workers", 1) if pool is not None else 1
    if workers > 1 and m >= PARALLEL_THRESHOLD:
        bounds = np.linspace(0, m, workers + 1).astype(int)
        spans = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        blocks = list(
            pool.map(
                lambda ab: _Branches(
                    e.states[ab[0] : ab[1]], e.counts[ab[0] : ab[1]], snap, heff, dt, rnd, step, ab[0], keys, active, exclusive
                ),
                spans,
            )
        )
    else:
        blocks = [_Branches(e.states, e.counts, snap, heff, dt, rnd, step, 0, keys, active, exclusive)]
    det = np.concatenate([b.det for b in blocks])
    det_counts = np.concatenate([b.det_counts for b in blocks])
    n_ch = len(snap.rates)
    jumps = [np.concatenate([b.jump_states[l] for b in blocks]) for l in range(n_ch)]
    jump_counts = [np.concatenate([b.jump_counts[l] for b in blocks]) for l in range(n_ch)]
    weights = [np.concatenate([b.weights[l] for b in blocks]) for l in range(n_ch)]
    return det, det_counts, jumps, jump_counts, weights


def _assemble(total, det, det_counts, jumps, jump_counts) -> SignedEnsemble:
    keep = det_counts != 0
    states = np.concatenate([det[keep], *jumps])
    counts = np.concatenate([det_counts[keep], *jump_counts])
    return SignedEnsemble(states, counts, total)


def nmep_step(
    e: SignedEnsemble,
    m: LindbladModel,
    t: float,
    dt: float,
    rnd: StepRandomness,
    *,
    step: int = 0,
    tol: float | None = DEFAULT_TOL,
    pool=None,
) -> SignedEnsemble:
    """Advance a signed ensemble by one step; ``tol=None`` skips consolidation."""
    return _forward_step(e, m.at(t), dt, rnd, step, tol, pool)


def _forward_step(e, snap, dt, rnd, step, tol, pool=None, exclusive=False):
    det, det_counts, jumps, jump_counts, _ = _branch(e, snap, dt, rnd, step, [True] * len(snap.rates), pool, exclusive)
    out = _assemble(e.total, det, det_counts, jumps, jump_counts)
    return out if tol is None else consolidate(out, tol)


def _check_rates(snap: ModelSnapshot, t: float):
    for l, gamma in enumerate(snap.rates):
        if gamma < 0:
            raise NegativeRate(l, float(gamma), t)


def mcwf_step(
    e: SignedEnsemble,
    m: LindbladModel,
    t: float,
    dt: float,
    rnd: StepRandomness,
    *,
    step: int = 0,
    tol: float | None = DEFAULT_TOL,
    pool=None,
) -> SignedEnsemble:
    """Markovian jump step; refuses negative rates instead of handling them."""
    snap = m.at(t)
    _check_rates(snap, t)
    return _forward_step(e, snap, dt, rnd, step, tol, pool, exclusive=True)


def nmqj_step(
    e: SignedEnsemble,
    m: LindbladModel,
    t: float,
    dt: float,
    rnd: StepRandomness,
    *,
    step: int = 0,
    tol: float = DEFAULT_TOL,
    pool=None,
) -> SignedEnsemble:
    """Non-Markovian quantum jumps: negative channels act as reverse jumps.

    For a negative channel ``l`` every member ``a'`` with ``A_l psi_a' != 0``
    needs a target member equal (up to phase, within ``tol``) to its jump
    state. Copies of the target return to the deterministic successor of
    ``a'`` with probability ``(N_a'/N_a) |gamma_l| dt ||A_l psi_a'||^2``.
    When several sources share a target, their transfers are drawn as a
    multinomial through sequential conditional binomials, largest source
    count first. A missing target ends the run with ReverseTargetMissing.
    """
    if np.any(e.counts <= 0):
        raise InvalidEnsemble("NMQJ works with positive counts only")
    snap = m.at(t)
    active = [g > 0 for g in snap.rates]
    det, det_counts, jumps, jump_counts, weights = _branch(e, snap, dt, rnd, step, active, pool, exclusive=True)

    negative = [l for l, g in enumerate(snap.rates) if g < 0]
    if negative:
        canon = canonical_phase(e.states)
        tree = cKDTree(np.concatenate([canon.real, canon.imag], axis=1))
        n_ch = len(snap.rates)
        # (target, channel, source, probability)
        links = []
        for l in negative:
            gamma = abs(float(snap.rates[l]))
            for src in np.flatnonzero(gamma * dt * weights[l] > 0):
                image = canonical_phase(normalize(apply(snap.operators[l], e.states[src])))
                dist, tgt = tree.query(np.concatenate([image.real, image.imag]))
                if not dist < tol:
                    raise ReverseTargetMissing(l, int(src), t)
                p = e.counts[src] / e.counts[tgt] * gamma * dt * weights[l][src]
                links.append((int(tgt), l, int(src), float(p)))
        links.sort(key=lambda x: (x[0], x[1], -int(e.counts[x[2]]), x[2]))
        start = 0
        while start < len(links):
            tgt = links[start][0]
            stop = start
            while stop < len(links) and links[stop][0] == tgt:
                stop += 1
            group = links[start:stop]
            total_p = sum(g[3] for g in group)
            if total_p > MAX_JUMP_PROBABILITY:
                raise StepTooLarge(f"reverse-jump probability {total_p:.3g} into member {tgt} exceeds {MAX_JUMP_PROBABILITY}")
            u = rnd.uniforms(step, np.full(len(group), tgt), [n_ch + g[1] for g in group], [g[2] for g in group])
            remaining = max(int(det_counts[tgt]), 0)
            left = 1.0
            for (_, _, src, p), ui in zip(group, u):
                k = int(binomial_from_uniform(ui, remaining, min(p / left, 1.0)))
                left -= p
                remaining -= k
                det_counts[tgt] -= k
                det_counts[src] += k
            start = stop

    out = _assemble(e.total, det, det_counts, jumps, jump_counts)
    out = consolidate(out, tol)
    if np.any(out.counts < 0):
        raise InvalidEnsemble("NMQJ step produced a negative count")
    return out

