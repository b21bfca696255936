"""Counter-based random numbers: every draw is a pure function of its indices.

A uniform for ``(seed, step, member, *keys)`` comes from chaining a
splitmix64 finalizer over the indices, so no generator state is carried
between steps or threads. Binomial variates use the inverse CDF of that
uniform, which keeps results independent of how work is split up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import binom

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix(x: NDArray[np.uint64]) -> NDArray[np.uint64]:
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def _absorb(h: NDArray[np.uint64], value) -> NDArray[np.uint64]:
    return _mix(h ^ (np.asarray(value, dtype=np.uint64) + _GOLDEN))


@dataclass(frozen=True)
class StepRandomness:
    """Independent uniform substreams keyed by ``(step, member, *keys)``."""

    seed: int

    def uniforms(self, step: int, members: ArrayLike, *keys: ArrayLike) -> NDArray[np.float64]:
        """One uniform in ``(0, 1)`` per entry of ``members``.

        Keys are non-negative integers, scalar or broadcastable to ``members``.
        """
        members = np.asarray(members, dtype=np.uint64)
        with np.errstate(over="ignore"):
            h = _mix(np.full(members.shape, np.uint64(self.seed & _MASK64)) + _GOLDEN)
            h = _absorb(h, np.uint64(step))
            for k in keys:
                h = _absorb(h, np.asarray(k, dtype=np.uint64))
            h = _absorb(h, members)
        return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def binomial_from_uniform(u: ArrayLike, n: ArrayLike, p: ArrayLike) -> NDArray[np.int64]:
    """Inverse-CDF ``Binomial(n, p)`` sample for each uniform ``u``."""
    u, n, p = np.broadcast_arrays(np.asarray(u, float), np.asarray(n, np.int64), np.asarray(p, float))
    out = np.zeros(u.shape, dtype=np.int64)
    live = (n > 0) & (p > 0)
    if np.any(live):
        out[live] = binom.ppf(u[live], n[live], np.minimum(p[live], 1.0)).astype(np.int64)
    return out
