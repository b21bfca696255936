"""Dense complex linear-algebra primitives.

State vectors are 1-d complex arrays, operators and density matrices are
square 2-d complex arrays. Functions marked as batched also accept a stack
of vectors with shape ``(m, dim)`` and treat every row independently.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, NotHermitian, ZeroVector

ZERO_NORM = 1e-300
NONZERO_COMPONENT = 1e-12
HERMITIAN_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


def as_state(v: ArrayLike) -> NDArray[np.complex128]:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"a state vector must be 1-d and non-empty, got shape {arr.shape}")
    return arr


def as_operator(op: ArrayLike, dim: int | None = None) -> NDArray[np.complex128]:
    arr = np.asarray(op, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"an operator must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"operator has dim {arr.shape[0]}, expected {dim}")
    return arr


def normalize(v: ArrayLike) -> NDArray[np.complex128]:
    """Return ``v / ||v||`` as a new array (batched)."""
    arr = np.asarray(v, dtype=complex)
    norms = np.linalg.norm(arr, axis=-1, keepdims=True)
    if np.any(norms <= ZERO_NORM):
        raise ZeroVector("cannot normalize a vector of zero norm")
    return arr / norms


def apply(op: ArrayLike, v: ArrayLike) -> NDArray[np.complex128]:
    """Matrix-vector product ``op @ v`` (batched over leading axes of ``v``).

    The product is accumulated column by column with elementwise operations so
    that each row's result is independent of how a batch is chunked.
    """
    op = as_operator(op)
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != op.shape[1]:
        raise DimensionMismatch(f"operator dim {op.shape[1]} does not match vector dim {v.shape[-1]}")
    out = v[..., 0, None] * op[:, 0]
    for k in range(1, op.shape[1]):
        out = out + v[..., k, None] * op[:, k]
    return out


def canonical_phase(v: ArrayLike) -> NDArray[np.complex128]:
    """Remove the global phase so the first non-zero component is positive real.

    Batched: each row is rotated by its own phase. A component counts as
    non-zero when its modulus exceeds ``1e-12``.
    """
    arr = np.asarray(v, dtype=complex)
    single = arr.ndim == 1
    rows = np.atleast_2d(arr)
    mags = np.abs(rows)
    nonzero = mags > NONZERO_COMPONENT
    if not np.all(nonzero.any(axis=1)):
        raise ZeroVector("no component exceeds the non-zero threshold")
    k = nonzero.argmax(axis=1)
    idx = np.arange(rows.shape[0])
    pivot = rows[idx, k]
    out = rows * (np.conj(pivot) / mags[idx, k])[:, None]
    out[idx, k] = mags[idx, k]
    return out[0] if single else out


def is_hermitian(m: ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))), initial=0.0) <= tol)


def hermitian_eig2(m: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Closed-form eigendecomposition of 2x2 Hermitian matrices.

    Accepts a single matrix or a stack of shape ``(..., 2, 2)``. Returns
    eigenvalues in descending order and the unitary ``U`` whose columns are
    the matching eigenvectors, so that ``m = U diag(lam) U^dagger``. Each
    column is phased so its larger-magnitude component is positive real
    (ties favour the first component).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (2, 2):
        raise DimensionMismatch(f"expected 2x2 matrices, got shape {m.shape}")
    if not is_hermitian(m):
        raise NotHermitian("hermitian_eig2 requires a Hermitian matrix")
    a = m[..., 0, 0].real
    d = m[..., 1, 1].real
    b = 0.5 * (m[..., 0, 1] + np.conj(m[..., 1, 0]))
    mean = 0.5 * (a + d)
    half = 0.5 * (a - d)
    r = np.hypot(half, np.abs(b))
    lam = np.stack([mean + r, mean - r], axis=-1)

    # pick the cancellation-free form of the top eigenvector
    upper = half >= 0
    v0 = np.where(upper, r + half, b)
    v1 = np.where(upper, np.conj(b), r - half)
    degenerate = r == 0
    v0 = np.where(degenerate, 1.0, v0).astype(complex)
    v1 = np.where(degenerate, 0.0, v1).astype(complex)
    n = np.sqrt(np.abs(v0) ** 2 + np.abs(v1) ** 2)
    v0, v1 = v0 / n, v1 / n
    w0, w1 = -np.conj(v1), np.conj(v0)

    u = np.empty(m.shape, dtype=complex)
    u[..., 0, 0], u[..., 1, 0] = _fix_phase(v0, v1)
    u[..., 0, 1], u[..., 1, 1] = _fix_phase(w0, w1)
    return lam, u


def _fix_phase(x, y):
    pivot = np.where(np.abs(x) >= np.abs(y), x, y)
    rot = np.conj(pivot) / np.abs(pivot)
    x, y = x * rot, y * rot
    first = np.abs(x) >= np.abs(np.asarray(y))
    x = np.where(first, np.abs(x), x)
    y = np.where(first, y, np.abs(y))
    return x, y


def min_eigenvalue(rho: ArrayLike) -> float:
    """Smallest eigenvalue of a Hermitian matrix (full eigensolve)."""
    rho = as_operator(rho)
    if not is_hermitian(rho):
        raise NotHermitian("min_eigenvalue requires a Hermitian matrix")
    return float(np.linalg.eigvalsh(rho)[0])


def projector(v: ArrayLike) -> NDArray[np.complex128]:
    v = as_state(v)
    return np.outer(v, np.conj(v))


def dagger(op: ArrayLike) -> NDArray[np.complex128]:
    return np.conj(np.swapaxes(np.asarray(op), -1, -2))
