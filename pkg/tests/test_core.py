import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nmep.core import (
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    apply,
    canonical_phase,
    hermitian_eig2,
    min_eigenvalue,
    normalize,
    projector,
)
from nmep.errors import DimensionMismatch, NotHermitian, ZeroVector

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complex_vectors = st.integers(1, 4).flatmap(
    lambda d: arrays(np.complex128, d, elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
).filter(lambda v: np.linalg.norm(v) > 1e-3)


class TestNormalize:
    def test_unit_vector_is_unchanged(self):
        assert np.allclose(normalize([1, 0]), [1, 0])

    def test_diagonal(self):
        assert np.allclose(normalize([1, 1]), [1 / np.sqrt(2)] * 2)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            normalize([0, 0])

    def test_input_untouched(self):
        v = np.array([3.0 + 0j, 4.0])
        normalize(v)
        assert v.tolist() == [3, 4]

    @given(complex_vectors)
    def test_idempotent(self, v):
        once = normalize(v)
        assert abs(np.linalg.norm(once) - 1) < 1e-12
        assert np.max(np.abs(normalize(once) - once)) < 1e-12


class TestApply:
    def test_identity(self):
        v = np.array([0.3 + 0.1j, -0.2])
        assert np.allclose(apply(np.eye(2), v), v)

    def test_sigma_z_flips_lower_component(self):
        assert np.allclose(apply(SIGMA_Z, [2, 5j]), [2, -5j])

    def test_raising_operator(self):
        assert np.allclose(apply(SIGMA_PLUS, [0, 1]), [1, 0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply(np.eye(3), [1, 0])

    def test_batch_rows_match_single_products(self, rng):
        op = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        vs = rng.normal(size=(7, 3)) + 1j * rng.normal(size=(7, 3))
        batch = apply(op, vs)
        for row, v in zip(batch, vs):
            assert np.allclose(row, op @ v, atol=1e-14)
        # chunking must not change any bit
        assert np.array_equal(np.concatenate([apply(op, vs[:3]), apply(op, vs[3:])]), batch)


class TestCanonicalPhase:
    def test_removes_global_phase(self):
        assert np.allclose(canonical_phase([0, 1j]), [0, 1])

    def test_already_canonical(self):
        v = np.array([1, 1j]) / np.sqrt(2)
        assert np.allclose(canonical_phase(v), v)

    def test_sign_flip(self):
        assert np.allclose(canonical_phase(np.array([-1, 1]) / np.sqrt(2)), np.array([1, -1]) / np.sqrt(2))

    def test_tiny_leading_component_skipped(self):
        out = canonical_phase([1e-13, 1j])
        assert out[1] == 1.0

    def test_all_tiny_rejected(self):
        with pytest.raises(ZeroVector):
            canonical_phase([1e-13, 0])

    @given(complex_vectors)
    def test_moduli_and_projector_preserved(self, v):
        v = normalize(v)
        if np.all(np.abs(v) <= 1e-12):
            return
        c = canonical_phase(v)
        assert np.max(np.abs(np.abs(c) - np.abs(v))) <= 1e-12
        assert np.max(np.abs(projector(c) - projector(v))) <= 1e-12
        k = np.argmax(np.abs(v) > 1e-12)
        assert c[k].imag == 0 and c[k].real > 0


class TestHermitianEig2:
    def test_identity(self):
        lam, u = hermitian_eig2(np.eye(2))
        assert np.allclose(lam, [1, 1]) and np.allclose(u, np.eye(2))

    def test_sigma_x(self):
        lam, u = hermitian_eig2(SIGMA_X)
        assert np.allclose(lam, [1, -1])
        assert np.allclose(np.abs(u[:, 0]), [1 / np.sqrt(2)] * 2)
        assert np.allclose(u[:, 0], [1, 1] / np.sqrt(2)) or np.allclose(u[:, 0], [-1, -1] / np.sqrt(2))

    def test_diagonal_is_sorted(self):
        lam, u = hermitian_eig2(np.diag([2.0, -3.0]))
        assert np.allclose(lam, [2, -3]) and np.allclose(u, np.eye(2))

    def test_reversed_diagonal(self):
        lam, u = hermitian_eig2(np.diag([-3.0, 2.0]))
        assert np.allclose(lam, [2, -3])
        assert np.allclose(np.abs(u), [[0, 1], [1, 0]])

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig2([[0, 1], [0, 0]])

    def test_reconstruction_on_random_matrices(self, rng):
        a, d = rng.uniform(-10, 10, size=(2, 1000))
        b = rng.uniform(-10, 10, 1000) + 1j * rng.uniform(-10, 10, 1000)
        m = np.empty((1000, 2, 2), dtype=complex)
        m[:, 0, 0], m[:, 1, 1], m[:, 0, 1], m[:, 1, 0] = a, d, b, np.conj(b)
        lam, u = hermitian_eig2(m)
        rebuilt = np.einsum("nij,nj,nkj->nik", u, lam, np.conj(u))
        assert np.max(np.abs(rebuilt - m)) <= 1e-10
        assert np.all(lam[:, 0] >= lam[:, 1])
        assert np.allclose(np.einsum("nki,nkj->nij", np.conj(u), u), np.eye(2), atol=1e-12)
        # phase convention: larger-magnitude entry of each column is positive real
        for col in range(2):
            c = u[:, :, col]
            big = np.where(np.abs(c[:, 0]) >= np.abs(c[:, 1]), c[:, 0], c[:, 1])
            assert np.all(np.abs(big.imag) < 1e-12) and np.all(big.real > 0)

    def test_matches_numpy_spectrum(self, rng):
        for _ in range(50):
            x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            m = x + x.conj().T
            lam, _ = hermitian_eig2(m)
            assert np.allclose(lam, np.linalg.eigvalsh(m)[::-1], atol=1e-12)


class TestMinEigenvalue:
    def test_pure_state(self):
        assert min_eigenvalue(projector([1, 0])) == pytest.approx(0, abs=1e-15)

    def test_maximally_mixed(self):
        assert min_eigenvalue(np.eye(2) / 2) == pytest.approx(0.5)

    def test_indefinite(self):
        assert min_eigenvalue([[1, 1], [1, 0]]) == pytest.approx((1 - np.sqrt(5)) / 2)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            min_eigenvalue([[1, 2], [0, 1]])

    @settings(max_examples=50)
    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_bounded_by_mean_eigenvalue(self, d, seed):
        g = np.random.default_rng(seed)
        x = g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))
        m = x + x.conj().T
        lam = min_eigenvalue(m)
        assert lam <= np.trace(m).real / d + 1e-12 <= np.linalg.eigvalsh(m)[-1] + 2e-12
