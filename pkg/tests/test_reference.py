import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmep.core import SIGMA_MINUS, SIGMA_X, SIGMA_Y, SIGMA_Z
from nmep.errors import DimensionMismatch, NotHermitian
from nmep.models import SpinStarParams, constant_model, spin_star_analytic, spin_star_model
from nmep.reference import (
    ReferenceConfig,
    generator_rhs,
    positivity_report,
    rk4_run,
    series_positivity,
)

from oracles import apply_liouvillian, propagate_constant

RHO12 = np.array([[0, 0], [1, 0]])  # tr(RHO12 rho) = rho[0, 1]


def random_density(g, d):
    x = g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


class TestGenerator:
    def test_zero_generator(self):
        m = constant_model(np.zeros((2, 2)), [(SIGMA_Z, 0.0)])
        assert np.array_equal(generator_rhs(np.eye(2) / 2, m, 0.0), np.zeros((2, 2)))

    def test_pure_dephasing_by_hand(self):
        m = constant_model(np.zeros((2, 2)), [(SIGMA_Z, 0.8)])
        out = generator_rhs(np.full((2, 2), 0.5), m, 0.0)
        assert np.allclose(out, [[0, -0.8], [-0.8, 0]])

    def test_matches_superoperator_oracle(self, rng):
        ops = [SIGMA_Z, SIGMA_MINUS, SIGMA_X + 0.3j * SIGMA_Y]
        rates = [0.7, -0.4, 0.2]
        h = 0.3 * SIGMA_X + 0.1 * SIGMA_Z
        m = constant_model(h, list(zip(ops, rates)))
        for _ in range(10):
            rho = random_density(rng, 2)
            assert np.allclose(generator_rhs(rho, m, 0.0), apply_liouvillian(rho, h, ops, rates), atol=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 4))
    def test_hermitian_and_traceless(self, seed, d):
        g = np.random.default_rng(seed)
        x = g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))
        h = x + x.conj().T
        chans = [(g.normal(size=(d, d)) + 1j * g.normal(size=(d, d)), g.uniform(-2, 2)) for _ in range(2)]
        m = constant_model(h, chans)
        y = g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))
        out = generator_rhs(y + y.conj().T, m, 0.0)
        assert np.max(np.abs(out - out.conj().T)) <= 1e-12
        assert abs(np.trace(out)) <= 1e-12

    def test_spin_star_derivative(self, initial_state):
        p = SpinStarParams()
        rho0 = np.outer(initial_state, initial_state.conj())
        t, h = math.pi / 8, 1e-5
        rho = spin_star_analytic(p, rho0, t)
        fd = (spin_star_analytic(p, rho0, t + h) - spin_star_analytic(p, rho0, t - h)) / (2 * h)
        assert np.max(np.abs(generator_rhs(rho, spin_star_model(p), t) - fd)) <= 1e-8

    def test_dimension_checked(self):
        with pytest.raises(DimensionMismatch):
            generator_rhs(np.eye(3) / 3, constant_model(SIGMA_Z), 0.0)


class TestRk4:
    def test_zero_generator_is_exact(self, rng):
        rho = random_density(rng, 2)
        s = rk4_run(constant_model(np.zeros((2, 2))), ReferenceConfig(0, 1, 0.01, record_stride=7), rho, [RHO12])
        assert np.all(s["o0"] == rho[0, 1])

    def test_pure_dephasing(self):
        m = constant_model(np.zeros((2, 2)), [(SIGMA_Z, 1.0)])
        s = rk4_run(m, ReferenceConfig(0, 1, 1e-3), np.full((2, 2), 0.5), {"c": RHO12})
        assert abs(s["c"][-1] - 0.5 * math.exp(-2)) <= 1e-10

    def test_constant_model_against_matrix_exponential(self, rng):
        ops, rates = [SIGMA_Z, SIGMA_MINUS], [0.7, -0.4]
        h = 0.3 * SIGMA_X
        rho0 = random_density(rng, 2)
        s = rk4_run(constant_model(h, list(zip(ops, rates))), ReferenceConfig(0, 2, 1e-3, record_stride=500), rho0, {"c": RHO12})
        for t, c in zip(s.t, s["c"]):
            assert c == pytest.approx(propagate_constant(rho0, h, ops, rates, t)[0, 1], abs=1e-11)

    def test_records(self):
        m = constant_model(SIGMA_X, [(SIGMA_MINUS, 1.0)])
        s = rk4_run(m, ReferenceConfig(0, 1, 0.01, record_stride=10, monitor_positivity=True), np.diag([1.0, 0]), {"sz": SIGMA_Z})
        assert len(s) == 11
        assert set(s.names) == {"sz", "trace", "hermiticity_defect", "min_eigenvalue"}
        assert np.max(np.abs(s["trace"] - 1)) <= 1e-12
        assert np.max(s["hermiticity_defect"]) <= 1e-14
        assert not s.comments

    def test_rejects_non_hermitian_start(self):
        with pytest.raises(NotHermitian):
            rk4_run(constant_model(SIGMA_X), ReferenceConfig(0, 1, 0.1), [[1, 1], [0, 0]])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ReferenceConfig(0, 1, 0)

    def test_spin_star_fourth_order(self, initial_state):
        p = SpinStarParams()
        rho0 = np.outer(initial_state, initial_state.conj())
        m = spin_star_model(p)
        errors = []
        for dt in (4e-3, 2e-3):
            s = rk4_run(m, ReferenceConfig(0, 1.2, dt), rho0, {"c": RHO12})
            exact = np.array([spin_star_analytic(p, rho0, t)[0, 1] for t in s.t])
            errors.append(np.max(np.abs(s["c"] - exact)))
        assert 12 <= errors[0] / errors[1] <= 20


class TestPositivity:
    def test_physical_run_clean(self):
        m = constant_model(SIGMA_X, [(SIGMA_Z, 1.0), (SIGMA_MINUS, 0.5)])
        s = rk4_run(m, ReferenceConfig(0, 3, 0.01, monitor_positivity=True), np.full((2, 2), 0.5))
        assert series_positivity(s) is None

    def test_negative_dephasing_flagged(self):
        m = constant_model(np.zeros((2, 2)), [(SIGMA_Z, -1.0)])
        s = rk4_run(m, ReferenceConfig(0, 0.1, 0.01, monitor_positivity=True), np.full((2, 2), 0.5))
        hit = series_positivity(s)
        assert hit.time == pytest.approx(0.01)
        assert hit.eigenvalue == pytest.approx(0.5 - 0.5 * math.exp(0.02), rel=1e-8)
        assert s.comments and "positivity violated" in s.comments[0]

    def test_report_on_matrices(self):
        ts = [0.0, 0.5, 1.0]
        mats = [np.eye(2) / 2, np.array([[0.5, 0.6], [0.6, 0.5]]), np.array([[0.5, 0.9], [0.9, 0.5]])]
        hit = positivity_report(ts, mats)
        assert hit.time == 0.5 and hit.eigenvalue == pytest.approx(-0.1)
        assert positivity_report(ts[:1], mats[:1]) is None

    def test_tolerance(self):
        mats = [np.diag([1 + 5e-10, -5e-10])]
        assert positivity_report([0.0], mats) is None
        assert positivity_report([0.0], mats, tol=1e-10) is not None
