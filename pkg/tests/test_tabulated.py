import numpy as np
import pytest

from nmep.core import SIGMA_MINUS, SIGMA_X, SIGMA_Z
from nmep.errors import ConfigError, DimensionMismatch, NonMonotonicTimes, NotHermitian, OutOfRange
from nmep.models import (
    Samples,
    SpinStarParams,
    TabulatedSpec,
    dephasing_rate,
    format_tabulated,
    lamb_shift,
    load_tabulated,
    parse_tabulated,
    sampled_model,
    spin_star_analytic,
    tabulated_model,
)
from nmep.reference import ReferenceConfig, rk4_run

EXAMPLE = """\
# decaying qubit with a sign change
dim=2 channels=2
channel sz
1 0
0 -1
rates:
0.0 0.5
1.0 -0.5
channel sm   # lowering
0 0
1+0j 0
rates:
0 1
2 1
hamiltonian
0 0.5
0.5 0
rates:
0 1
2 3
"""


class TestSamples:
    def test_linear_interpolation(self):
        s = Samples(np.array([0.0, 1.0, 3.0]), np.array([0.0, 2.0, -2.0]))
        assert s(0.5) == 1.0 and s(2.0) == 0.0 and s(3.0) == -2.0

    def test_outside_range(self):
        s = Samples(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        with pytest.raises(OutOfRange):
            s(1.0 + 1e-9)
        with pytest.raises(OutOfRange):
            s(-0.1)

    @pytest.mark.parametrize("times", [[0.0, 0.0], [1.0, 0.5]])
    def test_times_must_increase(self, times):
        with pytest.raises(NonMonotonicTimes):
            Samples(np.array(times), np.array([1.0, 2.0]))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Samples(np.array([0.0, 1.0]), np.array([1.0]))


class TestParse:
    def test_example(self):
        spec = parse_tabulated(EXAMPLE)
        assert spec.dim == 2 and spec.channel_names == ["sz", "sm"]
        assert np.array_equal(spec.channel_operators[1], SIGMA_MINUS)
        assert spec.channel_rates[0](0.5) == 0.0
        m = tabulated_model(spec)
        snap = m.at(1.0)
        assert np.array_equal(snap.rates, [-0.5, 1.0])
        assert np.allclose(snap.hamiltonian, 2 * 0.5 * SIGMA_X)

    def test_hamiltonian_optional(self):
        spec = parse_tabulated("dim=2 channels=1\nchannel a\n1 0\n0 -1\nrates:\n0 1\n1 1\n")
        assert np.array_equal(tabulated_model(spec).at(0.3).hamiltonian, np.zeros((2, 2)))

    def test_round_trip(self):
        spec = parse_tabulated(EXAMPLE)
        again = parse_tabulated(format_tabulated(spec))
        assert format_tabulated(again) == format_tabulated(spec)
        for a, b in zip(spec.channel_operators, again.channel_operators):
            assert np.array_equal(a, b)
        for t in (0.0, 0.3, 1.0):
            assert again.channel_rates[0](t) == spec.channel_rates[0](t)

    def test_round_trip_awkward_floats(self):
        g = np.random.default_rng(3)
        op = g.normal(size=(3, 3)) + 1j * g.normal(size=(3, 3))
        ts = np.cumsum(g.uniform(0.1, 1, 6))
        spec = TabulatedSpec(3, [op], [Samples(ts, g.normal(size=6))])
        again = parse_tabulated(format_tabulated(spec))
        assert np.array_equal(again.channel_operators[0], op)
        assert np.array_equal(again.channel_rates[0].values, spec.channel_rates[0].values)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text(EXAMPLE, encoding="utf-8")
        assert load_tabulated(path).dim == 2

    @pytest.mark.parametrize(
        "text, line",
        [
            ("", None),
            ("dim=2\n", 1),
            ("dim=2 channels=1\nchannel a\n1 0\n0\n", 4),
            ("dim=2 channels=1\nchannel a\n1 0\n0 x\nrates:\n0 1\n", 4),
            ("dim=2 channels=1\nchannel a\n1 0\n0 1\nrates:\n0 1 2\n", 6),
            ("dim=2 channels=1\nchannel a\n1 0\n0 1\n", 2),
            ("dim=2 channels=2\nchannel a\n1 0\n0 1\nrates:\n0 1\n", None),
            ("dim=2 channels=0\nbogus\n", 2),
        ],
    )
    def test_errors_name_the_line(self, text, line):
        with pytest.raises(ConfigError) as info:
            parse_tabulated(text, "model.txt")
        assert "model.txt" in str(info.value)
        if line is not None:
            assert f"model.txt:{line}" in str(info.value)

    def test_decreasing_rate_times(self):
        with pytest.raises(NonMonotonicTimes):
            parse_tabulated("dim=1 channels=1\nchannel a\n1\nrates:\n1 0\n0 0\n")

    def test_non_hermitian_hamiltonian(self):
        with pytest.raises(NotHermitian):
            parse_and_build = tabulated_model(parse_tabulated("dim=2 channels=0\nhamiltonian\n0 1\n0 0\n"))
            del parse_and_build

    def test_model_rejects_sampled_range_overrun(self):
        m = tabulated_model(parse_tabulated(EXAMPLE))
        with pytest.raises(OutOfRange):
            m.at(1.5)  # first channel only sampled to t = 1


def test_sampled_spin_star_reproduces_analytic(initial_state):
    """A tabulated copy of the spin-star rates, integrated by RK4, tracks the closed form."""
    p = SpinStarParams()
    t_max = np.pi / 2 + 0.5
    ts = np.linspace(0, t_max, 2001)
    model = sampled_model(SIGMA_Z, [(SIGMA_Z, Samples(ts, dephasing_rate(p, ts)))], Samples(ts, lamb_shift(p, ts)))
    rho0 = np.outer(initial_state, initial_state.conj())
    cfg = ReferenceConfig(0.0, t_max, t_max / 4000, record_stride=40)
    series = rk4_run(model, cfg, rho0, {"rho12": np.array([[0, 0], [1, 0]])})
    exact = np.array([spin_star_analytic(p, rho0, t)[0, 1] for t in series.t])
    assert np.max(np.abs(series["rho12"] - exact)) <= 1e-3
