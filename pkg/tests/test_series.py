import numpy as np
import pytest

from nmep.core import SIGMA_X
from nmep.errors import ConfigError, DimensionMismatch, GridMismatch, NonMonotonicTimes
from nmep.series import TimeSeries, compare_series, observable, parse_series


def sample():
    t = np.array([0.0, 0.1, 0.30000000000000004])
    return TimeSeries(
        t,
        {
            "rho12": np.array([0.5 + 0.5j, 0.1 / 3 - 2e-11j, 1e-300 + 1j]),
            "flat": np.array([1 + 1e-12j, 2, 3]),
            "n_distinct_members": np.array([1, 17, 2**40], dtype=np.int64),
            "x": np.array([np.pi, -0.0, 1e-17]),
        },
        ["hello"],
    )


class TestCsv:
    def test_layout(self):
        text = sample().to_csv()
        lines = text.splitlines()
        assert lines[0] == "t,rho12,rho12_im,flat,n_distinct_members,x"
        assert lines[-1] == "# hello"
        assert lines[2].split(",")[4] == "17"

    def test_round_trip_bit_exact(self):
        s = sample()
        back = parse_series(s.to_csv())
        assert np.array_equal(back.t, s.t)
        assert np.array_equal(back["rho12"], s["rho12"])
        assert np.array_equal(back["flat"], s["flat"].real)
        assert back["n_distinct_members"].dtype == np.int64
        assert np.array_equal(back["n_distinct_members"], s["n_distinct_members"])
        assert np.array_equal(back["x"], s["x"])
        assert back.comments == ["hello"]

    def test_write_and_reread(self, tmp_path):
        path = tmp_path / "out.csv"
        text = sample().to_csv(path)
        assert path.read_text(encoding="utf-8") == text

    def test_column_length_checked(self):
        with pytest.raises(DimensionMismatch):
            TimeSeries(np.arange(3.0), {"a": np.zeros(2)})

    @pytest.mark.parametrize(
        "text, error",
        [
            ("x,a\n0,1\n", ConfigError),
            ("t,a\n0,1,2\n", ConfigError),
            ("t,a\n0,abc\n", ConfigError),
            ("t,a\n0,1\n0,2\n", NonMonotonicTimes),
            ("# only a comment\n", ConfigError),
        ],
    )
    def test_parse_errors(self, text, error):
        with pytest.raises(error):
            parse_series(text, "f.csv")


class TestCompare:
    def test_identical(self):
        r = compare_series(sample(), sample(), ["rho12", "x"])
        assert r["rho12"].max_abs == 0 and r["x"].rmse == 0

    def test_shift(self):
        a = sample()
        b = TimeSeries(a.t, {k: v + 0.25 for k, v in a.columns.items()})
        r = compare_series(a, b, ["x"])
        assert r["x"].max_abs == pytest.approx(0.25) and r["x"].rmse == pytest.approx(0.25)

    def test_complex_error_is_modulus(self):
        t = np.arange(2.0)
        r = compare_series(TimeSeries(t, {"c": np.array([0, 0j])}), TimeSeries(t, {"c": np.array([3 + 4j, 0])}), ["c"])
        assert r["c"].max_abs == pytest.approx(5) and r["c"].rmse == pytest.approx(5 / np.sqrt(2))

    def test_grid_rounding_tolerated(self):
        a = TimeSeries(np.array([0.0, 0.1, 0.2]), {"v": np.zeros(3)})
        b = TimeSeries(np.array([0.0, 0.1 + 1e-15, 0.2]), {"v": np.zeros(3)})
        assert compare_series(a, b, ["v"])["v"].max_abs == 0

    def test_grid_mismatch(self):
        a = TimeSeries(np.array([0.0, 0.1]), {"v": np.zeros(2)})
        for t in ([0.0, 0.2], [0.0, 0.1, 0.2]):
            with pytest.raises(GridMismatch):
                compare_series(a, TimeSeries(np.array(t), {"v": np.zeros(len(t))}), ["v"])

    def test_missing_column(self):
        with pytest.raises(ConfigError):
            compare_series(sample(), sample(), ["nope"])


class TestObservable:
    def test_named(self):
        op, take_abs = observable("sx", 2)
        assert np.array_equal(op, SIGMA_X) and not take_abs

    def test_rho_entry_picks_element(self, rng):
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = x @ x.conj().T
        op, _ = observable("rho23", 3)
        assert np.trace(op @ rho) == pytest.approx(rho[1, 2])

    def test_population_and_abs(self):
        op, take_abs = observable("abs_p3", 3)
        assert take_abs and np.array_equal(op, np.diag([0, 0, 1]))
        assert np.array_equal(observable("id", 2)[0], np.eye(2))

    @pytest.mark.parametrize("name, dim", [("sx", 3), ("rho13", 2), ("p0", 2), ("p3", 2), ("bogus", 2)])
    def test_bad_names(self, name, dim):
        with pytest.raises((DimensionMismatch, ConfigError)):
            observable(name, dim)
