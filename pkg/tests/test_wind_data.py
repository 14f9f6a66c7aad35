import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windaoa.wind_data import (
    WindDataError,
    WindSeries,
    apply_exclusions,
    block_average,
    circular_mean,
    components_to_polar,
    load_series,
    moving_average,
    save_series,
    wrap360,
)


def make_series(u, phi=None, rate=10.0, valid=None):
    u = np.asarray(u, dtype=float)
    phi = np.full(u.size, 270.0) if phi is None else np.asarray(phi, dtype=float)
    valid = np.ones(u.size, dtype=bool) if valid is None else valid
    return WindSeries(u, phi, valid, rate)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadSeries:
    def test_constant_rows(self, tmp_path):
        rows = "\n".join(f"{i / 10:.1f},5,90" for i in range(100))
        s = load_series(write(tmp_path / "w.csv", "t,u,phi\n" + rows + "\n"))
        assert s.rate == pytest.approx(10.0)
        assert len(s) == 100
        assert np.all(s.u == 5.0) and np.all(s.phi == 90.0) and s.valid.all()

    def test_components_meteorological(self, tmp_path):
        s = load_series(write(tmp_path / "c.csv", "t,ux,uy\n0,0,5\n0.1,5,0\n0.2,0,-5\n"))
        # wind travelling north comes from the south; travelling east comes from the west
        np.testing.assert_allclose(s.u, [5, 5, 5])
        np.testing.assert_allclose(s.phi, [180, 270, 0], atol=1e-12)

    def test_components_oracle(self):
        rng = np.random.default_rng(3)
        ux, uy = rng.normal(size=(2, 1000))
        speed, phi = components_to_polar(ux, uy)
        # unit vector pointing where the wind comes from
        np.testing.assert_allclose(speed * np.sin(np.deg2rad(phi)), -ux, atol=1e-12)
        np.testing.assert_allclose(speed * np.cos(np.deg2rad(phi)), -uy, atol=1e-12)

    def test_non_numeric_row_flagged(self, tmp_path):
        s = load_series(write(tmp_path / "b.csv", "t,u,phi\n0,5,90\n0.1,abc,90\n0.2,6,91\n"))
        assert len(s) == 3
        assert s.valid.tolist() == [True, False, True]

    def test_headerless_with_rate(self, tmp_path):
        s = load_series(write(tmp_path / "h.txt", "5 90\n6 91\n7 92\n"), header=False, rate=2.0)
        assert s.rate == 2.0
        np.testing.assert_allclose(s.u, [5, 6, 7])

    def test_column_map(self, tmp_path):
        s = load_series(write(tmp_path / "m.tsv", "time\tspeed\tdir\n0\t1\t2\n0.5\t3\t4\n"),
                        columns={"t": "time", "u": "speed", "phi": "dir"})
        assert s.rate == pytest.approx(2.0)
        np.testing.assert_allclose(s.phi, [2, 4])

    def test_errors(self, tmp_path):
        with pytest.raises(WindDataError):
            load_series(tmp_path / "missing.csv")
        with pytest.raises(WindDataError):
            load_series(write(tmp_path / "e.csv", "t,u,phi\n"))
        with pytest.raises(WindDataError, match="uniform"):
            load_series(write(tmp_path / "n.csv", "t,u,phi\n0,1,1\n0.1,1,1\n0.35,1,1\n0.4,1,1\n"))
        with pytest.raises(WindDataError, match="rate"):
            load_series(write(tmp_path / "r.csv", "u,phi\n1,1\n2,2\n"))

    def test_round_trip_nine_digits(self, tmp_path):
        rng = np.random.default_rng(0)
        u = rng.uniform(0, 30, 500)
        phi = rng.uniform(0, 360, 500)
        valid = rng.random(500) > 0.1
        s = WindSeries(u, phi, valid, 10.0)
        save_series(s, tmp_path / "rt.csv", {"seed": 1})
        back = load_series(tmp_path / "rt.csv")
        assert back.rate == pytest.approx(10.0, rel=1e-12)
        np.testing.assert_array_equal(back.valid, s.valid)
        as_text = np.vectorize(lambda v: f"{v:.9g}")
        np.testing.assert_array_equal(as_text(back.u[valid]), as_text(u[valid]))
        np.testing.assert_array_equal(as_text(back.phi), as_text(s.phi))


class TestWindSeries:
    def test_invariants(self):
        s = WindSeries([1.0, -1.0, np.nan], [370.0, -10.0, 5.0], [True, True, True], 1.0)
        assert s.valid.tolist() == [True, False, False]
        np.testing.assert_allclose(s.phi, [10.0, 350.0, 5.0])
        with pytest.raises(ValueError):
            s.u[0] = 3.0

    def test_summary(self):
        s = make_series(np.tile([6.0, 8.0], 3000), rate=10.0)
        summ = s.summary()
        assert summ["u_mean"] == pytest.approx(7.0)
        assert summ["turbulence_intensity"] == pytest.approx(1.0 / 7.0)


class TestBlockAverage:
    def test_constant(self):
        out = block_average(make_series(np.full(500, 7.0), rate=50.0), 10.0)
        assert out.rate == 10.0 and len(out) == 100
        np.testing.assert_allclose(out.u, 7.0)

    def test_hand_mean(self):
        out = block_average(make_series([1, 2, 3, 4, 5], rate=50.0), 10.0)
        assert out.u.tolist() == [3.0]

    def test_circular_block(self):
        out = block_average(make_series(np.full(5, 5.0), [350, 10, 0, 0, 0], rate=50.0), 10.0)
        # vector mean of {350, 10, 0, 0, 0} is exactly north
        assert min(out.phi[0], 360 - out.phi[0]) == pytest.approx(0.0, abs=1e-9)

    def test_invalid_block_and_ratio(self):
        valid = np.ones(10, dtype=bool)
        valid[7] = False
        out = block_average(make_series(np.arange(10.0), rate=50.0, valid=valid), 10.0)
        assert out.valid.tolist() == [True, False]
        with pytest.raises(WindDataError):
            block_average(make_series(np.ones(10), rate=50.0), 15.0)


class TestExclusions:
    def test_site_rules(self):
        s = make_series([5.0, 1.9, 5.0, 5.0], [90.0, 270.0, 350.0, 133.5])
        out = apply_exclusions(s, (40.5, 133.5), 2.0)
        assert out.valid.tolist() == [False, False, True, False]
        assert len(out) == len(s)

    def test_wrapping_sector(self):
        s = make_series(np.full(4, 5.0), [355.0, 5.0, 180.0, 10.0])
        assert apply_exclusions(s, (350.0, 10.0), 0.0).valid.tolist() == [False, False, True, False]

    @given(st.lists(st.tuples(st.floats(0, 30), st.floats(0, 359.99)), min_size=1, max_size=50),
           st.floats(0, 359.9), st.floats(0, 359.9), st.floats(0, 5))
    def test_idempotent(self, rows, lo, hi, vmin):
        u, phi = map(np.array, zip(*rows))
        s = make_series(u, phi)
        once = apply_exclusions(s, (lo, hi), vmin)
        twice = apply_exclusions(once, (lo, hi), vmin)
        np.testing.assert_array_equal(once.valid, twice.valid)


class TestMovingAverage:
    def test_constant_after_warmup(self):
        avg = moving_average(make_series(np.full(100, 7.0)), 2.0)
        assert not avg.valid[:19].any() and avg.valid[19:].all()
        assert np.all(avg.u_bar[19:] == 7.0)

    def test_alternating_directions(self):
        avg = moving_average(make_series(np.ones(40), np.tile([350.0, 10.0], 20)), 2.0)
        ang = avg.phi_bar[avg.valid]
        np.testing.assert_allclose(np.minimum(ang, 360 - ang), 0.0, atol=1e-9)

    def test_ramp(self):
        avg = moving_average(make_series(np.arange(20.0)), 2.0)
        assert avg.u_bar[19] == pytest.approx(9.5)

    def test_sparse_window_flagged(self):
        valid = np.ones(40, dtype=bool)
        valid[20:31] = False
        avg = moving_average(make_series(np.ones(40), valid=valid), 2.0)
        assert not avg.valid[30]
        assert avg.valid[29]

    def test_window_too_short(self):
        with pytest.raises(WindDataError):
            moving_average(make_series(np.ones(10)), 0.05)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0, 40), min_size=20, max_size=120), st.integers(1, 20))
    def test_mean_within_window_range(self, u, w):
        s = make_series(u)
        avg = moving_average(s, w / 10.0)
        for i in np.flatnonzero(avg.valid):
            win = s.u[i - w + 1:i + 1]
            assert win.min() - 1e-9 <= avg.u_bar[i] <= win.max() + 1e-9

    def test_commutes_with_block_average_on_constant(self):
        s = make_series(np.full(1000, 6.5), np.full(1000, 200.0), rate=50.0)
        a = moving_average(block_average(s, 10.0), 2.0)
        b = moving_average(s, 2.0)
        np.testing.assert_allclose(a.u_bar[a.valid], 6.5)
        np.testing.assert_allclose(b.u_bar[b.valid], 6.5)
        np.testing.assert_allclose(a.phi_bar[a.valid], 200.0)
        np.testing.assert_allclose(b.phi_bar[b.valid], 200.0)


@given(st.floats(0, 89.999))
def test_circular_mean_symmetric_pair(theta):
    m = circular_mean(wrap360(np.array([theta, -theta])))
    assert min(m, 360 - m) == pytest.approx(0.0, abs=1e-9)


@given(st.floats(-1e4, 1e4))
def test_wrap360_range(x):
    w = wrap360(x)
    assert 0 <= w < 360
