import logging

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bess_sizing.data import (DataError, Resolution, SeriesFrame, TariffSpec, build_price_series, derive_load,
                              grid_price, load_series, load_tariff, resample, write_series)

START = pd.Timestamp("2023-01-01", tz="UTC")


def frame(n=12, step=5, pv=None, load=None, price=None):
    pv = np.arange(1, n + 1, dtype=float) if pv is None else pv
    load = np.ones(n) if load is None else load
    price = np.full(n, 0.2) if price is None else price
    return SeriesFrame(START, Resolution(step), pv, load, price)


def write_csv(path, rows, header="timestamp,pv_dc_kw,load_ac_kw,price_eur_kwh"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


def five_minute_rows(n, pv="1.0"):
    ts = pd.date_range(START, periods=n, freq="5min")
    return [f"{t.isoformat()},{pv},0.5,0.2" for t in ts]


class TestResolution:
    def test_hours(self):
        assert Resolution(15).t_s == 0.25
        assert Resolution(5).steps_per_day == 288

    @pytest.mark.parametrize("bad", [0, 7, -5, 2.5, 120])
    def test_rejects_non_divisors(self, bad):
        with pytest.raises(DataError):
            Resolution(bad)


class TestSeriesFrame:
    def test_arrays_are_read_only(self):
        f = frame()
        with pytest.raises(ValueError):
            f.pv_dc[0] = 5.0

    def test_length_mismatch(self):
        with pytest.raises(DataError, match="length"):
            SeriesFrame(START, Resolution(5), [1, 2], [1], [0.1, 0.1])

    def test_negative_price(self):
        with pytest.raises(DataError, match="negative price"):
            frame(n=2, price=np.array([0.1, -0.1]))

    def test_slice_wraps_around(self):
        f = frame(n=4)
        s = f.slice(3, 6)
        assert s.pv_dc.tolist() == [4.0, 1.0, 2.0]
        assert s.start == START + pd.Timedelta(minutes=15)


class TestLoadSeries:
    def test_round_trip_288_rows(self, tmp_path):
        f = load_series(write_csv(tmp_path / "d.csv", five_minute_rows(288)))
        assert len(f) == 288
        assert f.resolution == Resolution(5)

    def test_duplicated_timestamp(self, tmp_path):
        rows = five_minute_rows(5)
        rows[3] = rows[2]
        with pytest.raises(DataError, match="non-uniform spacing"):
            load_series(write_csv(tmp_path / "d.csv", rows))

    def test_negative_pv(self, tmp_path):
        rows = five_minute_rows(5)
        rows[1] = rows[1].replace(",1.0,", ",-0.1,")
        with pytest.raises(DataError, match="negative power value"):
            load_series(write_csv(tmp_path / "d.csv", rows))

    def test_unparseable_timestamp(self, tmp_path):
        rows = five_minute_rows(3)
        rows[1] = "yesterday" + rows[1][rows[1].index(","):]
        with pytest.raises(DataError, match="unparseable timestamp"):
            load_series(write_csv(tmp_path / "d.csv", rows))

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", [r.rsplit(",", 1)[0] for r in five_minute_rows(3)],
                         header="timestamp,pv_dc_kw,load_ac_kw")
        with pytest.raises(DataError, match="missing column"):
            load_series(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_series(tmp_path / "nope.csv")

    def test_declared_resolution_must_match(self, tmp_path):
        with pytest.raises(DataError):
            load_series(write_csv(tmp_path / "d.csv", five_minute_rows(4)), resolution=15)

    def test_load_derived_from_grid_exchange(self, tmp_path):
        ts = pd.date_range(START, periods=3, freq="60min")
        rows = [f"{t.isoformat()},2.5,{pa},{g},0.2" for t, pa, g in zip(ts, (2.0, 2.0, 0.5), (1.0, -2.0, -1.0))]
        path = write_csv(tmp_path / "d.csv", rows, "timestamp,pv_dc_kw,pv_ac_kw,grid_kw,price_eur_kwh")
        assert load_series(path).load_ac.tolist() == [3.0, 0.0, 0.0]

    def test_price_from_tariff(self, tmp_path):
        ts = pd.date_range(START, periods=24, freq="60min")
        rows = [f"{t.isoformat()},0,1" for t in ts]
        path = write_csv(tmp_path / "d.csv", rows, "timestamp,pv_dc_kw,load_ac_kw")
        tariff = TariffSpec(np.full(24, 0.10), np.full(24, 0.05), 0.21)
        assert load_series(path, tariff=tariff).price == pytest.approx(np.full(24, 0.1815))

    def test_write_then_load_is_identity(self, tmp_path):
        f = frame(n=24, pv=np.random.default_rng(0).random(24))
        write_series(f, tmp_path / "f.csv")
        g = load_series(tmp_path / "f.csv")
        assert np.array_equal(f.pv_dc, g.pv_dc) and g.start == f.start


class TestDeriveLoad:
    def test_sum(self):
        assert derive_load([2.0], [1.0])[0].tolist() == [3.0]

    def test_full_export_gives_zero(self):
        assert derive_load([2.0], [-2.0]) == (pytest.approx([0.0]), 0)

    def test_negative_residual_clipped_and_counted(self, caplog):
        with caplog.at_level(logging.WARNING):
            load, clipped = derive_load([0.5], [-1.0])
        assert load.tolist() == [0.0] and clipped == 1
        assert caplog.records

    def test_length_mismatch(self):
        with pytest.raises(DataError, match="length mismatch"):
            derive_load([1.0, 2.0], [1.0])


class TestResample:
    def test_block_mean(self):
        assert resample(frame(), 60).pv_dc.tolist() == [6.5]

    def test_constant_stays_constant(self):
        f = frame(n=24, pv=np.full(24, 3.0))
        for step in (10, 15, 30, 60):
            assert np.all(resample(f, step).pv_dc == 3.0)

    def test_same_resolution_is_identity(self):
        f = frame()
        assert resample(f, 5) is f

    def test_week_energy_conserved(self):
        rng = np.random.default_rng(4)
        f = frame(n=2016, pv=rng.random(2016) * 4, load=rng.random(2016) * 2)
        g = resample(f, 60)
        assert len(g) == 168
        oracle = sum(float(v) for v in f.pv_dc) * f.t_s
        assert abs(float(np.sum(g.pv_dc)) * g.t_s - oracle) < 1e-9

    def test_non_integer_ratio(self):
        with pytest.raises(DataError, match="non-integer ratio"):
            resample(frame(n=12, step=15), 20)

    def test_indivisible_length(self):
        with pytest.raises(DataError, match="indivisible length"):
            resample(frame(n=10), 60)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 10, allow_nan=False), min_size=12, max_size=12).map(lambda v: v * 4),
           st.sampled_from([10, 15, 20, 30, 60]))
    def test_energy_preserved(self, values, step):
        pv = np.array(values)
        if len(pv) % (step // 5):
            return
        f = frame(n=len(pv), pv=pv)
        g = resample(f, step)
        assert abs(np.sum(g.pv_dc) * g.t_s - np.sum(pv) * f.t_s) <= 1e-9


class TestPrices:
    def test_vat_example(self):
        assert grid_price(0.10, 0.05, 0.21) == pytest.approx(0.1815, abs=1e-15)

    def test_zero_vat_and_zero_base(self):
        assert grid_price(0.10, 0.05, 0.0) == pytest.approx(0.15)
        assert grid_price(0.0, 0.0, 0.5) == 0.0

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.99), st.floats(0, 0.1))
    def test_monotone_in_each_component(self, gc, tc, vat, bump):
        base = grid_price(gc, tc, vat)
        assert grid_price(gc + bump, tc, vat) >= base
        assert grid_price(gc, tc + bump, vat) >= base
        assert grid_price(gc, tc, min(vat + bump, 0.999)) >= base

    def test_daily_table_range(self):
        tariff = TariffSpec(np.full((2, 24), 0.1), np.zeros(24), 0.0)
        inside = pd.date_range(START, periods=48, freq="60min")
        assert build_price_series(tariff, inside) == pytest.approx(np.full(48, 0.1))
        with pytest.raises(DataError, match="outside tariff-definition range"):
            build_price_series(tariff, pd.date_range(START, periods=49, freq="60min"))

    def test_hourly_profile(self):
        tariff = TariffSpec(np.arange(24) / 100, np.zeros(24), 0.0)
        ts = pd.date_range(START + pd.Timedelta(minutes=30), periods=3, freq="60min")
        assert build_price_series(tariff, ts) == pytest.approx([0.0, 0.01, 0.02])

    def test_vat_rate_range(self):
        with pytest.raises(DataError):
            TariffSpec(np.zeros(24), np.zeros(24), 1.0)

    def test_load_tariff(self, tmp_path):
        rows = "\n".join(f"{h},0.10,0.05" for h in range(24))
        path = tmp_path / "t.csv"
        path.write_text("hour_of_day,gc_eur_kwh,tc_eur_kwh\n" + rows + "\n")
        t = load_tariff(path, 0.21)
        assert grid_price(t.generation_cost[0, 0], t.tolls_and_charges[0], t.vat_rate) == pytest.approx(0.1815)
        path.write_text("hour_of_day,gc_eur_kwh,tc_eur_kwh\n0,0.1,0.05\n")
        with pytest.raises(DataError):
            load_tariff(path, 0.21)
