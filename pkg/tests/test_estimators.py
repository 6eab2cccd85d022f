import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from bess_sizing.data import DataError
from bess_sizing.estimators import BatterySizer, LifetimeSimulator, Resampler, check_series
from bess_sizing.fixtures import make_fixture

SHORT = dict(window_days=1, max_years=2 / 365)


@pytest.fixture(scope="module")
def frame():
    return make_fixture("smooth", days=2)


def as_dataframe(frame):
    df = frame.to_frame()
    return df.set_index("timestamp") if "timestamp" in df.columns else df


class TestCheckSeries:
    def test_dataframe_round_trip(self, frame):
        again = check_series(as_dataframe(frame))
        assert len(again) == len(frame) and again.resolution == frame.resolution

    def test_missing_column(self, frame):
        with pytest.raises(DataError, match="missing"):
            check_series(as_dataframe(frame).drop(columns="price_eur_kwh"))

    def test_wrong_type(self):
        with pytest.raises(TypeError):
            check_series([1, 2, 3])


class TestResampler:
    def test_transform(self, frame):
        out = Resampler(60).fit_transform(frame)
        assert out.resolution.step_minutes == 60 and len(out) == 48

    def test_dataframe_in_dataframe_out(self, frame):
        out = Resampler(30).fit(as_dataframe(frame)).transform(as_dataframe(frame))
        assert len(out) == 96

    def test_not_fitted(self, frame):
        with pytest.raises(NotFittedError):
            Resampler().transform(frame)

    def test_bad_step(self, frame):
        with pytest.raises(DataError):
            Resampler(7).fit(frame)


class TestLifetimeSimulator:
    def test_fit(self, frame):
        est = LifetimeSimulator(2.0, 1.0, resolution=60, **SHORT).fit(frame)
        assert est.t_eol_ == pytest.approx(2 / 365)
        assert len(est.window_log()) == 2 and est.economics_.capital == pytest.approx(1008.04)

    def test_params_and_clone(self):
        est = LifetimeSimulator(e_nominal=3.0, policy="greedy")
        assert est.get_params()["e_nominal"] == 3.0
        twin = clone(est).set_params(e_nominal=4.0)
        assert twin.e_nominal == 4.0 and est.e_nominal == 3.0


def test_battery_sizer(frame):
    sizer = BatterySizer(catalog=[(1.0, 0.5), (2.0, 1.0)], resolution=60, **SHORT).fit(frame)
    assert sizer.predict() in [(1.0, 0.5), (2.0, 1.0)]
    assert list(sizer.results_frame()["model"]) == [1, 2]
    with pytest.raises(NotFittedError):
        BatterySizer().predict()
