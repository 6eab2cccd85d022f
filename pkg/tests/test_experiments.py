import pytest

from bess_sizing.dispatch import BatterySpec, GridSpec, InverterSpec
from bess_sizing.experiments import (DEFAULT_CATALOG, ModelRun, compare_hems, rank_by_npv,
                                     resolution_sensitivity, size_sweep, validate_catalog)
from bess_sizing.fixtures import make_fixture
from bess_sizing.lifetime import LifetimeConfig

PLANT = (InverterSpec(), GridSpec(5.75))
CFG = LifetimeConfig(window_days=1, max_years=4 / 365)


@pytest.fixture(scope="module")
def frame():
    return make_fixture("ripple", days=2)


def fake(index, e, npv=None):
    run = ModelRun(index, e, e / 2, 60, "optimal")
    if npv is None:
        run.error = "InfeasibleError: boom"
    else:
        run.economics = {"npv": npv}
    return run


class TestCatalog:
    def test_default_has_ten_models(self):
        assert len(DEFAULT_CATALOG) == 10 and DEFAULT_CATALOG[0] == (1.0, 0.5)

    @pytest.mark.parametrize("bad", [[], [(0.0, 1.0)], [(1.0, float("nan"))]])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            validate_catalog(bad)


class TestRanking:
    def test_npv_descending(self):
        runs = [fake(0, 1.0, -5.0), fake(1, 2.0, 3.0), fake(2, 3.0, -1.0)]
        assert rank_by_npv(runs) == [1, 2, 0]

    def test_tie_prefers_smaller_battery(self):
        assert rank_by_npv([fake(0, 4.0, 1.0), fake(1, 2.0, 1.0)]) == [1, 0]

    def test_failures_last(self):
        assert rank_by_npv([fake(0, 1.0), fake(1, 2.0, -100.0)]) == [1, 0]


class TestSweep:
    def test_small_sweep(self, frame):
        report = size_sweep(frame, PLANT, [(2.0, 1.0), (4.0, 2.0)], cfg=CFG)
        assert report.complete and len(report.runs) == 2
        assert report.best is report.runs[report.ranking[0]]
        d = report.to_dict()
        assert d["best_model"] == report.ranking[0] + 1 and len(d["models"]) == 2

    def test_failed_model_does_not_stop_sweep(self, frame):
        tight = (InverterSpec(), GridSpec(0.05))
        report = size_sweep(frame, tight, [(2.0, 1.0)], cfg=CFG)
        assert not report.complete and report.best is None
        assert report.rows()[0]["status"] == "failed"

    def test_parallel_matches_serial(self, frame):
        catalog = [(1.0, 0.5), (3.0, 1.5)]
        serial = size_sweep(frame, PLANT, catalog, cfg=CFG)
        parallel = size_sweep(frame, PLANT, catalog, cfg=CFG, jobs=2)
        assert parallel.rows() == serial.rows()

    def test_battery_template(self, frame):
        template = BatterySpec(1.0, 1.0, -1.0, soc_min_frac=0.1, soc_max_frac=0.9)
        report = size_sweep(frame, PLANT, [(2.0, 1.0)], cfg=CFG, battery_template=template,
                            keep_results=True)
        assert report.runs[0].result.battery.soc_min_frac == 0.1
        assert report.runs[0].result.battery.warranted_throughput == 9600.0


class TestSensitivity:
    def test_deltas_relative_to_finest(self, frame):
        report = resolution_sensitivity(frame, PLANT, (2.0, 1.0), cfg=CFG, resolutions=(60, 5, 15))
        assert [r.resolution for r in report.runs] == [5, 15, 60]
        assert report.deltas[0]["t_eol_years"] == 0.0 and report.deltas[0]["t_eol_rel"] == 0.0
        assert set(report.deltas[2]) >= {"npv", "scr", "ssr", "cycles"}

    def test_base_must_be_finest(self, frame):
        with pytest.raises(ValueError, match="finest"):
            resolution_sensitivity(frame, PLANT, (2.0, 1.0), cfg=CFG, resolutions=(15, 60))


def test_compare_hems_dominance(frame):
    cmp = compare_hems(frame, PLANT, (2.0, 1.0), cfg=CFG)
    assert cmp.windows_compared == 4 and cmp.dominance
    assert cmp.optimal.result is None
    d = cmp.to_dict()
    assert d["greedy"]["policy"] == "greedy" and d["dominance"] is True
