"""scikit-learn style wrappers around resampling, lifetime simulation and sizing.

The estimators hold only their constructor parameters, so ``get_params`` /
``set_params`` / ``clone`` work as usual; everything learned from the input
series lands in trailing-underscore attributes during ``fit``.
"""
from __future__ import annotations

import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .data import DataError, Resolution, SeriesFrame, resample
from .degradation import DegradationParams
from .dispatch import BatterySpec, GridSpec, InverterSpec
from .economics import CostModel, battery_capital_cost, economic_report
from .experiments import DEFAULT_CATALOG, size_sweep
from .lifetime import LifetimeConfig, simulate_lifetime


def check_series(X) -> SeriesFrame:
    """Accept a SeriesFrame or a DataFrame with a DatetimeIndex and the default column names."""
    if isinstance(X, SeriesFrame):
        return X
    if isinstance(X, pd.DataFrame):
        if not isinstance(X.index, pd.DatetimeIndex) or len(X.index) < 2:
            raise DataError("DataFrame input needs a DatetimeIndex with at least two rows")
        missing = [c for c in ("pv_dc_kw", "load_ac_kw", "price_eur_kwh") if c not in X.columns]
        if missing:
            raise DataError(f"missing column(s): {', '.join(missing)}")
        step = (X.index[1] - X.index[0]).total_seconds() / 60
        if step != int(step):
            raise DataError("sampling step must be a whole number of minutes")
        temp = X["temp_c"].to_numpy() if "temp_c" in X.columns else None
        return SeriesFrame(X.index[0], Resolution(int(step)), X["pv_dc_kw"].to_numpy(),
                           X["load_ac_kw"].to_numpy(), X["price_eur_kwh"].to_numpy(), temp)
    raise TypeError(f"expected SeriesFrame or DataFrame, got {type(X).__name__}")


class Resampler(TransformerMixin, BaseEstimator):
    """Block-average a series to ``step_minutes``."""

    def __init__(self, step_minutes: int = 60):
        self.step_minutes = step_minutes

    def fit(self, X, y=None):
        frame = check_series(X)
        Resolution(self.step_minutes)
        if self.step_minutes % frame.resolution.step_minutes:
            raise DataError(f"cannot resample {frame.resolution.step_minutes} min to {self.step_minutes} min")
        self.input_step_minutes_ = frame.resolution.step_minutes
        return self

    def transform(self, X):
        check_is_fitted(self, "input_step_minutes_")
        frame = check_series(X)
        out = resample(frame, self.step_minutes)
        return out.to_frame() if isinstance(X, pd.DataFrame) else out


class _PlantParams:
    def _plant(self):
        inverter = self.inverter if self.inverter is not None else InverterSpec()
        grid = self.grid if self.grid is not None else GridSpec(5.75)
        return inverter, grid

    def _cfg(self) -> LifetimeConfig:
        return LifetimeConfig(window_days=self.window_days, resolution=self.resolution,
                              max_years=self.max_years, policy=self.policy, c_bd_rule=self.c_bd_rule)


class LifetimeSimulator(_PlantParams, BaseEstimator):
    """Simulate one battery to end of life; ``fit`` runs the simulation.

    After fitting, ``result_`` holds the LifetimeResult, ``economics_`` the
    EconomicReport and ``t_eol_`` the lifetime in years.
    """

    def __init__(self, e_nominal: float = 5.0, power: float = 2.5, policy: str = "optimal",
                 resolution: int | None = None, window_days: int = 7, max_years: float = 30.0,
                 c_bd_rule: str = "cumulative", inverter: InverterSpec | None = None,
                 grid: GridSpec | None = None, degradation: DegradationParams | None = None,
                 cost_model: CostModel | None = None):
        self.e_nominal = e_nominal
        self.power = power
        self.policy = policy
        self.resolution = resolution
        self.window_days = window_days
        self.max_years = max_years
        self.c_bd_rule = c_bd_rule
        self.inverter = inverter
        self.grid = grid
        self.degradation = degradation
        self.cost_model = cost_model

    def fit(self, X, y=None):
        year = check_series(X)
        battery = BatterySpec.from_rating(self.e_nominal, self.power)
        cost = self.cost_model or CostModel()
        self.result_ = simulate_lifetime(year, self._plant(), battery, self.degradation, self._cfg(),
                                         capital=battery_capital_cost(battery, self.power, cost))
        self.economics_ = economic_report(self.result_, cost)
        self.t_eol_ = self.result_.t_eol
        return self

    def window_log(self) -> pd.DataFrame:
        check_is_fitted(self, "result_")
        return self.result_.to_frame()


class BatterySizer(_PlantParams, BaseEstimator):
    """Pick the catalog model with the highest NPV; ``predict`` returns it."""

    def __init__(self, catalog=DEFAULT_CATALOG, policy: str = "optimal", resolution: int | None = None,
                 window_days: int = 7, max_years: float = 30.0, c_bd_rule: str = "cumulative",
                 inverter: InverterSpec | None = None, grid: GridSpec | None = None,
                 degradation: DegradationParams | None = None, cost_model: CostModel | None = None,
                 n_jobs: int = 1):
        self.catalog = catalog
        self.policy = policy
        self.resolution = resolution
        self.window_days = window_days
        self.max_years = max_years
        self.c_bd_rule = c_bd_rule
        self.inverter = inverter
        self.grid = grid
        self.degradation = degradation
        self.cost_model = cost_model
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        year = check_series(X)
        self.report_ = size_sweep(year, self._plant(), self.catalog, self.degradation, self._cfg(),
                                  self.cost_model, jobs=self.n_jobs)
        best = self.report_.best
        self.best_model_ = None if best is None else (best.e_nominal, best.power)
        return self

    def predict(self, X=None):
        check_is_fitted(self, "report_")
        return self.best_model_

    def results_frame(self) -> pd.DataFrame:
        check_is_fitted(self, "report_")
        return pd.DataFrame(self.report_.rows())
