"""Battery sizing for PV households: optimal weekly dispatch coupled to capacity fade."""
from .data import Resolution, SeriesFrame, TariffSpec, load_series, resample
from .degradation import DegradationParams, DegradationState, capacity_loss
from .dispatch import BatterySpec, GridSpec, InverterSpec, SolverConfig, build_window_problem, solve
from .economics import CostModel, battery_capital_cost, economic_report
from .lifetime import LifetimeConfig, LifetimeResult, simulate_lifetime

__version__ = "0.1.0"

__all__ = [
    "Resolution", "SeriesFrame", "TariffSpec", "load_series", "resample",
    "DegradationParams", "DegradationState", "capacity_loss",
    "BatterySpec", "GridSpec", "InverterSpec", "SolverConfig", "build_window_problem", "solve",
    "CostModel", "battery_capital_cost", "economic_report",
    "LifetimeConfig", "LifetimeResult", "simulate_lifetime",
]
