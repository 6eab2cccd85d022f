"""Self-consumption/self-sufficiency ratios and investment metrics."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .dispatch import BatterySpec

if TYPE_CHECKING:
    from .lifetime import LifetimeResult

SECONDS_PER_YEAR = 365 * 24 * 3600


@dataclass(frozen=True)
class CostModel:
    cost_per_kwh: float = 252.37
    cost_per_kw: float = 503.30
    discount_rate: float = 0.0558

    def __post_init__(self):
        if min(self.cost_per_kwh, self.cost_per_kw, self.discount_rate) < 0:
            raise ValueError("cost model entries must be >= 0")


def battery_capital_cost(battery: BatterySpec, power: float | None = None,
                         model: CostModel | None = None) -> float:
    model = model or CostModel()
    power = battery.power if power is None else power
    if battery.e_nominal <= 0 or power <= 0:
        raise ValueError("battery sizes must be positive")
    return battery.e_nominal * model.cost_per_kwh + power * model.cost_per_kw


def scr(result: "LifetimeResult") -> float:
    """Share of PV generation consumed directly or stored."""
    pv_total = result.pv_total
    if pv_total <= 0:
        raise ValueError("no PV generation: SCR undefined")
    return (result.pv_to_load + result.pv_to_battery) / pv_total


def ssr(result: "LifetimeResult") -> float:
    """Share of household demand covered by PV-sourced energy.

    PV energy is counted on the load side: direct use after inverter losses
    and stored energy after battery and inverter losses.
    """
    load_total = result.load_total
    if load_total <= 0:
        raise ValueError("no load: SSR undefined")
    eta_inv = result.inverter.eta_inv
    delivered = (result.pv_to_load * eta_inv
                 + result.pv_to_battery * result.battery.eta_roundtrip * eta_inv)
    return min(delivered / load_total, 1.0)


def discount_factor(years, rate: float):
    return (1.0 + rate) ** -np.asarray(years, dtype=float)


def discounted_cash_flows(import_baseline, import_bess, prices, t_s: float, rate: float,
                          start_seconds: float = 0.0) -> np.ndarray:
    """Per-step discounted savings (EUR), discounted by whole years elapsed."""
    base = np.asarray(import_baseline, dtype=float)
    bess = np.asarray(import_bess, dtype=float)
    prices = np.asarray(prices, dtype=float)
    if not base.shape == bess.shape == prices.shape:
        raise ValueError("misaligned series")
    elapsed = start_seconds + np.arange(len(base)) * t_s * 3600.0
    years = np.floor(elapsed / SECONDS_PER_YEAR)
    return (base - bess) * t_s * prices * discount_factor(years, rate)


def npv_from_series(import_baseline, import_bess, prices, t_s: float, capital: float,
                    model: CostModel | None = None) -> float:
    model = model or CostModel()
    return -capital + float(np.sum(discounted_cash_flows(import_baseline, import_bess, prices, t_s,
                                                         model.discount_rate)))


def window_dcf(result: "LifetimeResult", model: CostModel | None = None) -> np.ndarray:
    """Discounted savings per simulated window."""
    model = model or CostModel()
    log = result.window_log
    if not log:
        return np.zeros(0)
    year = np.array([w.year for w in log], dtype=float)
    head = np.array([w.savings_eur for w in log])
    tail = np.array([w.savings_next_eur for w in log])
    return head * discount_factor(year, model.discount_rate) + tail * discount_factor(year + 1, model.discount_rate)


def npv(result: "LifetimeResult", capital: float | None = None, model: CostModel | None = None) -> float:
    capital = result.capital if capital is None else capital
    return -capital + float(np.sum(window_dcf(result, model)))


def dpb(dcf_series, capital: float, period_ends=None) -> float | None:
    """Years until cumulative discounted savings cover ``capital``; None if never.

    ``period_ends`` gives the end time (years) of each cash-flow period;
    by default periods are consecutive years. The crossing is interpolated
    linearly within its period.
    """
    dcf = np.asarray(dcf_series, dtype=float)
    if capital <= 0:
        return 0.0
    ends = np.arange(1, len(dcf) + 1, dtype=float) if period_ends is None else np.asarray(period_ends, float)
    if ends.shape != dcf.shape:
        raise ValueError("period_ends must align with dcf_series")
    cum = np.cumsum(dcf)
    hit = np.nonzero(cum >= capital)[0]
    if hit.size == 0:
        return None
    i = int(hit[0])
    start = 0.0 if i == 0 else ends[i - 1]
    before = 0.0 if i == 0 else cum[i - 1]
    frac = (capital - before) / dcf[i] if dcf[i] > 0 else 1.0
    return float(start + frac * (ends[i] - start))


@dataclass
class EconomicReport:
    capital: float
    npv: float
    dpb: float | None
    scr: float
    ssr: float
    dcf_series: list[float] = field(repr=False, default_factory=list)

    def to_dict(self, include_series: bool = False) -> dict:
        out = asdict(self)
        out["dpb"] = "never" if self.dpb is None else self.dpb
        if not include_series:
            out.pop("dcf_series")
        return out


def economic_report(result: "LifetimeResult", model: CostModel | None = None) -> EconomicReport:
    model = model or CostModel()
    dcf = window_dcf(result, model)
    ends = np.array([w.elapsed_s for w in result.window_log]) / SECONDS_PER_YEAR
    value = -result.capital + float(np.sum(dcf))
    payback = dpb(dcf, result.capital, ends) if len(dcf) else (0.0 if result.capital <= 0 else None)
    pv_ok = result.pv_total > 0
    load_ok = result.load_total > 0
    return EconomicReport(
        capital=result.capital,
        npv=value,
        dpb=payback,
        scr=scr(result) if pv_ok else math.nan,
        ssr=ssr(result) if load_ok else math.nan,
        dcf_series=dcf.tolist(),
    )
