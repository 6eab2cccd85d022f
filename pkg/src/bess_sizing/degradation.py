"""Semi-empirical capacity fade and the per-kWh degradation cost it implies.

Cycle ageing is the rainflow-weighted sum of temperature, depth-of-discharge
and SOC stress; calendar ageing is linear in elapsed time. The cumulative
degradation factor maps to capacity loss through a two-exponential curve
(fast SEI formation plus slow fade).
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .dispatch import BatterySpec
from .rainflow import CycleRecord, cycle_arrays

KELVIN = 273.15


@dataclass(frozen=True)
class DegradationParams:
    alpha_sei: float = 5.75e-2
    beta_sei: float = 121.0
    k_T: float = 6.93e-2
    k_d1: float = 1.40e5
    k_d2: float = -5.01e-1
    k_d3: float = -1.23e5
    k_sigma: float = 1.04
    k_t: float = 4.14e-10  # 1/s
    T_ref: float = 25.0  # degC
    sigma_ref: float = 0.5

    def __post_init__(self):
        if not 0 < self.alpha_sei < 1:
            raise ValueError("alpha_sei must be in (0, 1)")
        if self.beta_sei <= 0:
            raise ValueError("beta_sei must be positive")
        if self.k_t < 0:
            raise ValueError("k_t must be >= 0")

    @classmethod
    def zeroed(cls) -> "DegradationParams":
        """No ageing at all: zero DOD-stress polynomial and calendar rate."""
        return cls(k_T=0.0, k_d1=0.0, k_d3=0.0, k_sigma=0.0, k_t=0.0)

    @property
    def cycle_ageing(self) -> bool:
        return not (self.k_d1 == 0 and self.k_d3 == 0)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_PARAMS = DegradationParams()


def stress_temperature(t_b, params: DegradationParams = DEFAULT_PARAMS):
    t_b = np.asarray(t_b, dtype=float)
    if np.any(t_b <= -KELVIN):
        raise ValueError("temperature below absolute zero")
    ratio = (params.T_ref + KELVIN) / (t_b + KELVIN)
    out = np.exp(params.k_T * (t_b - params.T_ref) * ratio)
    return float(out) if out.ndim == 0 else out


def stress_dod(dod, params: DegradationParams = DEFAULT_PARAMS):
    dod = np.asarray(dod, dtype=float)
    if np.any(dod <= 0) or np.any(dod > 1):
        raise ValueError("dod must lie in (0, 1]; filter zero-range cycles first")
    if not params.cycle_ageing:
        out = np.zeros_like(dod)
    else:
        out = 1.0 / (params.k_d1 * dod ** params.k_d2 + params.k_d3)
    return float(out) if out.ndim == 0 else out


def stress_soc(sigma, params: DegradationParams = DEFAULT_PARAMS):
    out = np.exp(params.k_sigma * (np.asarray(sigma, dtype=float) - params.sigma_ref))
    return float(out) if out.ndim == 0 else out


def cycle_degradation(cycles: list[CycleRecord], t_b: float, params: DegradationParams = DEFAULT_PARAMS) -> float:
    if not cycles:
        return 0.0
    dod, mean_soc, weight = cycle_arrays(cycles)
    return float(stress_temperature(t_b, params)
                 * np.sum(weight * stress_dod(dod, params) * stress_soc(mean_soc, params)))


def calendar_degradation(dt: float, mean_sigma: float, t_b: float, params: DegradationParams = DEFAULT_PARAMS) -> float:
    if dt < 0:
        raise ValueError("dt must be >= 0")
    return stress_temperature(t_b, params) * stress_soc(mean_sigma, params) * params.k_t * dt


def capacity_loss(f_b, params: DegradationParams = DEFAULT_PARAMS):
    f_b = np.asarray(f_b, dtype=float)
    if np.any(f_b < 0):
        raise ValueError("f_b must be >= 0")
    a = params.alpha_sei
    # 1 - a e^{-b f} - (1 - a) e^{-f}, written with expm1 to keep precision near f = 0
    out = -a * np.expm1(-params.beta_sei * f_b) - (1 - a) * np.expm1(-f_b)
    return float(out) if out.ndim == 0 else out


def initial_degradation_cost(battery: BatterySpec, capital: float) -> float:
    """Capital spread over the warranted discharge throughput, EUR/kWh."""
    if not battery.warranted_throughput or battery.warranted_throughput <= 0:
        raise ValueError("warranted_throughput must be positive")
    return capital / battery.warranted_throughput


@dataclass(frozen=True)
class DegradationState:
    f_b: float
    loss: float
    e_b: float
    c_bd: float
    discharged_total: float = 0.0
    elapsed: float = 0.0  # s
    f_cycle: float = 0.0  # part of f_b caused by cycling

    @classmethod
    def fresh(cls, battery: BatterySpec, capital: float) -> "DegradationState":
        return cls(0.0, 0.0, battery.e_nominal, initial_degradation_cost(battery, capital))

    @property
    def soh(self) -> float:
        return 1.0 - self.loss

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


C_BD_RULES = ("cumulative", "cycle-share")
# below this cumulative discharge (kWh) the per-kWh cost is not yet defined
MIN_THROUGHPUT = 1e-6


def consumed_life_fraction(loss: float, battery: BatterySpec) -> float:
    return loss / (1.0 - battery.soh_eol)


def advance_state(state: DegradationState, cycles: list[CycleRecord], dt: float, t_b: float,
                  discharged: float, battery: BatterySpec, params: DegradationParams,
                  capital: float, mean_sigma: float | None = None,
                  c_bd_rule: str = "cumulative") -> DegradationState:
    """Fold one period's cycling and elapsed time into the degradation state.

    The returned ``c_bd`` prices discharge in the next period: the capital
    value of the life consumed so far divided by all energy discharged so far.
    With ``c_bd_rule="cycle-share"`` only the share of consumed life caused
    by cycling (f_cycle / f_b) is charged to discharged energy; calendar
    fade happens whether or not the battery is used.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if c_bd_rule not in C_BD_RULES:
        raise ValueError(f"c_bd_rule must be one of {C_BD_RULES}")
    sigma = params.sigma_ref if mean_sigma is None else mean_sigma
    d_cycle = cycle_degradation(cycles, t_b, params)
    f_b = state.f_b + d_cycle + calendar_degradation(dt, sigma, t_b, params)
    f_cycle = state.f_cycle + d_cycle
    loss = float(capacity_loss(f_b, params))
    discharged_total = state.discharged_total + discharged
    if discharged_total > MIN_THROUGHPUT:
        share = 1.0 if c_bd_rule == "cumulative" else (f_cycle / f_b if f_b > 0 else 0.0)
        c_bd = consumed_life_fraction(loss, battery) * share * capital / discharged_total
    else:
        c_bd = state.c_bd
    return replace(state, f_b=f_b, loss=loss, e_b=(1.0 - loss) * battery.e_nominal, c_bd=c_bd,
                   discharged_total=discharged_total, elapsed=state.elapsed + dt, f_cycle=f_cycle)


def invert_capacity_loss(loss: float, params: DegradationParams = DEFAULT_PARAMS) -> float:
    """Degradation factor giving ``loss`` (bisection; loss in [0, 1))."""
    if not 0 <= loss < 1:
        raise ValueError("loss must be in [0, 1)")
    lo, hi = 0.0, 1.0
    while capacity_loss(hi, params) < loss:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if capacity_loss(mid, params) < loss:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

