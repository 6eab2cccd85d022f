"""Whole-life simulation: rolling window dispatch coupled to capacity fade.

Each window is dispatched from the carried state (SOC, degraded capacity,
degradation cost), its SOC trace is rainflow-counted, and the degradation
state is advanced before the next window. The input frame is recycled
cyclically until the battery reaches end of life or the year cap.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .data import Resolution, SeriesFrame, resample
from .degradation import (C_BD_RULES, DegradationParams, DegradationState, advance_state,
                          calendar_degradation, cycle_degradation)
from .dispatch import (BatterySpec, DispatchSolution, GridSpec, InfeasibleError, InverterSpec, SolverConfig,
                       baseline_import_no_battery, build_window_problem,
                       greedy_self_consumption_dispatch, solve, window_cost)
from .economics import SECONDS_PER_YEAR, CostModel, battery_capital_cost
from .rainflow import cycle_arrays, extract_cycles

logger = logging.getLogger(__name__)

POLICIES = ("optimal", "greedy")
DOD_EDGES = np.linspace(0.0, 1.0, 21)
SOC_EDGES = np.linspace(0.0, 1.0, 11)


class LifetimeError(RuntimeError):
    """A window could not be dispatched; ``window`` is its index."""

    def __init__(self, window: int, cause: Exception):
        self.window = window
        self.cause = cause
        super().__init__(f"window {window}: {cause}")


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class LifetimeConfig:
    window_days: int = 7
    resolution: int | None = None
    max_years: float = 30.0
    policy: str = "optimal"
    soc_init_frac: float = 0.5
    min_cycle_dod: float = 1e-6
    shadow_greedy: bool = False
    c_bd_rule: str = "cumulative"

    def __post_init__(self):
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")
        if self.max_years <= 0:
            raise ValueError("max_years must be positive")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.c_bd_rule not in C_BD_RULES:
            raise ValueError(f"c_bd_rule must be one of {C_BD_RULES}")


class FlowAttribution(NamedTuple):
    pv_to_load: float
    pv_to_battery: float
    grid_import: float
    export: float
    pv_export: float


def attribute_flows(solution: DispatchSolution, window: SeriesFrame,
                    inverter: InverterSpec) -> FlowAttribution:
    """Split PV energy into stored, self-consumed and exported parts (kWh).

    PV is credited to battery charging first, then to the load share served
    through the inverter (on the DC side, so inverter losses count as
    consumed), then to export. Grid import/export are AC energies.
    """
    t = solution.t_s
    pv = window.pv_dc
    to_bat = np.minimum(-solution.p_ts, pv)
    load_via_inverter = np.minimum(window.load_ac, solution.p_fpac) / inverter.eta_inv
    to_load = np.clip(np.minimum(pv - to_bat, load_via_inverter), 0.0, None)
    pv_export = pv - to_bat - to_load
    return FlowAttribution(float(np.sum(to_load) * t), float(np.sum(to_bat) * t),
                           float(np.sum(solution.p_fg) * t), float(-np.sum(solution.p_tg) * t),
                           float(np.sum(pv_export) * t))


@dataclass
class WindowRecord:
    window: int
    start_step: int
    steps: int
    method: str
    objective_eur: float
    greedy_cost_eur: float
    import_kwh: float
    import_baseline_kwh: float
    export_kwh: float
    discharged_kwh: float
    pv_to_load_kwh: float
    pv_to_battery_kwh: float
    pv_export_kwh: float
    pv_total_kwh: float
    load_total_kwh: float
    cycles: float
    cycle_damage: float
    calendar_damage: float
    soc_init_kwh: float
    soc_final_kwh: float
    c_bd_used: float
    f_b: float
    loss: float
    e_b: float
    c_bd: float
    elapsed_s: float
    year: int
    savings_eur: float
    savings_next_eur: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def row(self) -> list[str]:
        return [repr(v) if isinstance(v, float) else str(v) for v in asdict(self).values()]

    @classmethod
    def parse(cls, row: dict) -> "WindowRecord":
        kwargs = {}
        for f in fields(cls):
            raw = row[f.name]
            kwargs[f.name] = int(raw) if f.type == "int" else raw if f.type == "str" else float(raw)
        return cls(**kwargs)


@dataclass
class LifetimeResult:
    battery: BatterySpec
    inverter: InverterSpec
    capital: float
    resolution: Resolution
    status: str = "running"
    window_log: list[WindowRecord] = field(default_factory=list)
    cycle_histogram: np.ndarray = field(
        default_factory=lambda: np.zeros((len(DOD_EDGES) - 1, len(SOC_EDGES) - 1)))

    @property
    def t_eol(self) -> float:
        """Years simulated until end of life (or the cap)."""
        return self.window_log[-1].elapsed_s / SECONDS_PER_YEAR if self.window_log else 0.0

    def _total(self, name: str) -> float:
        return float(sum(getattr(w, name) for w in self.window_log))

    @property
    def pv_to_load(self) -> float:
        return self._total("pv_to_load_kwh")

    @property
    def pv_to_battery(self) -> float:
        return self._total("pv_to_battery_kwh")

    @property
    def pv_total(self) -> float:
        return self._total("pv_total_kwh")

    @property
    def load_total(self) -> float:
        return self._total("load_total_kwh")

    @property
    def import_with_bess(self) -> np.ndarray:
        return np.array([w.import_kwh for w in self.window_log])

    @property
    def import_baseline(self) -> np.ndarray:
        return np.array([w.import_baseline_kwh for w in self.window_log])

    @property
    def total_cost(self) -> float:
        """Import plus degradation cost summed over windows, EUR."""
        return self._total("objective_eur")

    @property
    def final(self) -> WindowRecord:
        return self.window_log[-1]

    def to_frame(self):
        import pandas as pd

        return pd.DataFrame([asdict(w) for w in self.window_log], columns=WindowRecord.columns())

    def summary(self) -> dict:
        last = self.window_log[-1] if self.window_log else None
        return {
            "status": self.status,
            "t_eol_years": self.t_eol,
            "windows": len(self.window_log),
            "resolution_min": self.resolution.step_minutes,
            "e_nominal_kwh": self.battery.e_nominal,
            "power_kw": self.battery.power,
            "capital_eur": self.capital,
            "final_loss": last.loss if last else 0.0,
            "final_capacity_kwh": last.e_b if last else self.battery.e_nominal,
            "f_b": last.f_b if last else 0.0,
            "pv_to_load_kwh": self.pv_to_load,
            "pv_to_battery_kwh": self.pv_to_battery,
            "pv_total_kwh": self.pv_total,
            "load_total_kwh": self.load_total,
            "import_kwh": self._total("import_kwh"),
            "import_baseline_kwh": self._total("import_baseline_kwh"),
            "discharged_kwh": self._total("discharged_kwh"),
            "cycles": self._total("cycles"),
            "cycle_damage": self._total("cycle_damage"),
            "calendar_damage": self._total("calendar_damage"),
            "total_cost_eur": self.total_cost,
        }


def _fingerprint(frame: SeriesFrame, inverter, grid, battery, params, cfg, capital) -> str:
    h = hashlib.sha256()
    for arr in (frame.pv_dc, frame.load_ac, frame.price):
        h.update(np.ascontiguousarray(arr).tobytes())
    h.update(repr((frame.resolution, inverter, grid, battery, params, cfg, capital)).encode())
    return h.hexdigest()[:16]


def _write_checkpoint(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload))
    os.replace(tmp, path)


def _read_checkpoint(path: Path, fingerprint: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
        state = DegradationState(**payload["state"])
        soc = float(payload["soc"])
        windows = int(payload["windows"])
        hist = np.array(payload["cycle_histogram"], dtype=float)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"bad checkpoint {path}: {exc}") from None
    if payload.get("fingerprint") != fingerprint:
        raise CheckpointError(f"bad checkpoint {path}: written for a different run")
    if hist.shape != (len(DOD_EDGES) - 1, len(SOC_EDGES) - 1):
        raise CheckpointError(f"bad checkpoint {path}: histogram shape {hist.shape}")
    return {"state": state, "soc": soc, "windows": windows, "hist": hist,
            "status": payload.get("status", "running")}


def _read_log(path: Path, windows: int) -> list[WindowRecord]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != WindowRecord.columns():
                raise CheckpointError(f"window log {path} has unexpected columns")
            rows = [WindowRecord.parse(r) for r, _ in zip(reader, range(windows))]
    except OSError as exc:
        raise CheckpointError(f"cannot read window log {path}: {exc}") from None
    if len(rows) != windows:
        raise CheckpointError(f"window log {path} has {len(rows)} rows, checkpoint expects {windows}")
    return rows


def simulate_lifetime(year: SeriesFrame, plant: tuple[InverterSpec, GridSpec], battery: BatterySpec,
                      params: DegradationParams | None = None, cfg: LifetimeConfig | None = None,
                      solver: SolverConfig | None = None, capital: float | None = None,
                      cost_model: CostModel | None = None, log_path=None, checkpoint_path=None,
                      resume: bool = False,
                      progress: Callable[[WindowRecord], None] | None = None) -> LifetimeResult:
    """Simulate one battery from installation to end of life.

    With ``log_path`` every window is appended to a CSV as it completes; with
    ``checkpoint_path`` the carried state is saved after each window so that
    ``resume=True`` continues an interrupted run exactly.
    """
    inverter, grid = plant
    params = params or DegradationParams()
    cfg = cfg or LifetimeConfig()
    solver = solver or SolverConfig()
    if cfg.resolution is not None and cfg.resolution != year.resolution.step_minutes:
        year = resample(year, cfg.resolution)
    if capital is None:
        capital = battery_capital_cost(battery, battery.power, cost_model)
    steps = cfg.window_days * year.resolution.steps_per_day
    t_s = year.t_s
    dt = steps * t_s * 3600.0
    n_year = len(year)
    max_seconds = cfg.max_years * SECONDS_PER_YEAR

    result = LifetimeResult(battery, inverter, capital, year.resolution)
    state = DegradationState.fresh(battery, capital)
    soc = cfg.soc_init_frac * battery.e_nominal
    fingerprint = _fingerprint(year, inverter, grid, battery, params, cfg, capital)

    log_path = Path(log_path) if log_path else None
    checkpoint_path = Path(checkpoint_path) if checkpoint_path else None
    if resume:
        if checkpoint_path is None or log_path is None:
            raise CheckpointError("resume needs both a checkpoint and a window log path")
        if not checkpoint_path.is_file():
            raise CheckpointError(f"bad checkpoint {checkpoint_path}: file not found")
        ck = _read_checkpoint(checkpoint_path, fingerprint)
        state, soc, result.cycle_histogram = ck["state"], ck["soc"], ck["hist"]
        result.window_log = _read_log(log_path, ck["windows"])
        result.status = ck["status"]
        with open(log_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(WindowRecord.columns())
            for rec in result.window_log:
                writer.writerow(rec.row())
    elif log_path is not None:
        with open(log_path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(WindowRecord.columns())

    eol_loss = 1.0 - battery.soh_eol
    w = len(result.window_log)
    while result.status == "running":
        start = w * steps
        window = year.slice(start % n_year, start % n_year + steps)
        soc_min, soc_max = battery.soc_bounds(state.e_b)
        soc = min(max(soc, soc_min), soc_max)
        try:
            if cfg.policy == "optimal":
                problem = build_window_problem(window, inverter, grid, battery, state.e_b, state.c_bd, soc)
                sol = solve(problem, solver)
            else:
                sol = greedy_self_consumption_dispatch(window, inverter, grid, battery, state.e_b, soc,
                                                       state.c_bd)
            greedy_cost = math.nan
            if cfg.shadow_greedy:
                try:
                    shadow = greedy_self_consumption_dispatch(window, inverter, grid, battery, state.e_b,
                                                              soc, state.c_bd)
                    greedy_cost = shadow.objective_value
                except InfeasibleError:
                    logger.debug("window %d: greedy rule infeasible, no comparison", w)
        except Exception as exc:  # noqa: BLE001 - re-raised with the window index
            raise LifetimeError(w, exc) from exc

        t_b = float(np.mean(window.battery_temp)) if window.battery_temp is not None else params.T_ref
        trace = np.clip(sol.soc_trace / battery.e_nominal, 0.0, 1.0)
        cycles = [c for c in extract_cycles(trace) if c.dod > cfg.min_cycle_dod]
        mean_sigma = float(np.mean(sol.soc)) / battery.e_nominal
        discharged = sol.discharged_kwh
        new_state = advance_state(state, cycles, dt, t_b, discharged, battery, params, capital, mean_sigma,
                                  cfg.c_bd_rule)

        flows = attribute_flows(sol, window, inverter)
        base_import, _ = baseline_import_no_battery(window, inverter, grid)
        step_elapsed = state.elapsed + np.arange(steps) * t_s * 3600.0
        step_year = np.floor(step_elapsed / SECONDS_PER_YEAR).astype(int)
        savings = (base_import - sol.p_fg) * t_s * window.price
        y0 = int(step_year[0])

        if cycles:
            dod, mean_soc, weight = cycle_arrays(cycles)
            h, _, _ = np.histogram2d(dod, mean_soc, bins=(DOD_EDGES, SOC_EDGES), weights=weight)
            result.cycle_histogram = result.cycle_histogram + h

        rec = WindowRecord(
            window=w, start_step=start, steps=steps, method=sol.method,
            objective_eur=window_cost(sol, window.price, state.c_bd), greedy_cost_eur=greedy_cost,
            import_kwh=flows.grid_import, import_baseline_kwh=float(np.sum(base_import) * t_s),
            export_kwh=flows.export, discharged_kwh=discharged,
            pv_to_load_kwh=flows.pv_to_load, pv_to_battery_kwh=flows.pv_to_battery,
            pv_export_kwh=flows.pv_export, pv_total_kwh=float(np.sum(window.pv_dc) * t_s),
            load_total_kwh=float(np.sum(window.load_ac) * t_s),
            cycles=float(sum(c.weight for c in cycles)),
            cycle_damage=cycle_degradation(cycles, t_b, params),
            calendar_damage=calendar_degradation(dt, mean_sigma, t_b, params),
            soc_init_kwh=float(sol.soc_init), soc_final_kwh=float(sol.soc[-1]), c_bd_used=state.c_bd,
            f_b=new_state.f_b, loss=new_state.loss, e_b=new_state.e_b, c_bd=new_state.c_bd,
            elapsed_s=new_state.elapsed, year=y0,
            savings_eur=float(np.sum(savings[step_year == y0])),
            savings_next_eur=float(np.sum(savings[step_year != y0])),
        )
        result.window_log.append(rec)
        state, soc = new_state, rec.soc_final_kwh
        w += 1
        if state.loss >= eol_loss:
            result.status = "eol"
        elif state.elapsed >= max_seconds:
            result.status = "cap-hit"

        if log_path is not None:
            with open(log_path, "a", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerow(rec.row())
        if checkpoint_path is not None:
            _write_checkpoint(checkpoint_path, {
                "fingerprint": fingerprint, "windows": w, "soc": soc, "status": result.status,
                "state": state.to_dict(), "cycle_histogram": result.cycle_histogram.tolist()})
        logger.info("window %d: loss %.4f e_b %.4f kWh c_bd %.4f EUR/kWh cost %.3f EUR",
                    rec.window, rec.loss, rec.e_b, rec.c_bd, rec.objective_eur)
        if progress is not None:
            progress(rec)
    return result
