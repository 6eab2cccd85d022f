"""Case studies: battery size sweep, time-resolution sensitivity, HEMS comparison."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .data import SeriesFrame, resample
from .degradation import DegradationParams
from .dispatch import BatterySpec, GridSpec, InverterSpec, SolverConfig
from .economics import CostModel, battery_capital_cost, economic_report
from .lifetime import LifetimeConfig, LifetimeResult, simulate_lifetime

logger = logging.getLogger(__name__)

DEFAULT_CATALOG: tuple[tuple[float, float], ...] = (
    (1.0, 0.5), (2.0, 1.0), (3.0, 1.5), (4.0, 2.0), (5.0, 2.5),
    (6.9, 3.5), (10.0, 5.0), (13.8, 7.0), (15.0, 5.0), (21.7, 10.5),
)
RESOLUTIONS = (5, 15, 30, 60)
DELTA_KEYS = ("t_eol_years", "npv", "dpb", "scr", "ssr", "cycles", "cycle_damage")


def validate_catalog(catalog) -> list[tuple[float, float]]:
    models = [(float(e), float(p)) for e, p in catalog]
    if not models:
        raise ValueError("catalog is empty")
    for e, p in models:
        if not (e > 0 and p > 0 and math.isfinite(e) and math.isfinite(p)):
            raise ValueError(f"catalog entry ({e}, {p}) must be positive")
    return models


@dataclass
class ModelRun:
    """One simulated battery: lifetime summary plus economics, or the failure."""

    index: int
    e_nominal: float
    power: float
    resolution: int
    policy: str
    summary: dict | None = None
    economics: dict | None = None
    error: str | None = None
    result: LifetimeResult | None = field(default=None, repr=False, compare=False)

    @property
    def failed(self) -> bool:
        return self.error is not None

    def row(self) -> dict:
        out = {"model": self.index + 1, "e_nominal_kwh": self.e_nominal, "power_kw": self.power,
               "resolution_min": self.resolution, "policy": self.policy,
               "status": "failed" if self.failed else self.summary["status"]}
        if self.failed:
            out["error"] = self.error
            return out
        out.update({
            "t_eol_years": self.summary["t_eol_years"], "capital_eur": self.economics["capital"],
            "npv": self.economics["npv"], "dpb": self.economics["dpb"],
            "scr": self.economics["scr"], "ssr": self.economics["ssr"],
            "cycles": self.summary["cycles"], "cycle_damage": self.summary["cycle_damage"],
            "calendar_damage": self.summary["calendar_damage"],
            "discharged_kwh": self.summary["discharged_kwh"],
        })
        return out


@dataclass
class _Task:
    index: int
    year: SeriesFrame
    plant: tuple[InverterSpec, GridSpec]
    battery: BatterySpec
    params: DegradationParams
    cfg: LifetimeConfig
    solver: SolverConfig
    cost_model: CostModel
    keep_result: bool


def _run(task: _Task) -> ModelRun:
    b = task.battery
    run = ModelRun(task.index, b.e_nominal, b.power, task.year.resolution.step_minutes, task.cfg.policy)
    try:
        capital = battery_capital_cost(b, b.power, task.cost_model)
        res = simulate_lifetime(task.year, task.plant, b, task.params, task.cfg, task.solver,
                                capital=capital)
        run.summary = res.summary()
        run.economics = economic_report(res, task.cost_model).to_dict()
        if task.keep_result:
            run.result = res
    except Exception as exc:  # noqa: BLE001 - a failed model is reported, the sweep goes on
        logger.warning("model %d (%.1f kWh) failed: %s", task.index + 1, b.e_nominal, exc)
        run.error = f"{type(exc).__name__}: {exc}"
    return run


def _run_all(tasks: list[_Task], jobs: int) -> list[ModelRun]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run, tasks))  # map keeps submission order


def _battery(e: float, p: float, template: BatterySpec | None) -> BatterySpec:
    if template is None:
        return BatterySpec.from_rating(e, p)
    return replace(template, e_nominal=e, p_discharge_max=p, p_charge_max=-p, warranted_throughput=None)


def rank_by_npv(runs: list[ModelRun]) -> list[int]:
    """Catalog indices ordered best first; ties go to the smaller battery, failures last."""
    ok = [r for r in runs if not r.failed]
    ranked = sorted(ok, key=lambda r: (-r.economics["npv"], r.e_nominal, r.index))
    return [r.index for r in ranked] + [r.index for r in runs if r.failed]


@dataclass
class SweepReport:
    runs: list[ModelRun]
    ranking: list[int]
    deltas: list[dict] = field(default_factory=list)

    @property
    def best(self) -> ModelRun | None:
        first = self.runs[self.ranking[0]] if self.ranking else None
        return None if first is None or first.failed else first

    @property
    def complete(self) -> bool:
        return not any(r.failed for r in self.runs)

    def rows(self) -> list[dict]:
        return [r.row() for r in self.runs]

    def to_dict(self) -> dict:
        best = self.best
        return {
            "models": self.rows(),
            "ranking": [i + 1 for i in self.ranking],
            "best_model": None if best is None else best.index + 1,
            "complete": self.complete,
            "deltas": self.deltas,
        }


def size_sweep(year: SeriesFrame, plant, catalog=DEFAULT_CATALOG, params: DegradationParams | None = None,
               cfg: LifetimeConfig | None = None, cost_model: CostModel | None = None,
               solver: SolverConfig | None = None, jobs: int = 1, battery_template: BatterySpec | None = None,
               keep_results: bool = False) -> SweepReport:
    """Simulate every catalog model over its life and rank by NPV."""
    models = validate_catalog(catalog)
    cfg = cfg or LifetimeConfig()
    if cfg.resolution is not None and cfg.resolution != year.resolution.step_minutes:
        year = resample(year, cfg.resolution)
    tasks = [_Task(i, year, plant, _battery(e, p, battery_template), params or DegradationParams(), cfg,
                   solver or SolverConfig(), cost_model or CostModel(), keep_results)
             for i, (e, p) in enumerate(models)]
    runs = _run_all(tasks, jobs)
    return SweepReport(runs, rank_by_npv(runs))


def _delta(value, ref):
    if isinstance(value, str) or isinstance(ref, str) or value is None or ref is None:
        return None
    return value - ref


def resolution_sensitivity(year: SeriesFrame, plant, model: tuple[float, float],
                           params: DegradationParams | None = None, cfg: LifetimeConfig | None = None,
                           cost_model: CostModel | None = None, resolutions=RESOLUTIONS,
                           solver: SolverConfig | None = None, jobs: int = 1,
                           battery_template: BatterySpec | None = None,
                           keep_results: bool = False) -> SweepReport:
    """Simulate one model at each resolution; deltas are relative to the finest one."""
    resolutions = sorted({int(r) for r in resolutions})
    if not resolutions:
        raise ValueError("no resolutions given")
    if resolutions[0] != year.resolution.step_minutes:
        raise ValueError(f"base data is at {year.resolution.step_minutes} min, "
                         f"finest requested resolution is {resolutions[0]} min")
    (e, p), = validate_catalog([model])
    cfg = replace(cfg or LifetimeConfig(), resolution=None)
    battery = _battery(e, p, battery_template)
    tasks = [_Task(i, resample(year, r), plant, battery, params or DegradationParams(), cfg,
                   solver or SolverConfig(), cost_model or CostModel(), keep_results)
             for i, r in enumerate(resolutions)]
    runs = _run_all(tasks, jobs)
    deltas = []
    ref = runs[0]
    for run in runs:
        d = {"resolution_min": run.resolution}
        if run.failed or ref.failed:
            d.update({k: None for k in DELTA_KEYS})
        else:
            a, b = run.row(), ref.row()
            d.update({k: _delta(a[k], b[k]) for k in DELTA_KEYS})
            d["t_eol_rel"] = (a["t_eol_years"] - b["t_eol_years"]) / b["t_eol_years"]
        deltas.append(d)
    return SweepReport(runs, rank_by_npv(runs), deltas)


@dataclass
class HemsComparison:
    optimal: ModelRun
    greedy: ModelRun
    windows_compared: int = 0
    windows_dominated: int = 0
    max_violation_eur: float = 0.0

    @property
    def dominance(self) -> bool:
        return self.windows_compared > 0 and self.windows_dominated == self.windows_compared

    def to_dict(self) -> dict:
        return {"optimal": self.optimal.row(), "greedy": self.greedy.row(),
                "windows_compared": self.windows_compared, "windows_dominated": self.windows_dominated,
                "max_violation_eur": self.max_violation_eur, "dominance": self.dominance}


def compare_hems(year: SeriesFrame, plant, model: tuple[float, float],
                 params: DegradationParams | None = None, cfg: LifetimeConfig | None = None,
                 cost_model: CostModel | None = None, solver: SolverConfig | None = None,
                 jobs: int = 1, battery_template: BatterySpec | None = None, tol: float = 1e-6,
                 keep_results: bool = False) -> HemsComparison:
    """Optimal versus greedy self-consumption dispatch over the battery life.

    The optimal run also dispatches the greedy rule from its own carried state
    in every window, so each window's costs are compared from identical
    (SOC, capacity, degradation cost).
    """
    (e, p), = validate_catalog([model])
    cfg = cfg or LifetimeConfig()
    if cfg.resolution is not None and cfg.resolution != year.resolution.step_minutes:
        year = resample(year, cfg.resolution)
    battery = _battery(e, p, battery_template)
    common = (year, plant, battery, params or DegradationParams())
    tail = (solver or SolverConfig(), cost_model or CostModel())
    tasks = [_Task(0, *common, replace(cfg, policy="optimal", shadow_greedy=True), *tail, True),
             _Task(1, *common, replace(cfg, policy="greedy", shadow_greedy=False), *tail, keep_results)]
    opt, greedy = _run_all(tasks, jobs)
    cmp = HemsComparison(opt, greedy)
    if not opt.failed:
        for w in opt.result.window_log:
            if math.isnan(w.greedy_cost_eur):
                continue
            cmp.windows_compared += 1
            excess = w.objective_eur - w.greedy_cost_eur
            if excess <= tol * max(1.0, abs(w.greedy_cost_eur)):
                cmp.windows_dominated += 1
            cmp.max_violation_eur = max(cmp.max_violation_eur, excess)
        if not keep_results:
            opt.result = None
    return cmp
