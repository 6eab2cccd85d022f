"""Command-line front end: ``bess-sizing <command> [options]``.

Exit codes: 0 success, 2 configuration or input error, 3 solver error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config, validate
from .data import DataError, resample
from .dispatch import (DispatchError, build_window_problem, greedy_self_consumption_dispatch,
                       solve, verify_solution, write_lp)
from .economics import battery_capital_cost, economic_report
from .experiments import compare_hems, resolution_sensitivity, size_sweep
from .lifetime import DOD_EDGES, SOC_EDGES, CheckpointError, LifetimeError, simulate_lifetime

logger = logging.getLogger("bess_sizing")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


class SolverFailure(RuntimeError):
    pass


def _write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def _write_rows(path: Path, rows: list[dict]) -> Path:
    keys: list[str] = []
    for row in rows:
        keys += [k for k in row if k not in keys]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return path


def _resolved(args) -> RunConfig:
    cfg = load_config(args.config)
    life = cfg.lifetime
    if args.resolution is not None:
        life = replace(life, resolution=args.resolution)
    if args.policy is not None:
        life = replace(life, policy=args.policy)
    exp = cfg.experiment
    if args.seed is not None:
        exp = replace(exp, seed=args.seed)
    if args.jobs is not None:
        exp = replace(exp, jobs=args.jobs)
    out = Path(args.output) if args.output else cfg.output
    cfg = replace(cfg, lifetime=life, experiment=exp, output=out)
    validate(cfg)
    return cfg


def _model(cfg: RunConfig, index: int | None) -> tuple[float, float]:
    if index is None:
        return cfg.battery.e_nominal, cfg.battery.power
    if not 1 <= index <= len(cfg.catalog):
        raise ConfigError(f"--model must be between 1 and {len(cfg.catalog)}")
    return cfg.catalog[index - 1]


def _data(cfg: RunConfig):
    year = cfg.load_data()
    res = cfg.lifetime.resolution
    if res is not None and res != year.resolution.step_minutes:
        year = resample(year, res)
    return year


def cmd_dispatch(cfg: RunConfig, args) -> int:
    year = _data(cfg)
    steps = cfg.lifetime.window_days * year.resolution.steps_per_day
    start = (args.window - 1) * steps
    if args.window < 1 or start >= len(year):
        raise ConfigError(f"--window must be between 1 and {max(1, len(year) // steps)}")
    window = year.slice(start, start + steps)
    e, p = _model(cfg, args.model)
    battery = cfg.battery.spec(e, p) if args.model else cfg.battery.spec()
    capital = battery_capital_cost(battery, p, cfg.cost)
    c_bd = args.c_bd if args.c_bd is not None else capital / battery.warranted_throughput
    soc = cfg.lifetime.soc_init_frac * battery.e_nominal
    label = f"window {args.window}"
    try:
        if cfg.lifetime.policy == "greedy":
            sol = greedy_self_consumption_dispatch(window, cfg.inverter, cfg.grid, battery, battery.e_nominal,
                                                   soc, c_bd)
            problem = None
        else:
            problem = build_window_problem(window, cfg.inverter, cfg.grid, battery, battery.e_nominal, c_bd, soc)
            if args.dump_lp:
                write_lp(problem, cfg.output / f"window_{args.window}.lp")
            sol = solve(problem, cfg.solver)
    except DispatchError as exc:
        raise SolverFailure(f"{label}: {exc}") from exc
    frame = sol.to_frame()
    frame.insert(0, "load_ac", window.load_ac)
    frame.insert(0, "pv_dc", window.pv_dc)
    frame.insert(0, "price", window.price)
    frame.insert(0, "timestamp", [t.isoformat() for t in window.timestamps])
    path = cfg.output / f"dispatch_window_{args.window}.csv"
    frame.to_csv(path, index=False, float_format="%.10g")
    report = {"window": args.window, "steps": len(sol), "c_bd": c_bd, "objective_eur": sol.objective_value,
              "method": sol.method, "optimal": sol.optimal, "imported_kwh": sol.imported_kwh,
              "discharged_kwh": sol.discharged_kwh}
    if problem is not None:
        check = verify_solution(sol, problem, tolerance=max(1e-6, cfg.solver.feasibility_tol))
        report["max_residual"] = check.worst[1]
        report["worst_family"] = check.worst[0]
    _write_json(cfg.output / f"dispatch_window_{args.window}.json", report)
    print(f"{label}: objective {sol.objective_value:.4f} EUR ({sol.method}) -> {path}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    year = cfg.load_data()
    e, p = _model(cfg, args.model)
    battery = cfg.battery.spec(e, p) if args.model else cfg.battery.spec()
    capital = battery_capital_cost(battery, p, cfg.cost)
    log_path = cfg.output / "window_log.csv"
    ckpt = cfg.output / "checkpoint.json"

    def progress(rec):
        logger.info("window %d  SOH %.4f  c_bd %.4f EUR/kWh", rec.window + 1, 1 - rec.loss, rec.c_bd)

    try:
        res = simulate_lifetime(year, cfg.plant, battery, cfg.degradation, cfg.lifetime, cfg.solver,
                                capital=capital, log_path=log_path, checkpoint_path=ckpt,
                                resume=args.resume, progress=progress)
    except LifetimeError as exc:
        raise SolverFailure(str(exc)) from exc
    summary = res.summary()
    econ = economic_report(res, cfg.cost)
    _write_json(cfg.output / "summary.json", {"lifetime": summary, "economics": econ.to_dict()})
    hist_rows = [{"dod_lo": float(DOD_EDGES[i]), "dod_hi": float(DOD_EDGES[i + 1]),
                  "soc_lo": float(SOC_EDGES[j]), "soc_hi": float(SOC_EDGES[j + 1]),
                  "cycles": float(res.cycle_histogram[i, j])}
                 for i in range(len(DOD_EDGES) - 1) for j in range(len(SOC_EDGES) - 1)]
    _write_rows(cfg.output / "cycle_histogram.csv", hist_rows)
    if cfg.experiment.plots:
        from .plots import dod_histogram

        dod_histogram(res.cycle_histogram, DOD_EDGES, cfg.output / "dod_histogram.svg")
    dpb = econ.to_dict()["dpb"]
    print(f"{e:g} kWh / {p:g} kW: T_EOL {res.t_eol:.2f} y ({res.status}), NPV {econ.npv:.2f} EUR, "
          f"DPB {dpb}, SCR {econ.scr:.3f}, SSR {econ.ssr:.3f}")
    return EXIT_OK


def _finish_report(report, name: str, cfg: RunConfig) -> int:
    _write_json(cfg.output / f"{name}.json", report.to_dict())
    _write_rows(cfg.output / f"{name}.csv", report.rows())
    for row in report.rows():
        if row["status"] == "failed":
            print(f"model {row['model']} ({row['e_nominal_kwh']:g} kWh, {row['resolution_min']} min) "
                  f"FAILED: {row['error']}")
        else:
            print(f"model {row['model']} ({row['e_nominal_kwh']:g} kWh, {row['resolution_min']} min): "
                  f"T_EOL {row['t_eol_years']:.2f} y, NPV {row['npv']:.2f} EUR, DPB {row['dpb']}")
    return EXIT_OK if report.complete else EXIT_SOLVER


def cmd_size(cfg: RunConfig, args) -> int:
    report = size_sweep(cfg.load_data(), cfg.plant, cfg.catalog, cfg.degradation, cfg.lifetime, cfg.cost,
                        cfg.solver, cfg.experiment.jobs, cfg.battery.spec())
    if cfg.experiment.plots:
        from .plots import npv_vs_capacity

        npv_vs_capacity(report.rows(), cfg.output / "npv_vs_capacity.svg")
    best = report.best
    if best is not None:
        print(f"best model: {best.index + 1} ({best.e_nominal:g} kWh / {best.power:g} kW)")
    return _finish_report(report, "size_sweep", cfg)


def cmd_sensitivity(cfg: RunConfig, args) -> int:
    report = resolution_sensitivity(cfg.load_data(), cfg.plant, _model(cfg, args.model), cfg.degradation,
                                    cfg.lifetime, cfg.cost, cfg.experiment.resolutions, cfg.solver,
                                    cfg.experiment.jobs, cfg.battery.spec())
    if cfg.experiment.plots:
        from .plots import lifetime_vs_resolution

        lifetime_vs_resolution(report.rows(), cfg.output / "lifetime_vs_resolution.svg")
    _write_rows(cfg.output / "sensitivity_deltas.csv", report.deltas)
    return _finish_report(report, "sensitivity", cfg)


def cmd_compare(cfg: RunConfig, args) -> int:
    cmp = compare_hems(cfg.load_data(), cfg.plant, _model(cfg, args.model), cfg.degradation, cfg.lifetime,
                       cfg.cost, cfg.solver, cfg.experiment.jobs, cfg.battery.spec())
    _write_json(cfg.output / "compare.json", cmp.to_dict())
    _write_rows(cfg.output / "compare.csv", [cmp.optimal.row(), cmp.greedy.row()])
    for run in (cmp.optimal, cmp.greedy):
        row = run.row()
        if run.failed:
            print(f"{run.policy}: FAILED: {run.error}")
        else:
            print(f"{run.policy}: T_EOL {row['t_eol_years']:.2f} y, NPV {row['npv']:.2f} EUR, "
                  f"SCR {row['scr']:.3f}, SSR {row['ssr']:.3f}")
    print(f"optimal cost <= greedy cost in {cmp.windows_dominated}/{cmp.windows_compared} windows")
    return EXIT_SOLVER if cmp.optimal.failed or cmp.greedy.failed else EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> int:
    year = cfg.load_data()
    days = len(year) / year.resolution.steps_per_day
    pv = float(year.pv_dc.sum() * year.t_s)
    load = float(year.load_ac.sum() * year.t_s)
    print(f"config ok: {len(year)} steps at {year.resolution.step_minutes} min ({days:g} days), "
          f"PV {pv:.1f} kWh, load {load:.1f} kWh, ratio {pv / load if load else float('nan'):.2f}")
    return EXIT_OK


COMMANDS = {
    "dispatch": (cmd_dispatch, "solve one dispatch window and write its flows"),
    "simulate": (cmd_simulate, "simulate one battery over its lifetime"),
    "size": (cmd_size, "lifetime + economics for every catalog model, ranked by NPV"),
    "sensitivity": (cmd_sensitivity, "repeat one model at several time resolutions"),
    "compare": (cmd_compare, "optimal versus greedy self-consumption dispatch"),
    "validate": (cmd_validate, "check the configuration and input data"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--resolution", type=int, choices=(5, 15, 30, 60), help="time step in minutes")
    common.add_argument("--policy", choices=("optimal", "greedy"))
    common.add_argument("--jobs", type=int, help="parallel sweep entries")
    common.add_argument("--seed", type=int, help="seed for synthetic data")
    common.add_argument("--output", help="output directory (overrides paths.output)")
    common.add_argument("--dry-run", action="store_true", help="validate and print the resolved config")
    common.add_argument("--dump-lp", action="store_true", help="also write the window problem as an LP file")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="bess-sizing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("dispatch", "simulate", "sensitivity", "compare"):
            p.add_argument("--model", type=int, help="catalog model number (default: [battery] section)")
        if name == "dispatch":
            p.add_argument("--window", type=int, default=1, help="1-based window number")
            p.add_argument("--c-bd", type=float, help="degradation cost EUR/kWh (default: initial value)")
        if name == "simulate":
            p.add_argument("--resume", action="store_true", help="continue from the output checkpoint")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolved(args)
        if args.dry_run:
            print(json.dumps(cfg.to_dict(), indent=2, default=str))
            return EXIT_OK
        cfg.output.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command][0](cfg, args)
    except (ConfigError, DataError, CheckpointError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
