"""Per-window PV/battery/grid dispatch.

Sign conventions (kW, one value per step):

* ``p_fp <= 0`` AC->DC draw on the inverter DC side, ``p_tp >= 0`` DC->AC input
* ``p_fpac >= 0`` inverter AC output, ``p_tpac <= 0`` inverter AC draw
* ``p_fg >= 0`` grid import, ``p_tg <= 0`` grid export
* ``p_fs >= 0`` battery discharge, ``p_ts <= 0`` battery charge
* ``soc`` stored energy in kWh at the end of each step

The window problem is a MILP (three direction binaries per step) minimising
import cost plus a per-kWh charge on battery discharge. It is solved with
HiGHS through :func:`scipy.optimize.milp`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .data import SeriesFrame

FLOWS = ("p_fp", "p_tp", "p_fpac", "p_tpac", "p_fg", "p_tg", "p_fs", "p_ts")
BINARIES = ("i_p", "i_g", "i_s")
VARIABLES = FLOWS + ("soc",) + BINARIES


class DispatchError(RuntimeError):
    pass


class InfeasibleError(DispatchError):
    """No dispatch satisfies the window constraints.

    ``family`` names the first constraint class found violated.
    """

    def __init__(self, family: str, detail: str = ""):
        self.family = family
        super().__init__(f"infeasible ({family}){': ' + detail if detail else ''}")


class SolverTimeout(DispatchError):
    pass


@dataclass(frozen=True)
class InverterSpec:
    eta_inv: float = 0.978
    p_ac_max: float = 6.0
    p_dc_max: float = 9.0
    p_dc_min: float = -5.0

    def __post_init__(self):
        if not 0 < self.eta_inv <= 1:
            raise ValueError("eta_inv must be in (0, 1]")
        if self.p_ac_max <= 0 or self.p_dc_max <= 0:
            raise ValueError("inverter power limits must be positive")
        if self.p_dc_min > 0:
            raise ValueError("p_dc_min must be <= 0")


@dataclass(frozen=True)
class GridSpec:
    p_import_max: float
    p_export_max: float = -10.0

    def __post_init__(self):
        if self.p_import_max <= 0:
            raise ValueError("p_import_max must be positive")
        if self.p_export_max > 0:
            raise ValueError("p_export_max must be <= 0")


@dataclass(frozen=True)
class BatterySpec:
    e_nominal: float
    p_discharge_max: float
    p_charge_max: float
    eta_roundtrip: float = 0.94
    soc_min_frac: float = 0.2
    soc_max_frac: float = 0.8
    soh_eol: float = 0.8
    warranted_throughput: float | None = None

    def __post_init__(self):
        if self.e_nominal <= 0:
            raise ValueError("e_nominal must be positive")
        if self.p_discharge_max < 0 or self.p_charge_max > 0:
            raise ValueError("p_discharge_max must be >= 0 and p_charge_max <= 0")
        if not 0 < self.eta_roundtrip <= 1:
            raise ValueError("eta_roundtrip must be in (0, 1]")
        if not 0 <= self.soc_min_frac < self.soc_max_frac <= 1:
            raise ValueError("need 0 <= soc_min_frac < soc_max_frac <= 1")
        if not 0 < self.soh_eol < 1:
            raise ValueError("soh_eol must be in (0, 1)")
        if self.warranted_throughput is None:
            # 8000 equivalent full cycles over the usable 0.2-0.8 band
            object.__setattr__(self, "warranted_throughput", 4800.0 * self.e_nominal)
        if self.warranted_throughput <= 0:
            raise ValueError("warranted_throughput must be positive")

    @classmethod
    def from_rating(cls, e_nominal: float, power: float, **kwargs) -> "BatterySpec":
        """Symmetric charge/discharge power rating."""
        return cls(e_nominal, power, -power, **kwargs)

    @property
    def power(self) -> float:
        return max(self.p_discharge_max, -self.p_charge_max)

    def soc_bounds(self, e_b: float) -> tuple[float, float]:
        return self.soc_min_frac * e_b, self.soc_max_frac * e_b


@dataclass(frozen=True)
class SolverConfig:
    rel_mip_gap: float = 1e-4
    time_limit: float = 60.0
    feasibility_tol: float = 1e-6

    def __post_init__(self):
        if self.rel_mip_gap < 0 or self.time_limit <= 0 or self.feasibility_tol <= 0:
            raise ValueError("invalid solver configuration")


@dataclass
class WindowProblem:
    """Linear description ``cl <= A x <= cu``, ``lb <= x <= ub`` of one window."""

    n: int
    t_s: float
    pv: np.ndarray
    load: np.ndarray
    price: np.ndarray
    c_bd: float
    soc_init: float
    e_b: float
    inverter: InverterSpec
    grid: GridSpec
    battery: BatterySpec
    c: np.ndarray
    A: sparse.csr_matrix
    cl: np.ndarray
    cu: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integrality: np.ndarray
    row_families: dict[str, slice] = field(default_factory=dict)

    def cols(self, name: str) -> slice:
        i = VARIABLES.index(name)
        return slice(i * self.n, (i + 1) * self.n)


@dataclass
class DispatchSolution:
    t_s: float
    soc_init: float
    p_fp: np.ndarray
    p_tp: np.ndarray
    p_fpac: np.ndarray
    p_tpac: np.ndarray
    p_fg: np.ndarray
    p_tg: np.ndarray
    p_fs: np.ndarray
    p_ts: np.ndarray
    soc: np.ndarray
    i_p: np.ndarray
    i_g: np.ndarray
    i_s: np.ndarray
    objective_value: float
    optimal: bool = True
    method: str = "milp"
    mip_gap: float = 0.0

    def __len__(self) -> int:
        return len(self.soc)

    @property
    def soc_trace(self) -> np.ndarray:
        """SOC including the initial value, length ``n + 1``."""
        return np.concatenate(([self.soc_init], self.soc))

    @property
    def discharged_kwh(self) -> float:
        return float(np.sum(self.p_fs) * self.t_s)

    @property
    def imported_kwh(self) -> float:
        return float(np.sum(self.p_fg) * self.t_s)

    def to_frame(self):
        import pandas as pd

        cols = {name: getattr(self, name) for name in FLOWS + ("soc",) + BINARIES}
        return pd.DataFrame(cols)

    @classmethod
    def from_vector(cls, x: np.ndarray, problem: WindowProblem, **kwargs) -> "DispatchSolution":
        n = problem.n
        parts = {name: np.array(x[i * n:(i + 1) * n], dtype=float) for i, name in enumerate(VARIABLES)}
        for name in BINARIES:
            parts[name] = np.round(parts[name]).astype(int)
        return cls(t_s=problem.t_s, soc_init=problem.soc_init, **parts, **kwargs)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([np.asarray(getattr(self, name), dtype=float) for name in VARIABLES])


def window_cost(solution: DispatchSolution, price, c_bd: float) -> float:
    """Import cost plus degradation charge on discharged energy, in EUR."""
    price = np.asarray(price, dtype=float)
    return float(np.sum(solution.p_fg * price) * solution.t_s
                 + np.sum(solution.p_fs) * solution.t_s * c_bd)


def build_window_problem(window: SeriesFrame, inverter: InverterSpec, grid: GridSpec,
                         battery: BatterySpec, e_b_current: float, c_bd: float,
                         soc_init: float) -> WindowProblem:
    n = len(window)
    if n == 0:
        raise ValueError("zero-length window")
    t = window.t_s
    soc_min, soc_max = battery.soc_bounds(e_b_current)
    tol = 1e-9 * max(1.0, e_b_current)
    if not soc_min - tol <= soc_init <= soc_max + tol:
        raise ValueError(f"soc_init {soc_init:.6g} kWh outside [{soc_min:.6g}, {soc_max:.6g}]")
    soc_init = min(max(soc_init, soc_min), soc_max)
    eta = inverter.eta_inv
    sq = math.sqrt(battery.eta_roundtrip)

    nv = len(VARIABLES) * n
    k = np.arange(n)

    def col(name):
        return VARIABLES.index(name) * n + k

    rows, cols, vals = [], [], []
    cl, cu = [], []
    families = {}
    r0 = 0

    def add(family, terms, lo, hi):
        nonlocal r0
        r = r0 + k
        for name, coef in terms:
            rows.append(r)
            cols.append(col(name))
            vals.append(np.broadcast_to(np.asarray(coef, dtype=float), (n,)))
        cl.append(np.broadcast_to(np.asarray(lo, dtype=float), (n,)))
        cu.append(np.broadcast_to(np.asarray(hi, dtype=float), (n,)))
        families[family] = slice(r0, r0 + n)
        r0 += n

    pv, load = window.pv_dc, window.load_ac
    add("dc_balance", [("p_fp", 1), ("p_tp", 1), ("p_fs", -1), ("p_ts", -1)], pv, pv)
    add("ac_balance", [("p_fpac", 1), ("p_tpac", 1), ("p_fg", 1), ("p_tg", 1)], load, load)
    add("inverter_output", [("p_fpac", 1), ("p_tp", -eta)], 0, 0)
    add("inverter_input", [("p_tpac", 1), ("p_fp", -1 / eta)], 0, 0)
    # stored energy: charging scaled by sqrt(eta_b), discharging by 1/sqrt(eta_b)
    rhs = np.zeros(n)
    rhs[0] = soc_init
    add("soc_recursion", [("soc", 1), ("p_ts", sq * t), ("p_fs", t / sq)], rhs, rhs)
    inf = np.inf
    add("dir_fp", [("p_fp", 1), ("i_p", inverter.p_dc_min)], inverter.p_dc_min, inf)
    add("dir_tp", [("p_tp", 1), ("i_p", -inverter.p_dc_max)], -inf, 0)
    add("dir_fpac", [("p_fpac", 1), ("i_p", -inverter.p_ac_max)], -inf, 0)
    add("dir_tpac", [("p_tpac", 1), ("i_p", -inverter.p_ac_max)], -inverter.p_ac_max, inf)
    add("dir_fg", [("p_fg", 1), ("i_g", -grid.p_import_max)], -inf, 0)
    add("dir_tg", [("p_tg", 1), ("i_g", grid.p_export_max)], grid.p_export_max, inf)
    add("dir_fs", [("p_fs", 1), ("i_s", -battery.p_discharge_max)], -inf, 0)
    add("dir_ts", [("p_ts", 1), ("i_s", battery.p_charge_max)], battery.p_charge_max, inf)

    rows_a = np.concatenate(rows)
    cols_a = np.concatenate(cols)
    vals_a = np.concatenate(vals)
    # soc_{k-1} coupling
    soc_rows = families["soc_recursion"].start + k[1:]
    rows_a = np.concatenate([rows_a, soc_rows])
    cols_a = np.concatenate([cols_a, col("soc")[:-1]])
    vals_a = np.concatenate([vals_a, -np.ones(n - 1)])
    A = sparse.csr_matrix((vals_a, (rows_a, cols_a)), shape=(r0, nv))

    bounds = {
        "p_fp": (inverter.p_dc_min, 0.0),
        "p_tp": (0.0, inverter.p_dc_max),
        "p_fpac": (0.0, inverter.p_ac_max),
        "p_tpac": (-inverter.p_ac_max, 0.0),
        "p_fg": (0.0, grid.p_import_max),
        "p_tg": (grid.p_export_max, 0.0),
        "p_fs": (0.0, battery.p_discharge_max),
        "p_ts": (battery.p_charge_max, 0.0),
        "soc": (soc_min, soc_max),
        "i_p": (0.0, 1.0),
        "i_g": (0.0, 1.0),
        "i_s": (0.0, 1.0),
    }
    lb = np.concatenate([np.full(n, bounds[v][0]) for v in VARIABLES])
    ub = np.concatenate([np.full(n, bounds[v][1]) for v in VARIABLES])
    integrality = np.zeros(nv, dtype=int)
    integrality[len(FLOWS + ("soc",)) * n:] = 1

    price = np.asarray(window.price, dtype=float)
    c = np.zeros(nv)
    c[col("p_fg")] = price * t
    c[col("p_fs")] = c_bd * t

    return WindowProblem(n=n, t_s=t, pv=np.asarray(pv), load=np.asarray(load), price=price,
                         c_bd=float(c_bd), soc_init=float(soc_init), e_b=float(e_b_current),
                         inverter=inverter, grid=grid, battery=battery, c=c, A=A,
                         cl=np.concatenate(cl), cu=np.concatenate(cu), lb=lb, ub=ub,
                         integrality=integrality, row_families=families)


_PAIRS = (("p_fs", "p_ts", "i_s"), ("p_fg", "p_tg", "i_g"), ("p_tp", "p_fp", "i_p"))


def _binaries_from_flows(x: np.ndarray, n: int, tol: float) -> np.ndarray | None:
    """Integer binaries consistent with complementary flows, or None."""
    for pos, neg, flag in _PAIRS:
        a = np.abs(x[VARIABLES.index(pos) * n:(VARIABLES.index(pos) + 1) * n])
        b = np.abs(x[VARIABLES.index(neg) * n:(VARIABLES.index(neg) + 1) * n])
        if np.any(np.minimum(a, b) > tol):
            return None
        x[VARIABLES.index(flag) * n:(VARIABLES.index(flag) + 1) * n] = (a >= b).astype(float)
    return x


def _diagnose(problem: WindowProblem) -> InfeasibleError:
    n = problem.n
    bad = np.nonzero(problem.lb > problem.ub)[0]
    if bad.size:
        name = VARIABLES[bad[0] // n]
        family = "soc_bounds" if name == "soc" else f"{name}_bounds"
        return InfeasibleError(family, f"step {bad[0] % n}")
    inv, grid, bat = problem.inverter, problem.grid, problem.battery
    ac_supply = grid.p_import_max + inv.p_ac_max
    short = np.nonzero(problem.load > ac_supply + 1e-9)[0]
    if short.size:
        return InfeasibleError("ac_balance", f"load exceeds import + inverter limits at step {short[0]}")
    dc_sink = min(inv.p_dc_max, inv.p_ac_max / inv.eta_inv) - bat.p_charge_max
    over = np.nonzero(problem.pv > dc_sink + 1e-9)[0]
    if over.size:
        return InfeasibleError("dc_balance", f"PV exceeds inverter + charge limits at step {over[0]}")
    return InfeasibleError("soc_recursion", "energy-limited: storage cannot absorb or supply the window")


def _highs(problem: WindowProblem, config: SolverConfig, relaxed: bool):
    options = {"time_limit": float(config.time_limit), "presolve": True}
    if relaxed:
        # flows and SOC only: balances, couplings and SOC recursion with box bounds
        nv = (len(FLOWS) + 1) * problem.n
        m = problem.row_families["soc_recursion"].stop
        return milp(problem.c[:nv],
                    constraints=LinearConstraint(problem.A[:m, :nv], problem.cl[:m], problem.cu[:m]),
                    bounds=Bounds(problem.lb[:nv], problem.ub[:nv]), options=options)
    options["mip_rel_gap"] = float(config.rel_mip_gap)
    return milp(problem.c, constraints=LinearConstraint(problem.A, problem.cl, problem.cu),
                bounds=Bounds(problem.lb, problem.ub), integrality=problem.integrality, options=options)


def solve(problem: WindowProblem, config: SolverConfig | None = None) -> DispatchSolution:
    """Optimal dispatch of one window.

    A relaxation without the direction binaries is solved first. When its
    flows are already pairwise complementary, binaries matching them make it
    feasible for the MILP and the relaxation bound proves optimality.
    Otherwise the full MILP is solved.
    """
    config = config or SolverConfig()
    if np.any(problem.lb > problem.ub):
        raise _diagnose(problem)

    res = _highs(problem, config, relaxed=True)
    if res.status == 2:
        raise _diagnose(problem)
    if res.status == 0 and res.x is not None:
        x = np.concatenate([res.x, np.zeros(len(BINARIES) * problem.n)])
        x = _binaries_from_flows(x, problem.n, 1e-9)
        if x is not None:
            return DispatchSolution.from_vector(x, problem, objective_value=float(problem.c @ x),
                                                optimal=True, method="lp", mip_gap=0.0)

    res = _highs(problem, config, relaxed=False)
    if res.status == 2:
        raise _diagnose(problem)
    if res.x is None:
        raise SolverTimeout(f"no incumbent within {config.time_limit} s (status {res.status})")
    optimal = res.status == 0
    gap = float(getattr(res, "mip_gap", 0.0) or 0.0)
    return DispatchSolution.from_vector(res.x, problem, objective_value=float(problem.c @ res.x),
                                        optimal=optimal, method="milp", mip_gap=gap)


@dataclass
class ResidualReport:
    residuals: dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.residuals.values())

    @property
    def worst(self) -> tuple[str, float]:
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]


def verify_solution(solution: DispatchSolution, problem: WindowProblem,
                    tolerance: float = 1e-6) -> ResidualReport:
    """Re-substitute a solution into every constraint family."""
    s = solution
    inv, grid, bat = problem.inverter, problem.grid, problem.battery
    t = problem.t_s
    sq = math.sqrt(bat.eta_roundtrip)
    pos = lambda v: float(np.max(np.maximum(v, 0.0), initial=0.0))  # noqa: E731

    prev = np.concatenate(([problem.soc_init], s.soc[:-1]))
    soc_next = prev - s.p_ts * sq * t - s.p_fs * t / sq
    soc_min, soc_max = problem.lb[problem.cols("soc")], problem.ub[problem.cols("soc")]

    box = 0.0
    x = s.to_vector()
    box = max(pos(problem.lb - x), pos(x - problem.ub))

    direction = max(
        pos(inv.p_dc_min * (1 - s.i_p) - s.p_fp), pos(s.p_tp - inv.p_dc_max * s.i_p),
        pos(s.p_fpac - inv.p_ac_max * s.i_p), pos(-inv.p_ac_max * (1 - s.i_p) - s.p_tpac),
        pos(s.p_fg - grid.p_import_max * s.i_g), pos(grid.p_export_max * (1 - s.i_g) - s.p_tg),
        pos(s.p_fs - bat.p_discharge_max * s.i_s), pos(bat.p_charge_max * (1 - s.i_s) - s.p_ts),
    )
    exclusivity = max(
        float(np.max(np.minimum(s.p_fs, -s.p_ts), initial=0.0)),
        float(np.max(np.minimum(s.p_fg, -s.p_tg), initial=0.0)),
        float(np.max(np.minimum(s.p_tp, -s.p_fp), initial=0.0)),
    )
    binaries = np.concatenate([s.i_p, s.i_g, s.i_s]).astype(float)
    integrality = float(np.max(np.minimum(np.abs(binaries), np.abs(binaries - 1)), initial=0.0))

    residuals = {
        "dc_balance": float(np.max(np.abs(s.p_fp + s.p_tp - problem.pv - s.p_fs - s.p_ts))),
        "ac_balance": float(np.max(np.abs(s.p_fpac + s.p_tpac + s.p_fg + s.p_tg - problem.load))),
        "inverter_coupling": float(max(np.max(np.abs(s.p_fpac - s.p_tp * inv.eta_inv)),
                                       np.max(np.abs(s.p_tpac - s.p_fp / inv.eta_inv)))),
        "soc_recursion": float(np.max(np.abs(s.soc - soc_next))),
        "soc_bounds": max(pos(soc_min - s.soc), pos(s.soc - soc_max)),
        "bounds": box,
        "direction": direction,
        "exclusivity": exclusivity,
        "integrality": integrality,
        "objective": abs(window_cost(s, problem.price, problem.c_bd) - s.objective_value),
    }
    return ResidualReport(residuals, tolerance)


def baseline_import_no_battery(window: SeriesFrame, inverter: InverterSpec,
                               grid: GridSpec) -> tuple[np.ndarray, bool]:
    """Grid import without storage; second item flags steps above the import cap."""
    deliverable = np.minimum(window.pv_dc * inverter.eta_inv, inverter.p_ac_max)
    imp = np.maximum(window.load_ac - deliverable, 0.0)
    over = bool(np.any(imp > grid.p_import_max))
    return np.minimum(imp, grid.p_import_max), over


def greedy_self_consumption_dispatch(window: SeriesFrame, inverter: InverterSpec, grid: GridSpec,
                                     battery: BatterySpec, e_b_current: float, soc_init: float,
                                     c_bd: float = 0.0) -> DispatchSolution:
    """Rule-based self-consumption policy.

    PV covers the load first, surplus charges the battery, the rest is
    exported; a deficit is covered by the battery before importing. The
    battery is never charged from the grid.
    """
    n = len(window)
    t = window.t_s
    eta = inverter.eta_inv
    sq = math.sqrt(battery.eta_roundtrip)
    soc_min, soc_max = battery.soc_bounds(e_b_current)
    if not soc_min - 1e-9 <= soc_init <= soc_max + 1e-9:
        raise ValueError("soc_init outside SOC bounds")
    soc = min(max(soc_init, soc_min), soc_max)
    x_cap = min(inverter.p_dc_max, inverter.p_ac_max / eta)
    c_max_power, d_max_power = -battery.p_charge_max, battery.p_discharge_max

    out = {name: np.zeros(n) for name in FLOWS + ("soc",)}
    flags = {name: np.zeros(n, dtype=int) for name in BINARIES}
    pv_all, load_all = window.pv_dc.tolist(), window.load_ac.tolist()
    for k in range(n):
        pv, load = pv_all[k], load_all[k]
        c_max = min(c_max_power, max(soc_max - soc, 0.0) / (sq * t))
        d_max = min(d_max_power, max(soc - soc_min, 0.0) * sq / t)
        x_hi = min(x_cap, (load - grid.p_export_max) / eta)
        surplus = pv - load / eta
        c = d = 0.0
        if surplus >= 0:
            c = min(surplus, c_max)
        else:
            d = min(-surplus, d_max, max(x_hi - pv, 0.0))
        if pv - c + d > x_hi:
            c = pv - x_hi
            d = 0.0
            if c > c_max + 1e-9:
                raise InfeasibleError("dc_balance", f"PV cannot be absorbed at step {k}")
        x = pv - c + d
        ac_out = eta * x
        net = load - ac_out
        fg, tg = max(net, 0.0), min(net, 0.0)
        if fg > grid.p_import_max + 1e-9:
            raise InfeasibleError("ac_balance", f"load exceeds import limit at step {k}")
        soc = soc + sq * c * t - d * t / sq
        soc = min(max(soc, soc_min), soc_max)
        out["p_tp"][k] = x
        out["p_fpac"][k] = ac_out
        out["p_fg"][k], out["p_tg"][k] = fg, tg
        out["p_fs"][k], out["p_ts"][k] = d, -c
        out["soc"][k] = soc
        flags["i_p"][k] = 1
        flags["i_g"][k] = int(fg > 0 or tg == 0)
        flags["i_s"][k] = int(d > 0)
    sol = DispatchSolution(t_s=t, soc_init=soc_init, **out, **flags, objective_value=0.0,
                           optimal=False, method="greedy")
    sol.objective_value = window_cost(sol, window.price, c_bd)
    return sol


def write_lp(problem: WindowProblem, path) -> None:
    """Dump the window problem in CPLEX LP text format."""
    n = problem.n
    names = [f"{v}_{k}" for v in VARIABLES for k in range(n)]

    def expr(idx, coefs):
        parts = []
        for j, a in zip(idx, coefs):
            if a == 0:
                continue
            parts.append(f"{'-' if a < 0 else '+'} {abs(a):.12g} {names[j]}")
        text = " ".join(parts) or "0"
        return text[2:] if text.startswith("+ ") else text

    lines = ["\\ battery dispatch window", "Minimize", " obj: " + expr(range(len(problem.c)), problem.c),
             "Subject To"]
    A = problem.A.tocsr()
    inv_fam = {}
    for fam, sl in problem.row_families.items():
        for r in range(sl.start, sl.stop):
            inv_fam[r] = f"{fam}_{r - sl.start}"
    for r in range(A.shape[0]):
        row = A.getrow(r)
        body = expr(row.indices, row.data)
        lo, hi = problem.cl[r], problem.cu[r]
        if lo == hi:
            lines.append(f" {inv_fam[r]}: {body} = {lo:.12g}")
        else:
            if np.isfinite(lo):
                lines.append(f" {inv_fam[r]}_lo: {body} >= {lo:.12g}")
            if np.isfinite(hi):
                lines.append(f" {inv_fam[r]}_hi: {body} <= {hi:.12g}")
    lines.append("Bounds")
    for j, name in enumerate(names):
        lines.append(f" {problem.lb[j]:.12g} <= {name} <= {problem.ub[j]:.12g}")
    lines.append("Binaries")
    lines.append(" " + " ".join(names[j] for j in np.nonzero(problem.integrality)[0]))
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
