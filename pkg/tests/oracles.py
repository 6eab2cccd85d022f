"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import math

import numpy as np


def dp_dispatch(pv, load, price, t_s, inverter, grid, battery, e_b, c_bd, soc_init, delta=1e-3):
    """Minimum window cost by dynamic programming over a SOC grid of ``delta`` kWh.

    With one direction per device and no curtailment, the flows of a step are
    fixed by its SOC change, so the grid search enumerates every dispatch whose
    SOC trajectory lies on ``soc_init + j * delta``.
    Returns ``(cost, soc_path)``; cost is ``inf`` when no grid path is feasible.
    """
    sq = math.sqrt(battery.eta_roundtrip)
    eta = inverter.eta_inv
    lo, hi = battery.soc_min_frac * e_b, battery.soc_max_frac * e_b
    j_lo = math.ceil((lo - soc_init) / delta - 1e-9)
    j_hi = math.floor((hi - soc_init) / delta + 1e-9)
    levels = soc_init + delta * np.arange(j_lo, j_hi + 1)
    start = -j_lo
    n_lev = len(levels)

    tp_max = min(inverter.p_dc_max, inverter.p_ac_max / eta)
    fp_min = max(inverter.p_dc_min, -inverter.p_ac_max * eta)

    d_soc = levels[None, :] - levels[:, None]  # from row to column
    p_fs = np.where(d_soc < 0, -d_soc * sq / t_s, 0.0)
    p_ts = np.where(d_soc > 0, -d_soc / (sq * t_s), 0.0)
    ok_batt = (p_fs <= battery.p_discharge_max + 1e-12) & (p_ts >= battery.p_charge_max - 1e-12)

    value = np.full(n_lev, np.inf)
    value[start] = 0.0
    parents = []
    for k in range(len(pv)):
        x = pv[k] + p_fs + p_ts  # net DC power into the inverter
        ok = ok_batt & (x <= tp_max + 1e-12) & (x >= fp_min - 1e-12)
        ac = np.where(x >= 0, x * eta, x / eta)
        net = load[k] - ac
        ok &= (net <= grid.p_import_max + 1e-12) & (net >= grid.p_export_max - 1e-12)
        step = np.maximum(net, 0.0) * price[k] * t_s + p_fs * c_bd * t_s
        total = np.where(ok, value[:, None] + step, np.inf)
        arg = np.argmin(total, axis=0)
        value = total[arg, np.arange(n_lev)]
        parents.append(arg)
    end = int(np.argmin(value))
    cost = float(value[end])
    if not math.isfinite(cost):
        return cost, None
    path = [end]
    for arg in reversed(parents):
        path.append(int(arg[path[-1]]))
    return cost, levels[np.array(path[::-1])]


def dp_error_bound(price, t_s, inverter, battery, c_bd, delta=1e-3):
    """Cost gap allowed by snapping an optimal SOC path onto the grid.

    Each SOC change moves by at most ``2 * delta``; one kWh of SOC change is
    worth at most (price + c_bd) / (sqrt(eta_b) * eta_inv) in window cost.
    """
    sens = (np.asarray(price) + c_bd) / (math.sqrt(battery.eta_roundtrip) * inverter.eta_inv)
    return float(np.sum(2 * delta * sens))


def naive_rainflow(trace):
    """Four-point rainflow by repeated rescans; ``[(range, mean, weight)]``."""
    pts = [float(v) for v in trace]
    # drop repeats, then non-extrema
    pts = [p for i, p in enumerate(pts) if i == 0 or p != pts[i - 1]]
    changed = True
    while changed:
        changed = False
        for i in range(1, len(pts) - 1):
            if (pts[i] - pts[i - 1]) * (pts[i + 1] - pts[i]) > 0:
                del pts[i]
                changed = True
                break
    cycles = []
    changed = True
    while changed:
        changed = False
        for i in range(len(pts) - 3):
            a, b, c, d = pts[i:i + 4]
            if abs(c - b) <= abs(b - a) and abs(c - b) <= abs(d - c):
                cycles.append((abs(c - b), (b + c) / 2, 1.0))
                del pts[i + 1:i + 3]
                changed = True
                break
    cycles += [(abs(b - a), (a + b) / 2, 0.5) for a, b in zip(pts[:-1], pts[1:])]
    return cycles


def loss_curve(f, alpha=5.75e-2, beta=121.0):
    return 1 - alpha * math.exp(-beta * f) - (1 - alpha) * math.exp(-f)


def s_temperature(temp_c, k_t=6.93e-2, t_ref=25.0):
    return math.exp(k_t * (temp_c - t_ref) * (t_ref + 273.15) / (temp_c + 273.15))


def s_dod(d, k1=1.40e5, k2=-5.01e-1, k3=-1.23e5):
    return 1.0 / (k1 * d ** k2 + k3)


def s_soc(sigma, k_sigma=1.04, sigma_ref=0.5):
    return math.exp(k_sigma * (sigma - sigma_ref))
