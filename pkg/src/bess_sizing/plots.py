"""Optional SVG figures (needs matplotlib; install the ``plots`` extra)."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise RuntimeError("plotting needs matplotlib (pip install 'artifact[plots]')") from exc
    matplotlib.use("Agg")
    # fixed salt and no date stamp so re-runs write identical files
    matplotlib.rcParams["svg.hashsalt"] = "bess-sizing"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    fig.clf()
    return path


def npv_vs_capacity(rows: list[dict], path) -> Path:
    plt = _pyplot()
    ok = [r for r in rows if r.get("status") != "failed"]
    e = [r["e_nominal_kwh"] for r in ok]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(e, [r["npv"] for r in ok], "o-", label="NPV")
    ax.axhline(0.0, color="grey", lw=0.8)
    ax.set_xlabel("battery capacity (kWh)")
    ax.set_ylabel("NPV (EUR)")
    ax2 = ax.twinx()
    ax2.plot(e, [r["t_eol_years"] for r in ok], "s--", color="tab:orange", label="lifetime")
    ax2.set_ylabel("lifetime (years)")
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def lifetime_vs_resolution(rows: list[dict], path) -> Path:
    plt = _pyplot()
    ok = [r for r in rows if r.get("status") != "failed"]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r["resolution_min"] for r in ok], [r["t_eol_years"] for r in ok], "o-")
    ax.set_xlabel("time resolution (min)")
    ax.set_ylabel("lifetime (years)")
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def dod_histogram(hist: np.ndarray, dod_edges: np.ndarray, path) -> Path:
    """Weighted cycle counts per DOD bin, summed over mean-SOC bins."""
    plt = _pyplot()
    counts = np.asarray(hist).sum(axis=1)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(dod_edges[:-1] * 100, counts, width=np.diff(dod_edges) * 100, align="edge")
    ax.set_xlabel("depth of discharge (%)")
    ax.set_ylabel("cycles")
    ax.set_yscale("symlog", linthresh=1.0)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out
