"""Synthetic household data shipped with the package.

Two 5-minute fixtures with a PV-generation-to-consumption ratio of about 1.5:

``smooth``
    Half-sine PV and a slowly varying two-peak load; block-averaging to
    coarser steps removes almost nothing.
``ripple``
    The same days with fast load switching and passing-cloud PV dips on top,
    the sub-hourly detail that hourly averaging erases.

The CSV files are produced by :func:`make_fixture` and can be regenerated
with ``python -m bess_sizing.fixtures``.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import pandas as pd

from ..data import Resolution, SeriesFrame, TariffSpec, build_price_series, load_series

KINDS = ("smooth", "ripple")
START = "2023-01-01T00:00:00+00:00"

# hour-of-day tolls (valley / flat / peak periods) and VAT
TOLLS = np.array([0.003] * 8 + [0.028] * 2 + [0.045] * 4 + [0.028] * 4 + [0.045] * 4 + [0.028] * 2)
VAT = 0.21


def fixture_tariff(days: int = 28, seed: int = 0) -> TariffSpec:
    rng = np.random.default_rng(seed + 1000)
    hours = np.arange(24)
    base = (0.085
            + 0.055 * np.exp(-0.5 * ((hours - 8.5) / 1.5) ** 2)
            - 0.035 * np.exp(-0.5 * ((hours - 14.0) / 2.5) ** 2)
            + 0.110 * np.exp(-0.5 * ((hours - 20.5) / 1.8) ** 2))
    daily = 1.0 + 0.15 * rng.standard_normal((days, 1))
    return TariffSpec(np.clip(base * daily, 0.01, None), TOLLS, VAT)


def make_fixture(kind: str = "smooth", days: int = 28, seed: int = 0) -> SeriesFrame:
    if kind not in KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}")
    res = Resolution(5)
    n_day = res.steps_per_day
    rng = np.random.default_rng(seed)
    hour = (np.arange(n_day) + 0.5) * res.t_s

    pv_days, load_days = [], []
    for d in range(days):
        season = 0.5 * (1 - np.cos(2 * np.pi * d / days))  # 0 .. 1 .. 0
        daylen = 10.0 + 4.0 * season
        sunrise = 13.0 - daylen / 2
        clear = 3.0 + 1.2 * season
        x = (hour - sunrise) / daylen
        shape = np.where((x > 0) & (x < 1), np.sin(np.pi * np.clip(x, 0, 1)), 0.0)
        cloud = np.clip(0.85 + 0.15 * rng.standard_normal(), 0.45, 1.0)
        pv = clear * cloud * shape

        level = 0.36 + 0.06 * rng.standard_normal()
        load = (max(level, 0.25)
                + 0.6 * np.exp(-0.5 * ((hour - 14.0) / 1.2) ** 2)
                + 1.2 * np.exp(-0.5 * ((hour - 21.0) / 1.5) ** 2)
                + 0.3 * np.exp(-0.5 * ((hour - 8.0) / 0.8) ** 2))

        if kind == "ripple":
            # appliance switching: on/off blocks a few samples long
            on = np.repeat(rng.random(n_day // 2) < 0.35, 2)
            load = load + 0.8 * (on - 0.35)
            dips = rng.random(n_day) < 0.25
            pv = pv * np.where(dips, rng.uniform(0.35, 0.7, n_day), 1.0)
        pv_days.append(pv)
        load_days.append(np.maximum(load, 0.05))

    pv = np.round(np.concatenate(pv_days), 6)
    load = np.round(np.concatenate(load_days), 6)
    start = pd.Timestamp(START)
    ts = pd.date_range(start, periods=len(pv), freq="5min")
    price = np.round(build_price_series(fixture_tariff(days, seed), ts), 6)
    return SeriesFrame(start, res, pv, load, price)


def fixture_path(kind: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(f"{kind}.csv")))


def load_fixture(kind: str) -> SeriesFrame:
    """Shipped 5-minute fixture ``kind`` (``smooth`` or ``ripple``)."""
    if kind not in KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}")
    return load_series(fixture_path(kind), resolution=5)


def write_fixtures(directory=None, days: int = 28, seed: int = 0) -> list[Path]:
    from ..data import write_series

    directory = Path(directory) if directory else fixture_path("smooth").parent
    out = []
    for kind in KINDS:
        path = directory / f"{kind}.csv"
        write_series(make_fixture(kind, days, seed), path)
        out.append(path)
    return out
