"""Time-series ingestion, validation, resampling and tariff construction.

All power series are in kW, one value per step; energies are power times
the step length in hours.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


class DataError(ValueError):
    """Input series or tariff data failed validation."""


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Resolution:
    step_minutes: int

    def __post_init__(self):
        if int(self.step_minutes) != self.step_minutes or self.step_minutes <= 0:
            raise DataError(f"step_minutes must be a positive integer, got {self.step_minutes}")
        if 60 % self.step_minutes:
            raise DataError(f"step_minutes must divide 60, got {self.step_minutes}")
        object.__setattr__(self, "step_minutes", int(self.step_minutes))

    @property
    def t_s(self) -> float:
        """Step length in hours."""
        return self.step_minutes / 60.0

    @property
    def steps_per_day(self) -> int:
        return 24 * 60 // self.step_minutes


@dataclass(frozen=True)
class SeriesFrame:
    """Uniformly sampled PV, load and price series (immutable)."""

    start: pd.Timestamp
    resolution: Resolution
    pv_dc: np.ndarray
    load_ac: np.ndarray
    price: np.ndarray
    battery_temp: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", pd.Timestamp(self.start))
        pv = _frozen(self.pv_dc, "pv_dc")
        load = _frozen(self.load_ac, "load_ac")
        price = _frozen(self.price, "price")
        object.__setattr__(self, "pv_dc", pv)
        object.__setattr__(self, "load_ac", load)
        object.__setattr__(self, "price", price)
        series = {"pv_dc": pv, "load_ac": load, "price": price}
        if self.battery_temp is not None:
            temp = _frozen(self.battery_temp, "battery_temp")
            object.__setattr__(self, "battery_temp", temp)
            series["battery_temp"] = temp
        n = len(pv)
        if n < 1:
            raise DataError("series must contain at least one step")
        for name, arr in series.items():
            if len(arr) != n:
                raise DataError(f"{name} has length {len(arr)}, expected {n}")
            if not np.all(np.isfinite(arr)):
                raise DataError(f"missing or non-finite value in {name}")
        for name in ("pv_dc", "load_ac"):
            if np.any(series[name] < 0):
                raise DataError(f"negative power value in {name}")
        if np.any(price < 0):
            raise DataError("negative price value")

    def __len__(self) -> int:
        return len(self.pv_dc)

    @property
    def t_s(self) -> float:
        return self.resolution.t_s

    @property
    def timestamps(self) -> pd.DatetimeIndex:
        return pd.date_range(self.start, periods=len(self), freq=f"{self.resolution.step_minutes}min")

    @property
    def duration_hours(self) -> float:
        return len(self) * self.t_s

    def slice(self, start: int, stop: int) -> "SeriesFrame":
        """Steps ``start:stop``; indices wrap around the end of the frame."""
        n = len(self)
        if stop <= start:
            raise DataError("empty slice")
        idx = np.arange(start, stop) % n
        temp = None if self.battery_temp is None else self.battery_temp[idx]
        offset = pd.Timedelta(minutes=self.resolution.step_minutes * start)
        return SeriesFrame(self.start + offset, self.resolution, self.pv_dc[idx],
                           self.load_ac[idx], self.price[idx], temp)

    def to_frame(self) -> pd.DataFrame:
        cols = {"pv_dc_kw": self.pv_dc, "load_ac_kw": self.load_ac, "price_eur_kwh": self.price}
        if self.battery_temp is not None:
            cols["temp_c"] = self.battery_temp
        df = pd.DataFrame(cols, index=self.timestamps)
        df.index.name = "timestamp"
        return df


@dataclass(frozen=True)
class TariffSpec:
    """Grid purchase tariff.

    ``generation_cost`` is either a 24-value hour-of-day profile or a
    ``(n_days, 24)`` table indexed by day of year (1-based). ``tolls_and_charges``
    is a 24-value hour-of-day profile (one value per tariff period hour).
    """

    generation_cost: np.ndarray
    tolls_and_charges: np.ndarray
    vat_rate: float = 0.0

    def __post_init__(self):
        gc = np.array(self.generation_cost, dtype=float)
        tc = np.array(self.tolls_and_charges, dtype=float)
        if gc.ndim == 1:
            gc = gc.reshape(1, -1)
        if gc.ndim != 2 or gc.shape[1] != 24:
            raise DataError("generation_cost must have 24 hourly values per day")
        if tc.shape != (24,):
            raise DataError("tolls_and_charges must have 24 hourly values")
        if np.any(gc < 0) or np.any(tc < 0) or not (np.all(np.isfinite(gc)) and np.all(np.isfinite(tc))):
            raise DataError("tariff components must be finite and >= 0")
        if not 0 <= self.vat_rate < 1:
            raise DataError(f"vat_rate must be in [0, 1), got {self.vat_rate}")
        object.__setattr__(self, "generation_cost", gc)
        object.__setattr__(self, "tolls_and_charges", tc)

    @property
    def daily(self) -> bool:
        return self.generation_cost.shape[0] > 1


DEFAULT_SCHEMA = {
    "timestamp": "timestamp",
    "pv_dc": "pv_dc_kw",
    "load_ac": "load_ac_kw",
    "price": "price_eur_kwh",
    "grid": "grid_kw",
    "pv_ac": "pv_ac_kw",
    "temp": "temp_c",
}


def load_series(path, schema: Mapping[str, str] | None = None,
                resolution: Resolution | int | None = None,
                tariff: TariffSpec | None = None) -> SeriesFrame:
    """Read a CSV of monitored data into a validated :class:`SeriesFrame`.

    ``schema`` maps the logical fields (``timestamp``, ``pv_dc``, ``load_ac``,
    ``price``, ``grid``, ``pv_ac``, ``temp``) to column names; missing keys take
    :data:`DEFAULT_SCHEMA` names. When the load column is absent it is derived
    from ``pv_ac`` and ``grid``. Prices come from the price column if present,
    otherwise from ``tariff``.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    cols = {**DEFAULT_SCHEMA, **(schema or {})}
    df = pd.read_csv(path, float_precision="round_trip")

    def col(key: str, required: bool = True):
        name = cols[key]
        if name not in df.columns:
            if required:
                raise DataError(f"missing column {name!r} in {path}")
            return None
        values = pd.to_numeric(df[name], errors="coerce").to_numpy(dtype=float)
        if np.any(np.isnan(values)):
            raise DataError(f"missing or non-numeric value in column {name!r}")
        return values

    if cols["timestamp"] not in df.columns:
        raise DataError(f"missing column {cols['timestamp']!r} in {path}")
    try:
        ts = pd.DatetimeIndex(pd.to_datetime(df[cols["timestamp"]], format="ISO8601"))
    except (ValueError, TypeError) as exc:
        raise DataError(f"unparseable timestamp: {exc}") from None
    step = _uniform_step_minutes(ts)
    if resolution is not None:
        declared = resolution if isinstance(resolution, Resolution) else Resolution(resolution)
        if len(ts) > 1 and declared.step_minutes != step:
            raise DataError(
                f"non-uniform spacing: declared {declared.step_minutes} min, found {step} min")
        res = declared
    else:
        res = Resolution(step)

    pv = col("pv_dc")
    if np.any(pv < 0):
        raise DataError(f"negative power value in column {cols['pv_dc']!r}")
    load = col("load_ac", required=False)
    if load is None:
        grid, pv_ac = col("grid", required=False), col("pv_ac", required=False)
        if grid is None or pv_ac is None:
            raise DataError(f"missing column {cols['load_ac']!r} in {path}")
        load, _ = derive_load(pv_ac, grid)
    if np.any(load < 0):
        raise DataError(f"negative power value in column {cols['load_ac']!r}")
    price = col("price", required=False)
    if price is None:
        if tariff is None:
            raise DataError(f"missing column {cols['price']!r} and no tariff supplied")
        price = build_price_series(tariff, ts)
    temp = col("temp", required=False)
    return SeriesFrame(ts[0], res, pv, load, price, temp)


def _uniform_step_minutes(ts: pd.DatetimeIndex) -> int:
    if len(ts) < 2:
        return 60
    diffs = np.diff(ts.asi8)
    if np.any(diffs <= 0) or np.any(diffs != diffs[0]):
        raise DataError("non-uniform spacing: timestamps must be strictly increasing and uniform")
    minutes = diffs[0] / 60e9
    if minutes != int(minutes):
        raise DataError(f"non-uniform spacing: step of {minutes} min is not whole minutes")
    return int(minutes)


def derive_load(pv_ac, grid_exchange) -> tuple[np.ndarray, int]:
    """Household load from AC PV output and signed grid exchange (import > 0).

    Returns the load series and the number of steps clipped to zero.
    """
    pv_ac = np.asarray(pv_ac, dtype=float)
    grid = np.asarray(grid_exchange, dtype=float)
    if pv_ac.shape != grid.shape:
        raise DataError(f"length mismatch: pv_ac {pv_ac.shape} vs grid {grid.shape}")
    load = pv_ac + grid
    clipped = int(np.count_nonzero(load < 0))
    if clipped:
        logger.warning("derive_load: %d negative load residual(s) clipped to zero", clipped)
    return np.maximum(load, 0.0), clipped


def resample(frame: SeriesFrame, target: Resolution | int) -> SeriesFrame:
    """Block-average every series onto a coarser resolution."""
    if not isinstance(target, Resolution):
        target = Resolution(target)
    src = frame.resolution.step_minutes
    if target.step_minutes % src:
        raise DataError(f"non-integer ratio: {target.step_minutes} min is not a multiple of {src} min")
    ratio = target.step_minutes // src
    if ratio == 1:
        return frame
    if len(frame) % ratio:
        raise DataError(f"indivisible length: {len(frame)} steps not divisible by {ratio}")

    def block_mean(arr):
        return None if arr is None else arr.reshape(-1, ratio).mean(axis=1)

    return SeriesFrame(frame.start, target, block_mean(frame.pv_dc), block_mean(frame.load_ac),
                       block_mean(frame.price), block_mean(frame.battery_temp))


def grid_price(gc, tc, vat_rate):
    """Retail energy price from generation cost, tolls and VAT rate."""
    return (np.asarray(gc, dtype=float) + np.asarray(tc, dtype=float)) * (1.0 + vat_rate)


def build_price_series(tariff: TariffSpec, timestamps: Sequence) -> np.ndarray:
    ts = pd.DatetimeIndex(timestamps)
    hours = ts.hour.to_numpy()
    if tariff.daily:
        day = ts.dayofyear.to_numpy() - 1
        if np.any(day >= tariff.generation_cost.shape[0]):
            raise DataError("timestamp outside tariff-definition range")
        gc = tariff.generation_cost[day, hours]
    else:
        gc = tariff.generation_cost[0, hours]
    return grid_price(gc, tariff.tolls_and_charges[hours], tariff.vat_rate)


def load_tariff(path, vat_rate: float) -> TariffSpec:
    """Read an ``hour_of_day,gc_eur_kwh,tc_eur_kwh`` CSV with 24 rows."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"tariff file not found: {path}")
    df = pd.read_csv(path)
    for name in ("hour_of_day", "gc_eur_kwh", "tc_eur_kwh"):
        if name not in df.columns:
            raise DataError(f"missing column {name!r} in {path}")
    df = df.sort_values("hour_of_day")
    if df["hour_of_day"].tolist() != list(range(24)):
        raise DataError("tariff file must define hours 0..23 exactly once")
    return TariffSpec(df["gc_eur_kwh"].to_numpy(float), df["tc_eur_kwh"].to_numpy(float), vat_rate)


def write_series(frame: SeriesFrame, path) -> None:
    """Write a frame in the input CSV schema (round-trips through :func:`load_series`)."""
    df = frame.to_frame().reset_index()
    df["timestamp"] = df["timestamp"].map(lambda t: t.isoformat())
    df.to_csv(path, index=False)
