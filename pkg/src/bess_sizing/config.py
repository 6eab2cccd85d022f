"""Run configuration: one TOML file, compiled-in defaults, flag overrides.

Recognised tables and keys (all optional)::

    [paths]        data, tariff, output
    [data]         vat_rate
    [inverter]     eta_inv, p_ac_max, p_dc_max, p_dc_min
    [grid]         p_import_max, p_export_max
    [battery]      e_nominal, power, eta_roundtrip, soc_min_frac, soc_max_frac,
                   soh_eol, warranted_throughput
    [catalog]      models = [[e_kwh, p_kw], ...]
    [degradation]  alpha_sei, beta_sei, k_T, k_d1, k_d2, k_d3, k_sigma, k_t,
                   T_ref, sigma_ref
    [cost]         cost_per_kwh, cost_per_kw, discount_rate
    [lifetime]     window_days, resolution, max_years, policy, soc_init_frac,
                   min_cycle_dod, c_bd_rule
    [solver]       rel_mip_gap, time_limit, feasibility_tol
    [experiment]   seed, resolutions, jobs, plots

``paths.data`` is a CSV path or ``fixture:<kind>`` for a shipped fixture;
``synthetic:<kind>`` regenerates that fixture from ``experiment.seed``.
Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .data import SeriesFrame, load_series, load_tariff
from .degradation import DegradationParams
from .dispatch import BatterySpec, GridSpec, InverterSpec, SolverConfig
from .economics import CostModel
from .experiments import DEFAULT_CATALOG, RESOLUTIONS, validate_catalog
from .lifetime import LifetimeConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BatteryConfig:
    e_nominal: float = 10.0
    power: float = 5.0
    eta_roundtrip: float = 0.94
    soc_min_frac: float = 0.2
    soc_max_frac: float = 0.8
    soh_eol: float = 0.8
    warranted_throughput: float | None = None

    def spec(self, e_nominal: float | None = None, power: float | None = None) -> BatterySpec:
        e = self.e_nominal if e_nominal is None else e_nominal
        p = self.power if power is None else power
        return BatterySpec(e, p, -p, self.eta_roundtrip, self.soc_min_frac, self.soc_max_frac,
                           self.soh_eol, self.warranted_throughput if e_nominal is None else None)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    resolutions: tuple[int, ...] = RESOLUTIONS
    jobs: int = 1
    plots: bool = False


@dataclass(frozen=True)
class RunConfig:
    data: str = "fixture:ripple"
    tariff: Path | None = None
    output: Path = Path("out")
    vat_rate: float = 0.21
    inverter: InverterSpec = field(default_factory=InverterSpec)
    grid: GridSpec = field(default_factory=lambda: GridSpec(5.75))
    battery: BatteryConfig = field(default_factory=BatteryConfig)
    catalog: tuple[tuple[float, float], ...] = DEFAULT_CATALOG
    degradation: DegradationParams = field(default_factory=DegradationParams)
    cost: CostModel = field(default_factory=CostModel)
    lifetime: LifetimeConfig = field(default_factory=LifetimeConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    @property
    def plant(self) -> tuple[InverterSpec, GridSpec]:
        return self.inverter, self.grid

    def load_data(self) -> SeriesFrame:
        """The input series at its native resolution."""
        if self.data.startswith(("fixture:", "synthetic:")):
            from .fixtures import load_fixture, make_fixture

            source, kind = self.data.split(":", 1)
            try:
                if source == "fixture":
                    return load_fixture(kind)
                return make_fixture(kind, seed=self.experiment.seed)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        tariff = load_tariff(self.tariff, self.vat_rate) if self.tariff else None
        return load_series(self.data, tariff=tariff)

    def to_dict(self) -> dict:
        out = {
            "paths": {"data": self.data, "tariff": None if self.tariff is None else str(self.tariff),
                      "output": str(self.output)},
            "data": {"vat_rate": self.vat_rate},
            "catalog": {"models": [list(m) for m in self.catalog]},
        }
        for name in ("inverter", "grid", "battery", "degradation", "cost", "lifetime", "solver", "experiment"):
            section = asdict(getattr(self, name))
            out[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in section.items()}
        return out


_SECTIONS = {
    "inverter": InverterSpec, "grid": GridSpec, "battery": BatteryConfig,
    "degradation": DegradationParams, "cost": CostModel, "lifetime": LifetimeConfig,
    "solver": SolverConfig, "experiment": ExperimentConfig,
}


def _check_keys(section: str, table, allowed) -> None:
    if not isinstance(table, dict):
        raise ConfigError(f"[{section}] must be a table")
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"[{section}] unknown key(s): {', '.join(unknown)}")


def _build(section: str, cls, table: dict, base=None):
    names = [f.name for f in fields(cls)]
    _check_keys(section, table, names)
    if "resolutions" in table:
        table = dict(table, resolutions=tuple(int(r) for r in table["resolutions"]))
    try:
        return replace(base, **table) if base is not None else cls(**table)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def parse_config(raw: dict, base_dir: Path | None = None) -> RunConfig:
    allowed = set(_SECTIONS) | {"paths", "data", "catalog"}
    _check_keys("top level", raw, allowed)
    base_dir = base_dir or Path.cwd()
    kwargs: dict = {}

    paths = raw.get("paths", {})
    _check_keys("paths", paths, ("data", "tariff", "output"))
    if "data" in paths:
        data = str(paths["data"])
        kwargs["data"] = data if data.startswith(("fixture:", "synthetic:")) else str(base_dir / data)
    if paths.get("tariff"):
        kwargs["tariff"] = base_dir / paths["tariff"]
    if "output" in paths:
        kwargs["output"] = base_dir / paths["output"]
    data = raw.get("data", {})
    _check_keys("data", data, ("vat_rate",))
    if "vat_rate" in data:
        kwargs["vat_rate"] = float(data["vat_rate"])
    if "catalog" in raw:
        _check_keys("catalog", raw["catalog"], ("models",))
        try:
            kwargs["catalog"] = tuple(validate_catalog(raw["catalog"].get("models", [])))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[catalog] {exc}") from None
    for name, cls in _SECTIONS.items():
        if name in raw:
            base = RunConfig.__dataclass_fields__[name].default_factory()
            kwargs[name] = _build(name, cls, raw[name], base)
    try:
        return RunConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None) -> RunConfig:
    """Read a TOML config; ``None`` gives the compiled-in defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(raw, path.parent)


def validate(cfg: RunConfig) -> None:
    """Check referenced files exist and that the input data loads."""
    if not cfg.data.startswith(("fixture:", "synthetic:")) and not Path(cfg.data).is_file():
        raise ConfigError(f"data file not found: {cfg.data}")
    if cfg.tariff is not None and not Path(cfg.tariff).is_file():
        raise ConfigError(f"tariff file not found: {cfg.tariff}")
    if not 0 <= cfg.vat_rate < 1:
        raise ConfigError("vat_rate must be in [0, 1)")
    res = cfg.lifetime.resolution
    if res is not None and res not in RESOLUTIONS:
        raise ConfigError(f"resolution must be one of {RESOLUTIONS}")
    bad = [r for r in cfg.experiment.resolutions if r not in RESOLUTIONS]
    if bad:
        raise ConfigError(f"resolutions {bad} not in {RESOLUTIONS}")
    if cfg.experiment.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    try:
        cfg.battery.spec()
    except ValueError as exc:
        raise ConfigError(f"[battery] {exc}") from None
