"""Input parsing, scenario transforms (Cases 0-5) and results output.

Formats, chosen for diff-able fixtures and trivial tooling:

* assets: JSON object with ``dispatchable``, ``renewable``, ``storage`` and
  ``adjustable`` arrays plus a ``transformer`` object; field names mirror the
  scheduling dataclasses one to one.
* time series: CSV with the fixed header
  ``hour,fixed_load_mw,price,ambient_c`` followed by one column per
  renewable unit. Hours are 1-based and consecutive; the length must be a
  multiple of 24.
* scenario: JSON object, see ScenarioConfig.
* results bundle: ``schedule.csv`` (one row per hour, every decision
  column), ``iterations.csv`` (master/subproblem bound trace, no wall
  times so reruns are byte-identical) and ``summary.json`` (sorted keys).

The paper-style sample day ships as a fixture together with a synthetic
week and year built by tiling that day with a seeded +-10 percent jitter
and a sinusoidal annual ambient swing; the yearly source data behind the
original study is not public, so every multi-day number in this repo
refers to the synthetic set.

All floats are written with repr so parse(write(x)) round-trips exactly.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .scheduling import (
    AdjustableLoad,
    AssetFleet,
    DispatchableUnit,
    HourlyInput,
    RenewableUnit,
    StorageUnit,
    advance_carry,
    initial_carry,
    replay_violations,
)
from .thermal import TransformerThermalParams, horizon_loss_of_life

__all__ = [
    "ParseError",
    "OverloadInjection",
    "ScenarioConfig",
    "TimeSeriesTable",
    "ResultsBundle",
    "parse_assets",
    "parse_timeseries",
    "parse_scenario",
    "parse_transformer",
    "parse_loading_series",
    "write_assets",
    "write_timeseries",
    "apply_scenario",
    "build_synthetic_series",
    "bundle_results",
    "grid_only_results",
    "verify_bundle",
    "write_results",
    "schedule_replay_violations",
    "fixture_path",
]

SERIES_HEADER = ("hour", "fixed_load_mw", "price", "ambient_c")

# Annual ambient swing amplitude for the synthetic series, degrees C.
ANNUAL_AMBIENT_SWING = 6.0


class ParseError(ValueError):
    """Input rejected; message carries path (and line where known)."""

    def __init__(self, path, msg: str, line: int | None = None):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {msg}")
        self.path = str(path)
        self.line = line


def fixture_path(name: str):
    """Absolute path of a bundled fixture file."""
    from importlib.resources import files

    return files(__package__).joinpath("fixtures", name)


# ---------------------------------------------------------------------------
# Domain types

@dataclass(frozen=True)
class OverloadInjection:
    """Seeded fixed-load increments forcing grid import to a target loading.

    ``hours`` are 1-based hours of day; each of ``days`` randomly chosen
    days gets every listed hour raised, so exactly days*len(hours) rows of
    the series are modified.
    """

    days: int
    hours: tuple
    target_fraction: float
    seed: int

    def __post_init__(self):
        if self.days < 1:
            raise ValueError("overload injection: need at least one day")
        hrs = tuple(int(h) for h in self.hours)
        object.__setattr__(self, "hours", hrs)
        if not hrs or any(h < 1 or h > 24 for h in hrs):
            raise ValueError("overload injection: hours must lie in 1..24")
        if len(set(hrs)) != len(hrs):
            raise ValueError("overload injection: duplicate hour")
        if not self.target_fraction > 0.0:
            raise ValueError("overload injection: target fraction must be positive")
        if not isinstance(self.seed, int):
            raise ValueError("overload injection: seed must be an integer")


_CASES = (0, 1, 2, 3, 4, 5)


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment: case id, horizon and the transforms to apply.

    ``case`` is 0-5 or a free-form label; the id is descriptive except for
    0, which the CLI runs grid-only (no DER dispatch). Solver knobs
    (``max_iterations``, ``master_max_nodes``, ``gap_tolerance``) bound
    effort deterministically; wall-clock limits would break byte-identical
    reruns, so there are none.
    """

    case: int | str = "custom"
    horizon_days: int = 1
    block_hours: int = 24
    price_scale: float = 0.0
    loading_cap_fraction: float = math.inf
    adjustable_energy_delta: float = 0.0
    overload_injection: OverloadInjection | None = None
    asset_management_enabled: bool = True
    transformer_overrides: dict = field(default_factory=dict)
    line_capacity: float = 15.0
    max_iterations: int | None = None
    master_max_nodes: int | None = None
    gap_tolerance: float | None = None

    def __post_init__(self):
        if isinstance(self.case, int) and self.case not in _CASES:
            raise ValueError(f"case must be one of {_CASES} or a label")
        if self.horizon_days < 1:
            raise ValueError("horizon must cover at least one day")
        if self.block_hours < 1:
            raise ValueError("block must cover at least one hour")
        if not self.price_scale > -1.0:
            raise ValueError("price scale must keep prices' sign (> -1)")
        if not self.loading_cap_fraction > 0.0:
            raise ValueError("loading cap fraction must be positive")
        if not self.line_capacity > 0.0:
            raise ValueError("line capacity must be positive")
        bad = set(self.transformer_overrides) - {
            f.name for f in dataclasses.fields(TransformerThermalParams)}
        if bad:
            raise ValueError(f"unknown transformer fields: {sorted(bad)}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.master_max_nodes is not None and self.master_max_nodes < 1:
            raise ValueError("master_max_nodes must be >= 1")
        if self.gap_tolerance is not None and not self.gap_tolerance > 0.0:
            raise ValueError("gap_tolerance must be positive")


@dataclass(frozen=True)
class TimeSeriesTable:
    """Validated hourly inputs; hours run 1..n with no gaps.

    ``line_capacity`` and ``loading_cap_fraction`` are not part of the CSV;
    apply_scenario installs them before the table is turned into
    HourlyInput rows.
    """

    hours: np.ndarray
    fixed_load: np.ndarray
    price: np.ndarray
    ambient: np.ndarray
    renewable: np.ndarray          # (n_renewable, n_hours)
    renewable_names: tuple
    line_capacity: float = 15.0
    loading_cap_fraction: float = math.inf

    def __post_init__(self):
        n = len(self.hours)
        if n == 0 or n % 24 != 0:
            raise ValueError(f"series length {n} is not a positive multiple of 24")
        if not np.array_equal(self.hours, np.arange(1, n + 1)):
            raise ValueError("hour column must run 1..n without gaps")
        for label, arr in (("fixed_load", self.fixed_load),
                           ("price", self.price), ("ambient", self.ambient)):
            if arr.shape != (n,):
                raise ValueError(f"{label} column has wrong length")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{label} column has a non-finite entry")
        if np.any(self.fixed_load < 0.0):
            raise ValueError("fixed load must be >= 0")
        if self.renewable.shape != (len(self.renewable_names), n):
            raise ValueError("renewable block shape does not match its names")
        if self.renewable.size and not np.all(np.isfinite(self.renewable)):
            raise ValueError("renewable column has a non-finite entry")
        if self.renewable.size and np.any(self.renewable < 0.0):
            raise ValueError("renewable output must be >= 0")
        if not self.line_capacity > 0.0:
            raise ValueError("line capacity must be positive")
        if not self.loading_cap_fraction > 0.0:
            raise ValueError("loading cap fraction must be positive")

    @property
    def n_hours(self) -> int:
        return len(self.hours)

    @property
    def n_days(self) -> int:
        return len(self.hours) // 24

    def to_hourly(self) -> tuple:
        """HourlyInput rows for build_model, caps installed."""
        return tuple(
            HourlyInput(
                fixed_load=float(self.fixed_load[t]),
                renewable_generation=tuple(float(r) for r in self.renewable[:, t]),
                price=float(self.price[t]),
                ambient=float(self.ambient[t]),
                line_capacity=self.line_capacity,
                loading_cap_fraction=self.loading_cap_fraction,
            )
            for t in range(self.n_hours))


@dataclass(frozen=True)
class ResultsBundle:
    """Everything one run emits: hourly schedule, bound trace, summary.

    ``schedule`` maps column name to a full-horizon array (insertion order
    is the CSV column order). The summary must be recomputable from the
    schedule via the thermal module; write_results enforces that.
    """

    schedule: dict
    iterations: tuple
    summary: dict
    scenario: dict


# ---------------------------------------------------------------------------
# Parsing

def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(path, f"cannot read: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON: {exc.msg}", exc.lineno) from exc
    if not isinstance(obj, dict):
        raise ParseError(path, "top level must be a JSON object")
    return obj


_REQUIRED = object()


def _field(path, ctx: str, obj: dict, key: str, kind, default=_REQUIRED):
    if key not in obj:
        if default is not _REQUIRED:
            return default
        raise ParseError(path, f"{ctx}: missing field '{key}'")
    val = obj[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ParseError(path, f"{ctx}: field '{key}' must be a number")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ParseError(path, f"{ctx}: field '{key}' must be an integer")
        return val
    if kind is bool:
        if not isinstance(val, bool):
            raise ParseError(path, f"{ctx}: field '{key}' must be true/false")
        return val
    if kind is str:
        if not isinstance(val, str):
            raise ParseError(path, f"{ctx}: field '{key}' must be a string")
        return val
    raise AssertionError(kind)


def _rows(path, obj: dict, section: str) -> list:
    rows = obj.get(section, [])
    if not isinstance(rows, list) or any(not isinstance(r, dict) for r in rows):
        raise ParseError(path, f"section '{section}' must be an array of objects")
    return rows


def parse_assets(path) -> AssetFleet:
    """Read an asset-fleet JSON file; every fleet invariant is enforced."""
    obj = _load_json(path)
    F = _field

    def build(section, cls, spec):
        out = []
        for row in _rows(path, obj, section):
            name = F(path, section, row, "name", str)
            ctx = f"{section} '{name}'"
            kwargs = {"name": name}
            for key, kind, *dflt in spec:
                kwargs[key] = F(path, ctx, row, key, kind, *dflt)
            try:
                out.append(cls(**kwargs))
            except ValueError as exc:
                raise ParseError(path, f"{ctx}: {exc}") from exc
        return tuple(out)

    dispatchable = build("dispatchable", DispatchableUnit, (
        ("cost_per_mwh", float), ("p_min", float), ("p_max", float),
        ("ramp_up", float), ("ramp_down", float),
        ("min_up", int), ("min_down", int),
        ("initial_commitment", bool, False), ("initial_output", float, 0.0)))
    renewable = build("renewable", RenewableUnit, (("p_max", float),))
    storage = build("storage", StorageUnit, (
        ("energy_min", float), ("energy_max", float),
        ("charge_min", float), ("charge_max", float),
        ("discharge_min", float), ("discharge_max", float),
        ("min_charge_time", int), ("min_discharge_time", int),
        ("efficiency", float, 0.9), ("period", float, 1.0),
        ("initial_energy", float, 0.0)))
    adjustable = build("adjustable", AdjustableLoad, (
        ("d_min", float), ("d_max", float), ("required_energy", float),
        ("window_start", int), ("window_end", int),
        ("min_on_time", int, 1), ("kind", str, "shiftable")))

    traw = obj.get("transformer", {})
    if not isinstance(traw, dict):
        raise ParseError(path, "section 'transformer' must be an object")
    bad = set(traw) - {f.name for f in dataclasses.fields(TransformerThermalParams)}
    if bad:
        raise ParseError(path, f"transformer: unknown fields {sorted(bad)}")
    try:
        transformer = TransformerThermalParams(
            **{k: float(v) for k, v in traw.items()})
    except (TypeError, ValueError) as exc:
        raise ParseError(path, f"transformer: {exc}") from exc

    try:
        return AssetFleet(dispatchable, renewable, storage, adjustable, transformer)
    except ValueError as exc:
        raise ParseError(path, str(exc)) from exc


def parse_timeseries(path) -> TimeSeriesTable:
    """Read an hourly CSV series; header and row shapes are enforced."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(path, "empty file") from None
            header = tuple(h.strip() for h in header)
            if header[:4] != SERIES_HEADER:
                raise ParseError(
                    path, f"header must start with {','.join(SERIES_HEADER)}", 1)
            names = header[4:]
            if len(set(names)) != len(names):
                raise ParseError(path, "duplicate renewable column", 1)
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != len(header):
                    raise ParseError(
                        path, f"expected {len(header)} fields, got {len(row)}", lineno)
                try:
                    rows.append([float(v) for v in row])
                except ValueError:
                    raise ParseError(path, "non-numeric field", lineno) from None
    except OSError as exc:
        raise ParseError(path, f"cannot read: {exc.strerror or exc}") from exc

    if not rows:
        raise ParseError(path, "no data rows")
    data = np.array(rows)
    hours = data[:, 0]
    if not np.array_equal(hours, hours.astype(np.int64)):
        raise ParseError(path, "hour column must hold integers")
    try:
        return TimeSeriesTable(
            hours=hours.astype(np.int64),
            fixed_load=data[:, 1],
            price=data[:, 2],
            ambient=data[:, 3],
            renewable=data[:, 4:].T.copy(),
            renewable_names=names,
        )
    except ValueError as exc:
        raise ParseError(path, str(exc)) from exc


def parse_transformer(path) -> TransformerThermalParams:
    """Read a bare transformer-parameters JSON object."""
    obj = _load_json(path)
    bad = set(obj) - {f.name for f in dataclasses.fields(TransformerThermalParams)}
    if bad:
        raise ParseError(path, f"unknown transformer fields {sorted(bad)}")
    try:
        return TransformerThermalParams(**{k: float(v) for k, v in obj.items()})
    except (TypeError, ValueError) as exc:
        raise ParseError(path, str(exc)) from exc


def parse_loading_series(path, column: str = "loading_mw"):
    """Read (loading_mw, ambient_c) arrays from any CSV bearing the columns.

    ``column`` names the loading source; its absolute value is used, so the
    exchange_mw column of an emitted schedule works directly.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise ParseError(path, "empty file") from None
            for name in (column, "ambient_c"):
                if name not in header:
                    raise ParseError(path, f"no '{name}' column", 1)
            ci, ai = header.index(column), header.index("ambient_c")
            loading, ambient = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != len(header):
                    raise ParseError(
                        path, f"expected {len(header)} fields, got {len(row)}", lineno)
                try:
                    loading.append(abs(float(row[ci])))
                    ambient.append(float(row[ai]))
                except ValueError:
                    raise ParseError(path, "non-numeric field", lineno) from None
    except OSError as exc:
        raise ParseError(path, f"cannot read: {exc.strerror or exc}") from exc
    if not loading:
        raise ParseError(path, "no data rows")
    return np.array(loading), np.array(ambient)


def parse_scenario(path) -> ScenarioConfig:
    """Read a scenario JSON file into a validated ScenarioConfig."""
    obj = _load_json(path)
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    bad = set(obj) - known
    if bad:
        raise ParseError(path, f"unknown fields {sorted(bad)}")

    kwargs = {}
    case = obj.get("case", "custom")
    if not isinstance(case, (int, str)) or isinstance(case, bool):
        raise ParseError(path, "field 'case' must be an integer or a label")
    kwargs["case"] = case
    F = _field
    kwargs["horizon_days"] = F(path, "scenario", obj, "horizon_days", int, 1)
    kwargs["block_hours"] = F(path, "scenario", obj, "block_hours", int, 24)
    kwargs["price_scale"] = F(path, "scenario", obj, "price_scale", float, 0.0)
    cap = obj.get("loading_cap_fraction")
    if cap is not None:
        kwargs["loading_cap_fraction"] = F(
            path, "scenario", obj, "loading_cap_fraction", float)
    kwargs["adjustable_energy_delta"] = F(
        path, "scenario", obj, "adjustable_energy_delta", float, 0.0)
    kwargs["asset_management_enabled"] = F(
        path, "scenario", obj, "asset_management_enabled", bool, True)
    kwargs["line_capacity"] = F(path, "scenario", obj, "line_capacity", float, 15.0)
    for key in ("max_iterations", "master_max_nodes"):
        if obj.get(key) is not None:
            kwargs[key] = F(path, "scenario", obj, key, int)
    if obj.get("gap_tolerance") is not None:
        kwargs["gap_tolerance"] = F(path, "scenario", obj, "gap_tolerance", float)

    overrides = obj.get("transformer_overrides", {})
    if not isinstance(overrides, dict):
        raise ParseError(path, "'transformer_overrides' must be an object")
    try:
        kwargs["transformer_overrides"] = {
            k: float(v) for k, v in overrides.items()}
    except (TypeError, ValueError):
        raise ParseError(
            path, "'transformer_overrides' values must be numbers") from None

    inj = obj.get("overload_injection")
    if inj is not None:
        if not isinstance(inj, dict):
            raise ParseError(path, "'overload_injection' must be an object")
        ctx = "overload_injection"
        hours = inj.get("hours")
        if not isinstance(hours, list) or not hours:
            raise ParseError(path, f"{ctx}: field 'hours' must be a non-empty array")
        if "seed" not in inj:
            raise ParseError(path, f"{ctx}: missing field 'seed' "
                             "(injections must be reproducible)")
        try:
            kwargs["overload_injection"] = OverloadInjection(
                days=F(path, ctx, inj, "days", int),
                hours=tuple(hours),
                target_fraction=F(path, ctx, inj, "target_fraction", float),
                seed=F(path, ctx, inj, "seed", int))
        except ValueError as exc:
            raise ParseError(path, str(exc)) from exc

    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ParseError(path, str(exc)) from exc


# ---------------------------------------------------------------------------
# Writing inputs (round-trip support for fixtures)

def _num(x) -> str:
    # repr round-trips doubles exactly; integers stay integral-looking.
    return repr(float(x))


def write_assets(fleet: AssetFleet, path) -> None:
    """Serialize a fleet so parse_assets reproduces it exactly."""
    def rows(group):
        return [{f.name: getattr(a, f.name) for f in dataclasses.fields(a)}
                for a in group]

    obj = {
        "dispatchable": rows(fleet.dispatchable),
        "renewable": rows(fleet.renewable),
        "storage": rows(fleet.storage),
        "adjustable": rows(fleet.adjustable),
        "transformer": dataclasses.asdict(fleet.transformer),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_timeseries(table: TimeSeriesTable, path) -> None:
    """Serialize a series so parse_timeseries reproduces it exactly."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(SERIES_HEADER + tuple(table.renewable_names)) + "\n")
        for t in range(table.n_hours):
            cells = [str(int(table.hours[t])), _num(table.fixed_load[t]),
                     _num(table.price[t]), _num(table.ambient[t])]
            cells += [_num(v) for v in table.renewable[:, t]]
            fh.write(",".join(cells) + "\n")


# ---------------------------------------------------------------------------
# Scenario transforms

def apply_scenario(config: ScenarioConfig, fleet: AssetFleet,
                   table: TimeSeriesTable):
    """Apply all Case transforms; pure and seed-deterministic.

    Returns (fleet, table, transformer params) with prices scaled, the
    loading cap and line capacity installed into the table, adjustable
    required energies shifted pro-rata, overloads injected at seeded days,
    and asset management folded into the transformer's investment cost
    (psi = 0 when disabled).
    """
    if table.n_days != config.horizon_days:
        raise ValueError(
            f"scenario expects {config.horizon_days} day(s), series has "
            f"{table.n_days}")

    price = table.price * (1.0 + config.price_scale)
    load = table.fixed_load.copy()

    adjustable = fleet.adjustable
    if config.adjustable_energy_delta != 0.0:
        total = sum(a.required_energy for a in adjustable)
        if total <= 0.0:
            raise ValueError("adjustable energy shift needs loads with "
                             "positive required energy")
        scale = 1.0 + config.adjustable_energy_delta / total
        if scale < 0.0:
            raise ValueError("adjustable energy shift exceeds the fleet total")
        scaled = []
        for a in adjustable:
            try:
                scaled.append(dataclasses.replace(
                    a, required_energy=a.required_energy * scale))
            except ValueError as exc:
                raise ValueError(f"adjustable energy shift: {exc}") from exc
        adjustable = tuple(scaled)

    params = fleet.transformer
    if config.transformer_overrides:
        params = dataclasses.replace(params, **config.transformer_overrides)
    if not config.asset_management_enabled:
        params = dataclasses.replace(params, investment_cost=0.0)

    inj = config.overload_injection
    if inj is not None:
        n_days = table.n_days
        if inj.days > n_days:
            raise ValueError(
                f"overload injection wants {inj.days} days, horizon has {n_days}")
        rng = np.random.default_rng(inj.seed)
        chosen = np.sort(rng.choice(n_days, size=inj.days, replace=False))
        # Import must hit the target even with all local supply running, so
        # the increment covers the full dispatchable + discharge headroom.
        supply_max = (sum(u.p_max for u in fleet.dispatchable)
                      + sum(s.discharge_max for s in fleet.storage))
        need = inj.target_fraction * params.rated_power
        for d in chosen:
            for h in inj.hours:
                t = int(d) * 24 + h - 1
                ren_t = float(table.renewable[:, t].sum()) if table.renewable.size else 0.0
                load[t] = max(load[t], need + supply_max + ren_t)

    new_table = TimeSeriesTable(
        hours=table.hours, fixed_load=load, price=price, ambient=table.ambient,
        renewable=table.renewable, renewable_names=table.renewable_names,
        line_capacity=config.line_capacity,
        loading_cap_fraction=config.loading_cap_fraction)
    new_fleet = dataclasses.replace(fleet, adjustable=adjustable,
                                    transformer=params)
    return new_fleet, new_table, params


def build_synthetic_series(day: TimeSeriesTable, n_days: int,
                           seed: int, jitter: float = 0.1) -> TimeSeriesTable:
    """Tile a 24 h sample day into a longer horizon.

    Per day, load, each renewable profile and price are scaled hourly by
    independent uniform factors in [1-jitter, 1+jitter] drawn in that
    order from one seeded generator; ambient gets a deterministic annual
    sinusoid on top of the daily profile. Day 0 is jittered too, so no day
    of the output equals the input day.
    """
    if day.n_hours != 24:
        raise ValueError("synthetic series must be built from a single day")
    if n_days < 1:
        raise ValueError("need at least one day")
    if not 0.0 <= jitter < 1.0:
        raise ValueError("jitter must lie in [0, 1)")

    rng = np.random.default_rng(seed)
    n_ren = len(day.renewable_names)
    load = np.empty(24 * n_days)
    price = np.empty(24 * n_days)
    ambient = np.empty(24 * n_days)
    renewable = np.empty((n_ren, 24 * n_days))
    for d in range(n_days):
        sl = slice(24 * d, 24 * (d + 1))
        load[sl] = day.fixed_load * rng.uniform(1 - jitter, 1 + jitter, 24)
        renewable[:, sl] = day.renewable * rng.uniform(
            1 - jitter, 1 + jitter, (n_ren, 24))
        price[sl] = day.price * rng.uniform(1 - jitter, 1 + jitter, 24)
        ambient[sl] = day.ambient + ANNUAL_AMBIENT_SWING * math.sin(
            2.0 * math.pi * d / 365.0)
    return TimeSeriesTable(
        hours=np.arange(1, 24 * n_days + 1), fixed_load=load, price=price,
        ambient=ambient, renewable=renewable,
        renewable_names=day.renewable_names,
        line_capacity=day.line_capacity,
        loading_cap_fraction=day.loading_cap_fraction)


# ---------------------------------------------------------------------------
# Results bundles

def _scenario_echo(config: ScenarioConfig) -> dict:
    echo = dataclasses.asdict(config)
    if math.isinf(echo["loading_cap_fraction"]):
        echo["loading_cap_fraction"] = None      # JSON has no infinity
    return echo


def _schedule_columns(table: TimeSeriesTable, fleet: AssetFleet,
                      exchange: np.ndarray) -> dict:
    cols = {
        "hour": table.hours,
        "fixed_load_mw": table.fixed_load,
        "price": table.price,
        "ambient_c": table.ambient,
    }
    for i, name in enumerate(table.renewable_names):
        cols[name] = table.renewable[i]
    cols["exchange_mw"] = exchange
    cols["loading_pu"] = np.abs(exchange) / fleet.transformer.rated_power
    return cols


def bundle_results(config: ScenarioConfig, fleet: AssetFleet,
                   table: TimeSeriesTable, result) -> ResultsBundle:
    """Assemble the output bundle for an optimize() run.

    ``fleet`` and ``table`` must be the transformed pair the run used. The
    schedule carries every decision series so the constraint replay can be
    rerun from the CSV alone.
    """
    cols = _schedule_columns(table, fleet, result.exchange)

    def concat(attr):
        return np.concatenate([getattr(b, attr) for b in result.blocks], axis=1)

    if fleet.dispatchable:
        gen, com = concat("unit_output"), concat("commitment")
        for i, u in enumerate(fleet.dispatchable):
            cols[f"gen_{u.name}_mw"] = gen[i]
            cols[f"commit_{u.name}"] = com[i]
    if fleet.storage:
        dch, ch = concat("discharge"), concat("charge")
        don, con = concat("discharge_state"), concat("charge_state")
        soc = concat("energy")
        for i, s in enumerate(fleet.storage):
            cols[f"discharge_{s.name}_mw"] = dch[i]
            cols[f"charge_{s.name}_mw"] = ch[i]
            cols[f"energy_{s.name}_mwh"] = soc[i]
            cols[f"discharge_on_{s.name}"] = don[i]
            cols[f"charge_on_{s.name}"] = con[i]
    if fleet.adjustable:
        dem, dst = concat("demand"), concat("demand_state")
        for i, a in enumerate(fleet.adjustable):
            cols[f"adjust_{a.name}_mw"] = dem[i]
            cols[f"adjust_on_{a.name}"] = dst[i]

    summary = {
        "case": config.case,
        "horizon_hours": table.n_hours,
        "asset_management": config.asset_management_enabled,
        "operation_cost": float(result.operation_cost),
        "lol_percent": float(result.lol_percent),
        "lifetime_years": float(result.lifetime_years),
        "termination": result.termination,
        "iterations": len(result.iterations),
        "cuts": len(result.cuts),
    }
    return ResultsBundle(schedule=cols, iterations=tuple(result.iterations),
                         summary=summary, scenario=_scenario_echo(config))


def grid_only_results(config: ScenarioConfig, fleet: AssetFleet,
                      table: TimeSeriesTable) -> ResultsBundle:
    """Case 0 bundle: loads are only supplied by the utility grid.

    No local generation runs; adjustable loads are served uniformly over
    their windows (required energy / window length per hour, which respects
    the paper fleet's per-hour caps) and everything is imported. Line and
    loading caps are scheduling constraints and do not apply here: the
    transformer sees whatever the unmanaged profile demands, which is the
    overload this comparison exists to expose.
    """
    n = table.n_hours
    adjustable = np.zeros((len(fleet.adjustable), n))
    for i, a in enumerate(fleet.adjustable):
        width = a.window_end - a.window_start + 1
        for day in range(n // 24):
            lo = day * 24 + a.window_start - 1
            adjustable[i, lo:lo + width] = a.required_energy / width
    exchange = -(table.fixed_load + adjustable.sum(axis=0))
    lol, life = horizon_loss_of_life(
        np.abs(exchange), table.ambient, fleet.transformer)
    cost = -float(np.dot(table.price, exchange))
    summary = {
        "case": config.case,
        "horizon_hours": table.n_hours,
        "asset_management": False,
        "operation_cost": cost,
        "lol_percent": float(lol),
        "lifetime_years": float(life),
        "termination": "grid-only",
        "iterations": 0,
        "cuts": 0,
    }
    cols = _schedule_columns(table, fleet, exchange)
    for i, a in enumerate(fleet.adjustable):
        cols[f"adjust_{a.name}_mw"] = adjustable[i]
    return ResultsBundle(schedule=cols, iterations=(), summary=summary,
                         scenario=_scenario_echo(config))


def verify_bundle(bundle: ResultsBundle, params: TransformerThermalParams,
                  tol: float = 1e-9) -> None:
    """Recompute the thermal summary from the schedule; raise on mismatch."""
    sched = bundle.schedule
    n = len(sched["hour"])
    if n == 0:
        raise ValueError("empty horizon")
    lol, life = horizon_loss_of_life(
        np.abs(sched["exchange_mw"]), sched["ambient_c"], params)
    got = bundle.summary["lol_percent"]
    if abs(lol - got) > tol * max(1.0, abs(lol)):
        raise ValueError(f"summary lol {got!r} != schedule replay {lol!r}")
    got = bundle.summary["lifetime_years"]
    if abs(life - got) > tol * max(1.0, abs(life)):
        raise ValueError(f"summary lifetime {got!r} != schedule replay {life!r}")
    loading = np.abs(sched["exchange_mw"]) / params.rated_power
    if np.any(np.abs(loading - sched["loading_pu"]) > 1e-12):
        raise ValueError("loading column does not match the exchange")


_BINARY_PREFIXES = ("commit_", "discharge_on_", "charge_on_", "adjust_on_")


def _cell(name: str, val) -> str:
    if name == "hour":
        return str(int(val))
    if name.startswith(_BINARY_PREFIXES):
        return str(int(round(float(val))))
    return _num(val)


def write_results(bundle: ResultsBundle, out_dir, params=None):
    """Write schedule.csv, iterations.csv and summary.json under out_dir.

    Output is byte-identical across reruns of the same bundle: floats are
    repr'd, JSON keys sorted, and no timestamps or wall times appear.
    When ``params`` is given the thermal-consistency invariant is checked
    first. Returns the three paths.
    """
    sched = bundle.schedule
    if len(sched.get("hour", ())) == 0:
        raise ValueError("refusing to write an empty horizon")
    if params is not None:
        verify_bundle(bundle, params)

    os.makedirs(out_dir, exist_ok=True)
    sched_path = os.path.join(out_dir, "schedule.csv")
    iter_path = os.path.join(out_dir, "iterations.csv")
    summ_path = os.path.join(out_dir, "summary.json")

    names = list(sched)
    with open(sched_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for t in range(len(sched["hour"])):
            fh.write(",".join(_cell(n, sched[n][t]) for n in names) + "\n")

    # Wall times are deliberately dropped: they would break determinism.
    with open(iter_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("block,iteration,lower_bound,subproblem_value,upper_bound,"
                 "best_upper_bound,gap,cut_added,clamped_hours\n")
        for r in bundle.iterations:
            fh.write(",".join([
                str(r.block), str(r.iteration), _num(r.lower_bound),
                _num(r.subproblem_value), _num(r.upper_bound),
                _num(r.best_upper_bound), _num(r.gap),
                str(int(r.cut_added)), str(r.clamped_hours)]) + "\n")

    doc = dict(bundle.summary)
    doc["scenario"] = bundle.scenario
    with open(summ_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")

    return sched_path, iter_path, summ_path


def schedule_replay_violations(fleet: AssetFleet, table: TimeSeriesTable,
                               result) -> list:
    """Constraint replay of an optimize() result against its inputs."""
    bad = []
    carry = initial_carry(fleet)
    hours = table.to_hourly()
    t0 = 0
    for b, sol in enumerate(result.blocks):
        chunk = hours[t0:t0 + sol.n_hours]
        for msg in replay_violations(fleet, chunk, carry, sol):
            bad.append(f"block {b}: {msg}")
        carry = advance_carry(fleet, carry, sol)
        t0 += sol.n_hours
    if t0 != table.n_hours:
        bad.append(f"blocks cover {t0} hours, series has {table.n_hours}")
    return bad
