"""Command-line front end.

Subcommands: ``run`` one scenario, ``sweep`` a sensitivity axis, ``lol``
for stand-alone loss-of-life evaluation of a loading series, ``validate``
to check inputs without solving. Results land in ``--out`` (default: the
``GRIDLIFE_OUT`` environment variable, else ``./out``) as schedule.csv,
iterations.csv, summary.json and a tidy plot.csv; identical inputs and
seeds reproduce them byte for byte.

Exit codes: 0 solved (converged or iteration limit with an incumbent),
2 parse/usage failure, 3 infeasible model, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

from . import __version__
from .benders import BendersOptions, InfeasibleScheduleError, optimize
from .dataio import (
    ParseError,
    ScenarioConfig,
    bundle_results,
    grid_only_results,
    parse_assets,
    parse_loading_series,
    parse_scenario,
    parse_timeseries,
    parse_transformer,
    write_results,
)
from .milp import NumericalSolveError, SolverLimits
from .thermal import TransformerThermalParams, horizon_loss_of_life

__all__ = ["main"]

_SWEEP_AXES = {
    "price": "price_scale",
    "loading_cap": "loading_cap_fraction",
    "adjustable_energy": "adjustable_energy_delta",
}


def _default_out() -> str:
    return os.environ.get("GRIDLIFE_OUT", "out")


def _benders_options(cfg: ScenarioConfig) -> BendersOptions:
    kw = {"block_hours": cfg.block_hours}
    if cfg.gap_tolerance is not None:
        kw["gap_tolerance"] = cfg.gap_tolerance
    if cfg.max_iterations is not None:
        kw["max_iterations"] = cfg.max_iterations
    if cfg.master_max_nodes is not None:
        kw["master_limits"] = SolverLimits(max_nodes=cfg.master_max_nodes)
    return BendersOptions(**kw)


def _solve_scenario(cfg: ScenarioConfig, fleet, table):
    """apply_scenario + optimize (or the grid-only path for Case 0)."""
    from .dataio import apply_scenario

    fl, tb, _params = apply_scenario(cfg, fleet, table)
    if cfg.case == 0:
        return grid_only_results(cfg, fl, tb), fl, tb
    res = optimize(fl, tb.to_hourly(), _benders_options(cfg))
    return bundle_results(cfg, fl, tb, res), fl, tb


def _write_plot(bundle, out_dir) -> str:
    """Tidy overlay CSV: one row per hour with the case label repeated."""
    path = os.path.join(out_dir, "plot.csv")
    sched = bundle.schedule
    case = str(bundle.summary["case"])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("hour,case,exchange_mw,loading_pu\n")
        for t in range(len(sched["hour"])):
            fh.write(f"{int(sched['hour'][t])},{case},"
                     f"{float(sched['exchange_mw'][t])!r},"
                     f"{float(sched['loading_pu'][t])!r}\n")
    return path


def cmd_run(args) -> int:
    fleet = parse_assets(args.assets)
    table = parse_timeseries(args.series)
    cfg = parse_scenario(args.scenario) if args.scenario else ScenarioConfig()
    bundle, fl, _tb = _solve_scenario(cfg, fleet, table)
    write_results(bundle, args.out, params=fl.transformer)
    _write_plot(bundle, args.out)
    s = bundle.summary
    print(f"case {s['case']}: cost {s['operation_cost']:.2f}  "
          f"lol {s['lol_percent']:.6f} %  lifetime {s['lifetime_years']:.2f} y  "
          f"[{s['termination']}, {s['iterations']} iterations]")
    print(f"results in {args.out}")
    return 0


def _sweep_point(cfg: ScenarioConfig, fleet, table, out_dir):
    """Both AM states for one axis value; returns the sweep CSV cells."""
    cells = {}
    for tag, enabled in (("noam", False), ("am", True)):
        sub = dataclasses.replace(cfg, asset_management_enabled=enabled)
        bundle, fl, _tb = _solve_scenario(sub, fleet, table)
        point_dir = os.path.join(out_dir, tag)
        write_results(bundle, point_dir, params=fl.transformer)
        _write_plot(bundle, point_dir)
        s = bundle.summary
        cells[f"lol_{tag}"] = s["lol_percent"]
        cells[f"lifetime_{tag}"] = s["lifetime_years"]
        cells[f"cost_{tag}"] = s["operation_cost"]
    return cells


_SWEEP_COLS = ("lol_noam", "lol_am", "lifetime_noam", "lifetime_am",
               "cost_noam", "cost_am")


def cmd_sweep(args) -> int:
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print(f"error: cannot parse sweep values '{args.values}'", file=sys.stderr)
        return 2
    if not values:
        print("error: empty sweep values list", file=sys.stderr)
        return 2
    field = _SWEEP_AXES[args.axis]

    fleet = parse_assets(args.assets)
    table = parse_timeseries(args.series)
    base = parse_scenario(args.scenario) if args.scenario else ScenarioConfig()

    rows = []
    first_failure = 0
    for v in values:
        label = f"{args.axis}_{v:+g}"
        try:
            cfg = dataclasses.replace(base, **{field: v})
            cells = _sweep_point(cfg, fleet, table, os.path.join(args.out, label))
            rows.append((v, cells, "ok"))
            print(f"{label}: lol {cells['lol_noam']:.6f} -> {cells['lol_am']:.6f} %")
        except (ParseError, ValueError) as exc:
            rows.append((v, {}, f"parse-error: {exc}"))
            first_failure = first_failure or 2
        except InfeasibleScheduleError as exc:
            rows.append((v, {}, f"infeasible: {exc}"))
            first_failure = first_failure or 3
        except (NumericalSolveError, np.linalg.LinAlgError) as exc:
            rows.append((v, {}, f"numerical: {exc}"))
            first_failure = first_failure or 4
        if rows[-1][2] != "ok":
            print(f"{label}: FAILED ({rows[-1][2]})", file=sys.stderr)

    os.makedirs(args.out, exist_ok=True)
    sweep_path = os.path.join(args.out, "sweep.csv")
    with open(sweep_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("value," + ",".join(_SWEEP_COLS) + ",status\n")
        for v, cells, status in rows:
            mid = ",".join(repr(cells[c]) if c in cells else "" for c in _SWEEP_COLS)
            fh.write(f"{v!r},{mid},{status}\n")
    print(f"sweep table in {sweep_path}")
    return first_failure


def cmd_lol(args) -> int:
    loading, ambient = parse_loading_series(args.series, column=args.column)
    params = parse_transformer(args.params) if args.params \
        else TransformerThermalParams()
    lol, life = horizon_loss_of_life(loading, ambient, params)
    print(f"loss of life: {lol:.10g} %")
    print(f"expected lifetime: {life:.10g} years")
    return 0


def cmd_validate(args) -> int:
    fleet = parse_assets(args.assets)
    n_assets = sum(len(g) for g in (fleet.dispatchable, fleet.renewable,
                                    fleet.storage, fleet.adjustable))
    print(f"{args.assets}: OK ({n_assets} assets)")
    table = parse_timeseries(args.series)
    print(f"{args.series}: OK ({table.n_hours} hours, "
          f"{len(table.renewable_names)} renewable columns)")
    if args.scenario:
        from .dataio import apply_scenario

        cfg = parse_scenario(args.scenario)
        apply_scenario(cfg, fleet, table)
        print(f"{args.scenario}: OK (case {cfg.case})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true",
                        help="stream Benders iterations to stderr")

    p = argparse.ArgumentParser(
        prog="gridlife",
        description="Microgrid scheduling with transformer loss-of-life cost.")
    p.add_argument("--version", action="version", version=f"gridlife {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def io_args(q, scenario_help):
        q.add_argument("--assets", required=True, help="asset fleet JSON")
        q.add_argument("--series", required=True, help="hourly series CSV")
        q.add_argument("--scenario", help=scenario_help)

    q = sub.add_parser("run", parents=[common], help="solve one scenario")
    io_args(q, "scenario JSON (default: plain Case-custom run)")
    q.add_argument("--out", default=_default_out(),
                   help="output directory (default: $GRIDLIFE_OUT or ./out)")
    q.set_defaults(func=cmd_run)

    q = sub.add_parser("sweep", parents=[common],
                       help="rerun a scenario across one sensitivity axis")
    io_args(q, "base scenario JSON the axis varies")
    q.add_argument("--axis", required=True, choices=sorted(_SWEEP_AXES))
    q.add_argument("--values", required=True,
                   help="comma-separated axis values, e.g. -0.3,0,0.3")
    q.add_argument("--out", default=_default_out())
    q.set_defaults(func=cmd_sweep)

    q = sub.add_parser("lol", parents=[common],
                       help="loss of life of a loading series, no optimization")
    q.add_argument("--series", required=True,
                   help="CSV with ambient_c and a loading column")
    q.add_argument("--column", default="loading_mw",
                   help="loading column name (|exchange_mw| of a schedule works)")
    q.add_argument("--params", help="transformer parameters JSON "
                   "(default: 10 MVA reference transformer)")
    q.set_defaults(func=cmd_lol)

    q = sub.add_parser("validate", parents=[common],
                       help="parse inputs and report, without solving")
    io_args(q, "optional scenario JSON to check against the inputs")
    q.set_defaults(func=cmd_validate)

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verbose:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        log = logging.getLogger("gridlife.benders")
        log.addHandler(handler)
        log.setLevel(logging.INFO)
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleScheduleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (NumericalSolveError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
