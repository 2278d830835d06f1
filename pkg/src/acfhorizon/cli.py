"""Command-line interface.

Subcommands::

    gen       build the default or a custom scenario; write config + trajectory
    simulate  config (scenario or explicit system) -> trajectory CSV
    analyze   trajectory CSV -> indicator CSV (+ summary, relative rows)
    horizon   indicator CSV -> planning-horizon recommendation (JSON)
    report    all of the above chained, plus peak, oscillation and
              classification reports

Exit codes: 0 success, 1 usage error, 2 input or format error, 3 numeric
error (singular system, every window zero-variance). Data goes to files or
stdout; diagnostics go to stderr. ``ACFHORIZON_SEED`` supplies the seed when
``--seed`` is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .acf_core import WindowSpec, acf_cells, acf_grid, depth_summary, depth_time_matrix, relative_to_base
from .digital_copy import FINES, ScenarioConfig, build_scenario, paper_scenario, run_scenario, with_overrides
from .dyn_system import Trajectory, observe, simulate
from .errors import AcfHorizonError, ConfigInvalid, DegenerateBase, ZeroVariance
from .horizon import (
    DEFAULT_THRESHOLDS,
    DEFAULT_TIERS,
    classify_components,
    detect_oscillation,
    detect_peaks,
    recommend_horizon,
)

SEED_ENV = "ACFHORIZON_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _depth(text: str) -> int:
    v = _nonneg_int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"depth must be >= 2, got {v}")
    return v


def _seed(text: str) -> int:
    v = _nonneg_int(text)
    if v >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _resolve_seed(args) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        return _seed(env)
    except argparse.ArgumentTypeError as exc:
        raise ConfigInvalid(SEED_ENV, str(exc)) from None


def _check_tiers(tiers) -> tuple[float, ...]:
    if len(tiers) != 3 or not 0 < tiers[0] < tiers[1] < tiers[2] <= 1:
        raise UsageError(f"--tiers must be three increasing fractions in (0, 1], got {tiers}")
    return tiers


def _check_thresholds(th) -> tuple[float, float]:
    if len(th) != 2 or not 0 <= th[0] < th[1] <= 1:
        raise UsageError(f"--thresholds must be low,high with 0 <= low < high <= 1, got {th}")
    return th


def _write_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise io.FileError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- scenario and trajectory helpers -----------------------------------------

def _scenario_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        cfg = io.load_scenario_config(args.config)
    else:
        cfg = paper_scenario()
    seed = _resolve_seed(args)
    if seed is not None:
        cfg = with_overrides(cfg, seed=seed)
    return cfg


def _simulate_config(path, seed) -> Trajectory:
    parser = io.read_config(path)
    if parser.has_section("scenario"):
        cfg = io.scenario_from_section(parser["scenario"])
        if seed is not None:
            cfg = with_overrides(cfg, seed=seed)
        return run_scenario(build_scenario(cfg))
    model, x0, controls, noise, T, obs, names = io.system_from_config(parser, base_dir=Path(path).parent)
    if seed is not None and noise.kind != "none":
        noise = replace(noise, seed=seed)
    traj = simulate(x0, model, controls, noise, T, names=names)
    if obs is not None:
        traj = observe(traj, obs)
    return traj


def _analyze(traj: Trajectory, lag: int, max_depth):
    matrix = depth_time_matrix(traj, c=lag, K=max_depth)
    if matrix.size and int(np.nanmax(np.where(matrix.n_valid < 0, 0, matrix.n_valid))) == 0:
        raise ZeroVariance("every window has zero variance; no cell is defined")
    return matrix, depth_summary(matrix)


def _relative_rows(matrix, base_index: int):
    rows = []
    for k in matrix.depths:
        k = int(k)
        values = matrix.row(k)
        times = matrix.times(k)
        try:
            rel = relative_to_base(values, base_index)
            flag = False
        except DegenerateBase:
            rel = np.full(values.size, np.nan)
            flag = True
        for t, v in zip(times, rel):
            rows.append((k, int(t), v, flag))
    return rows


def _relative_path(out) -> Path:
    p = Path(out)
    return p.with_name(p.name[:-4] + ".relative.csv" if p.name.endswith(".csv") else p.name + ".relative.csv")


def _write_analysis(matrix, summary, out, summary_out, relative_base) -> None:
    io.write_indicator_csv(matrix, out)
    if summary_out:
        io.write_summary_csv(summary, summary_out)
    if relative_base is not None:
        io.write_relative_csv(_relative_rows(matrix, relative_base), _relative_path(out))


def _horizon_dict(rec, K) -> dict:
    return {
        "short_k": rec.short_k,
        "medium_k": rec.medium_k,
        "long_k": rec.long_k,
        "tiers": list(rec.tiers),
        "rationale": list(rec.rationale),
        "max_depth": K,
    }


# -- subcommands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.scenario == "custom" and not args.config:
        raise UsageError("gen --scenario custom requires --config")
    if args.scenario == "paper" and args.config:
        raise UsageError("gen --scenario paper does not take --config")
    cfg = _scenario_config(args)
    out = Path(args.out_dir)
    io.write_scenario_config(cfg, out / "config.ini")
    traj = run_scenario(build_scenario(cfg))
    io.write_series(traj, out / "trajectory.csv")
    print(f"clamp events: {traj.clamp_events}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    traj = _simulate_config(args.config, _resolve_seed(args))
    io.write_series(traj, args.out)
    return 0


def cmd_analyze(args) -> int:
    traj = io.parse_series(args.inp)
    matrix, summary = _analyze(traj, args.lag, args.max_depth)
    _write_analysis(matrix, summary, args.out, args.summary, args.relative_base)
    return 0


def cmd_horizon(args) -> int:
    tiers = _check_tiers(args.tiers)
    summary = io.summary_from_entries(io.read_indicator_csv(args.inp))
    rec = recommend_horizon(summary, tiers)
    _write_json(_horizon_dict(rec, summary.K), args.out)
    return 0


def _component_index(traj: Trajectory, name: str) -> int:
    if name.isdigit():
        i = int(name)
        if i >= traj.n:
            raise ConfigInvalid("osc-component", f"index {i} outside {traj.n} columns")
        return i
    if name not in traj.names:
        raise ConfigInvalid("osc-component", f"no column named {name!r}")
    return traj.names.index(name)


def build_report(traj: Trajectory, args) -> dict:
    """Every report artifact as plain data, keyed by output file name."""
    tiers = _check_tiers(args.tiers)
    thresholds = _check_thresholds(args.thresholds)
    matrix, summary = _analyze(traj, args.lag, args.max_depth)

    rec = recommend_horizon(summary, tiers)

    peak_k = args.peak_depth
    if peak_k > matrix.K:
        raise ConfigInvalid("peak-depth", f"{peak_k} exceeds max depth {matrix.K}")
    row = matrix.row(peak_k)
    pr = detect_peaks(row, args.prominence, times=matrix.times(peak_k), k=peak_k)
    peaks = {
        "k": peak_k,
        "peak_times": list(pr.peak_times),
        "dominant_period": pr.dominant_period,
        "prominence_used": pr.prominence_used,
        "prominences": list(pr.prominences),
    }

    i = _component_index(traj, args.osc_component)
    osc_k = args.osc_depth
    values = acf_grid(traj.data, osc_k, args.lag)[:, i]
    times = matrix.times(osc_k)
    osc = {"component": traj.names[i], "k": osc_k, "reports": []}
    if np.isnan(values).any():
        osc["undefined_cells"] = int(np.isnan(values).sum())
    else:
        for P in args.periods:
            r = detect_oscillation(values, P, times=times)
            osc["reports"].append({
                "period": r.period,
                "coverage": r.coverage,
                "expected_hits": r.expected_hits,
                "extremum": r.extremum,
                "hit_times": list(r.hit_times),
            })

    cells = acf_cells(traj, WindowSpec(args.class_depth, args.lag))
    classes = classify_components(cells, thresholds, n_params=traj.n)
    class_rows = [
        (c.i, traj.names[c.i], c.label, "" if c.positive_fraction is None else io.fmt(c.positive_fraction), c.n_cells)
        for c in classes
    ]
    return {
        "matrix": matrix,
        "summary": summary,
        "horizon": _horizon_dict(rec, matrix.K),
        "peaks": peaks,
        "oscillation": osc,
        "classification": class_rows,
    }


def cmd_report(args) -> int:
    out = Path(args.out_dir)
    if args.inp:
        if args.config:
            raise UsageError("report takes either --in or --config, not both")
        traj = io.parse_series(args.inp)
    else:
        cfg = _scenario_config(args)
        io.write_scenario_config(cfg, out / "config.ini")
        traj = run_scenario(build_scenario(cfg))
        io.write_series(traj, out / "trajectory.csv")
    rep = build_report(traj, args)
    _write_analysis(rep["matrix"], rep["summary"], out / "indicator.csv", out / "summary.csv", args.relative_base)
    _write_json(rep["horizon"], out / "horizon.json")
    _write_json(rep["peaks"], out / "peaks.json")
    _write_json(rep["oscillation"], out / "oscillation.json")
    io.write_rows(out / "classification.csv", ["i", "name", "class", "positive_fraction", "n_cells"],
                  rep["classification"])
    return 0


# -- parser ----------------------------------------------------------------------

def _add_analysis_flags(p) -> None:
    p.add_argument("--lag", type=_nonneg_int, default=1, help="lag c between the two windows (default 1)")
    p.add_argument("--max-depth", type=_depth, default=None, help="largest depth K (default T//2)")
    p.add_argument("--relative-base", type=_nonneg_int, nargs="?", const=0, default=None, metavar="INDEX",
                   help="also write rows relative to the entry at INDEX (default 0) as *.relative.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="acfhorizon", description="Windowed autocorrelation indicators and planning horizons.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="build a scenario and write its config and trajectory")
    p.add_argument("--scenario", choices=("paper", "custom"), default="paper")
    p.add_argument("--config", help="scenario config for --scenario custom")
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="simulate a config into a trajectory CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="indicator matrix of a trajectory CSV")
    p.add_argument("--in", dest="inp", required=True)
    _add_analysis_flags(p)
    p.add_argument("--out", required=True, help="indicator CSV")
    p.add_argument("--summary", help="summary CSV k,W")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("horizon", help="planning-horizon recommendation from an indicator CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--tiers", type=_float_list, default=DEFAULT_TIERS)
    p.add_argument("--out", help="JSON output (default stdout)")
    p.set_defaults(func=cmd_horizon)

    p = sub.add_parser("report", help="generate or load, analyze and report")
    p.add_argument("--in", dest="inp", help="trajectory CSV (skips generation)")
    p.add_argument("--config", help="scenario config (default: the built-in scenario)")
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--out-dir", required=True)
    _add_analysis_flags(p)
    p.add_argument("--tiers", type=_float_list, default=DEFAULT_TIERS)
    p.add_argument("--peak-depth", type=_depth, default=12)
    p.add_argument("--prominence", type=float, default=None, help="default: 10%% of the row range")
    p.add_argument("--osc-depth", type=_depth, default=4)
    p.add_argument("--osc-component", default=FINES, help="column name or index")
    p.add_argument("--periods", type=_int_list, default=(3, 5))
    p.add_argument("--class-depth", type=_depth, default=12)
    p.add_argument("--thresholds", type=_float_list, default=DEFAULT_THRESHOLDS)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except AcfHorizonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
