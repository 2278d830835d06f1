"""File formats: series and indicator CSVs, key=value configs.

Series CSV::

    t,<name1>,...,<nameN>
    0,1.5,2.25
    1,...

``t`` must increase by exactly one per row. Numbers are rendered with 12
significant digits.

Indicator CSV (long format, one row per valid depth/time pair)::

    k,t,W,W_plus,W_minus,n_valid

Summary CSV::

    k,W

Config files are INI-style (``[section]`` headers, ``key = value`` lines).
A ``[scenario]`` section holds ``ScenarioConfig`` fields; tuples are
comma-separated. A ``[system]`` section describes an explicit model::

    [system]
    A = 0.9 0; 0 0.5        ; rows separated by ';'
    B = 1; 0
    x0 = 1 0
    T = 20
    controls = 0.5          ; constant control vector, or
    controls_csv = u.csv    ; one row per step: step,u1,...,um

    [noise]
    kind = gaussian
    sigma = 0.1
    seed = 7

    [observation]
    indices = 0 1
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import fields
from pathlib import Path

import numpy as np

from .acf_core import DepthSummary, DepthTimeMatrix, IndicatorDecomposition
from .digital_copy import ScenarioConfig
from .dyn_system import NoiseModel, ObservationMap, SystemModel, Trajectory
from .errors import ConfigInvalid, FileError, FormatError, NonContiguousTime

INDICATOR_HEADER = ["k", "t", "W", "W_plus", "W_minus", "n_valid"]
SUMMARY_HEADER = ["k", "W"]


def fmt(value: float) -> str:
    """Fixed 12-significant-digit rendering."""
    if value == 0:
        return "0"
    return f"{float(value):.12g}"


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(f"column {column!r}: {text!r} is not a number", line) from None
    if not math.isfinite(value):
        raise FormatError(f"column {column!r}: non-finite value {text!r}", line)
    return value


def _parse_int(text: str, line: int, column: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"column {column!r}: {text!r} is not an integer", line) from None


def _open_read(path):
    try:
        return open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc.strerror or exc}") from None


def _open_write(path):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc.strerror or exc}") from None


def parse_series(path) -> Trajectory:
    with _open_read(path) as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError("file is empty", 1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 1 or header[0] != "t":
        raise FormatError("header must start with 't'", 1)
    names = header[1:]
    if len(set(names)) != len(names):
        raise FormatError("duplicate column names in header", 1)
    times = []
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not f.strip() for f in row):
            raise FormatError("blank line", lineno)
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, found {len(row)}", lineno)
        t = _parse_int(row[0].strip(), lineno, "t")
        if times and t != times[-1] + 1:
            raise NonContiguousTime(t, lineno)
        times.append(t)
        data.append([_parse_float(f.strip(), lineno, names[j]) for j, f in enumerate(row[1:])])
    if not data:
        raise FormatError("no data rows", 2)
    arr = np.array(data, dtype=float).reshape(len(data), len(names))
    return Trajectory(arr, t0=times[0], names=names)


def write_series(traj: Trajectory, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *traj.names])
        for t, row in zip(traj.times, traj.data):
            w.writerow([int(t), *(fmt(v) for v in row)])


def write_indicator_csv(matrix: DepthTimeMatrix, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INDICATOR_HEADER)
        for e in matrix.entries():
            w.writerow([e.k, e.t, fmt(e.w_total), fmt(e.w_plus), fmt(e.w_minus), e.n_valid])


def read_indicator_csv(path) -> list[IndicatorDecomposition]:
    with _open_read(path) as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != INDICATOR_HEADER:
        raise FormatError(f"header must be {','.join(INDICATOR_HEADER)}", 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(INDICATOR_HEADER):
            raise FormatError(f"expected {len(INDICATOR_HEADER)} fields, found {len(row)}", lineno)
        out.append(IndicatorDecomposition(
            k=_parse_int(row[0], lineno, "k"),
            t=_parse_int(row[1], lineno, "t"),
            w_total=_parse_float(row[2], lineno, "W"),
            w_plus=_parse_float(row[3], lineno, "W_plus"),
            w_minus=_parse_float(row[4], lineno, "W_minus"),
            n_valid=_parse_int(row[5], lineno, "n_valid"),
        ))
    return out


def summary_from_entries(entries) -> DepthSummary:
    """Rebuild ``W[k]`` from indicator rows; depths must run 2, 3, ... without gaps."""
    sums: dict[int, float] = {}
    for e in entries:
        sums[e.k] = sums.get(e.k, 0.0) + e.w_total
    if not sums:
        return DepthSummary(())
    depths = sorted(sums)
    if depths != list(range(2, depths[-1] + 1)):
        raise FormatError(f"indicator depths must run 2..K without gaps, found {depths[0]}..{depths[-1]}")
    return DepthSummary(tuple(sums[k] for k in depths))


def write_summary_csv(summary: DepthSummary, path) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for k, v in zip(summary.depths, summary.W):
            w.writerow([k, fmt(v)])


def write_relative_csv(rows, path) -> None:
    """Rows of ``(k, t, W_relative, degenerate_base)``."""
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "t", "W_relative", "degenerate_base"])
        for k, t, v, flag in rows:
            w.writerow([k, t, fmt(v), int(flag)])


def write_rows(path, header, rows) -> None:
    with _open_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# -- configs -----------------------------------------------------------------

def _read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc.strerror or exc}") from None
    except configparser.Error as exc:
        raise FormatError(f"{path}: {exc}") from None
    return parser


def _convert(name: str, text: str, kind):
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind == "tuple":
            return tuple(int(p) for p in text.replace(",", " ").split())
    except ValueError:
        raise ConfigInvalid(name, f"cannot parse {text!r}") from None
    return text


def _field_kinds() -> dict:
    kinds = {}
    for f in fields(ScenarioConfig):
        kinds[f.name] = "tuple" if f.name.endswith("_window") else (int if f.type == "int" else float)
    return kinds


def scenario_from_section(section) -> ScenarioConfig:
    kinds = _field_kinds()
    values = {}
    for key, text in section.items():
        if key not in kinds:
            raise ConfigInvalid(key, "unknown scenario field")
        values[key] = _convert(key, text, kinds[key])
    return ScenarioConfig(**values)


def write_scenario_config(config: ScenarioConfig, path) -> None:
    lines = ["[scenario]"]
    for f in fields(ScenarioConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            text = ",".join(str(v) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    with _open_write(path) as fh:
        fh.write("\n".join(lines) + "\n")


def read_config(path) -> configparser.ConfigParser:
    return _read_ini(path)


def load_scenario_config(path) -> ScenarioConfig:
    parser = _read_ini(path)
    if not parser.has_section("scenario"):
        raise ConfigInvalid("scenario", f"{path} has no [scenario] section")
    return scenario_from_section(parser["scenario"])


def _matrix(name: str, text: str) -> np.ndarray:
    rows = [r for r in text.split(";")]
    try:
        parsed = [[float(v) for v in r.replace(",", " ").split()] for r in rows]
    except ValueError:
        raise ConfigInvalid(name, f"cannot parse matrix {text!r}") from None
    widths = {len(r) for r in parsed}
    if len(widths) != 1 or 0 in widths:
        raise ConfigInvalid(name, "matrix rows must be non-empty and of equal length")
    return np.array(parsed)


def _vector(name: str, text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError:
        raise ConfigInvalid(name, f"cannot parse vector {text!r}") from None


def system_from_config(parser: configparser.ConfigParser, base_dir=None):
    """Model, x0, controls, noise, T and observation map from a ``[system]`` config."""
    if not parser.has_section("system"):
        raise ConfigInvalid("system", "config has no [system] section")
    sec = parser["system"]
    for key in ("A", "x0", "T"):
        if key not in sec:
            raise ConfigInvalid(key, "missing from [system]")
    A = _matrix("A", sec["A"])
    B = _matrix("B", sec["B"]) if "B" in sec else np.zeros((A.shape[0], 1))
    model = SystemModel(A, B)
    x0 = _vector("x0", sec["x0"])
    T = _convert("T", sec["T"], int)
    if T < 1:
        raise ConfigInvalid("T", "must be >= 1")
    if "controls_csv" in sec:
        cpath = Path(sec["controls_csv"])
        if base_dir is not None and not cpath.is_absolute():
            cpath = Path(base_dir) / cpath
        ctl = parse_series(cpath)
        controls = ctl.data
    else:
        u = _vector("controls", sec.get("controls", " ".join(["0"] * model.m)))
        if u.size != model.m:
            raise ConfigInvalid("controls", f"needs {model.m} values")
        controls = np.tile(u, (max(T - 1, 0), 1))

    noise = NoiseModel()
    if parser.has_section("noise"):
        ns = parser["noise"]
        comps = ns.get("components")
        try:
            noise = NoiseModel(
                kind=ns.get("kind", "none"),
                sigma=_convert("sigma", ns.get("sigma", "0"), float),
                fine_magnitude=_convert("fine_magnitude", ns.get("fine_magnitude", "0"), float),
                fine_period=_convert("fine_period", ns.get("fine_period", "1"), int),
                seed=_convert("seed", ns.get("seed", "0"), int),
                components=None if comps is None else _convert("components", comps, "tuple"),
            )
        except ValueError as exc:
            raise ConfigInvalid("noise", str(exc)) from None

    obs = None
    names = None
    if parser.has_section("observation"):
        os_ = parser["observation"]
        if "indices" in os_:
            obs = ObservationMap(_convert("indices", os_["indices"], "tuple"))
    if "names" in sec:
        names = sec["names"].replace(",", " ").split()
    return model, x0, controls, noise, T, obs, names
