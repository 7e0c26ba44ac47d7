"""Command-line front end: JSON job configs in, CSV (and figures) out.

Config layout (JSON, unknown keys rejected):

    {
      "system": {"n_qubits": 2, "rabi": 1.0, "detuning": 0.0,
                 "j": 1.5, "gamma": 1.0, "nbar": 0.0, "omega_scale": 100.0},
      "run":    {"mode": "steady" | "evolve" | "sweep" | "verify" | "enhance",
                 ...mode-specific keys...},
      "output": {"path": "out.csv", "format": "csv", "plot": false}
    }

``rabi``, ``detuning`` and ``gamma`` accept a scalar (broadcast to all
qubits) or a list with one entry per qubit. All system values are given
in absolute units and divided through by the first drive amplitude, so
reported quantities are in units of rabi[1] (times are multiplied by it).

Exit codes: 0 success, 1 verify-mode deviation beyond tolerance,
2 config error, 3 solver error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any, Sequence

import jsonschema
import numpy as np

from . import __version__
from .analytic import steady_state_2q
from .dynamics import (
    NonUniqueSteadyStateError,
    SolveFailedError,
    StepUnderflowError,
    evolve,
    steady_state,
)
from .linalg import NotHermitianError, NotPSDError
from .model import ChainParams, build_liouvillian, ground_state, validate_regime
from .sweep import (
    MeasureRecord,
    NoSignChangeError,
    SweepSpec,
    apply_parameter,
    array_enhancement,
    evaluate_measure,
    make_grid,
    run_sweep,
    validate_measures,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

MODES = ("steady", "evolve", "sweep", "verify", "enhance")
FAMILY_PARAMETERS = ("gamma_all", "nbar", "j")

_SOLVER_ERRORS = (NonUniqueSteadyStateError, SolveFailedError, StepUnderflowError,
                  NoSignChangeError, NotPSDError, NotHermitianError)


class SchemaError(ValueError):
    """Configuration rejected; the message names the offending key."""


_NUMBER = {"type": "number"}
_SCALAR_OR_LIST = {"anyOf": [{"type": "number"},
                             {"type": "array", "items": {"type": "number"}, "minItems": 1}]}
_GRID = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "min": _NUMBER,
        "max": _NUMBER,
        "points": {"type": "integer", "minimum": 2},
        "scale": {"enum": ["linear", "log"]},
    },
}
_FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["parameter", "values"],
    "properties": {
        "parameter": {"enum": list(FAMILY_PARAMETERS)},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
}
_MEASURES = {"type": "array", "items": {"type": "string"}, "minItems": 1}

_TOP_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "run", "output"],
    "properties": {
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_qubits", "gamma"],
            "properties": {
                "n_qubits": {"type": "integer", "minimum": 1},
                "rabi": _SCALAR_OR_LIST,
                "detuning": _SCALAR_OR_LIST,
                "j": _NUMBER,
                "gamma": _SCALAR_OR_LIST,
                "nbar": {"type": "number", "minimum": 0},
                "omega_scale": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "run": {
            "type": "object",
            "required": ["mode"],
            "properties": {"mode": {"enum": list(MODES)}},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "required": ["path"],
            "properties": {
                "path": {"type": "string", "minLength": 1},
                "format": {"enum": ["csv"]},
                "plot": {"type": "boolean"},
            },
        },
    },
}

_RUN_SCHEMAS = {
    "steady": {"type": "object", "additionalProperties": False,
               "properties": {"mode": {}}},
    "evolve": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "mode": {},
            "t_grid": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "t_max": {"type": "number", "exclusiveMinimum": 0},
            "points": {"type": "integer", "minimum": 2},
            "measures": _MEASURES,
            "family": _FAMILY,
        },
        "required": ["measures"],
    },
    "sweep": {
        "type": "object",
        "additionalProperties": False,
        "required": ["parameter", "grid", "measures"],
        "properties": {
            "mode": {},
            "parameter": {"enum": ["gamma_all", "nbar", "j", "n_qubits"]},
            "grid": _GRID,
            "measures": _MEASURES,
            "family": _FAMILY,
        },
    },
    "verify": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "mode": {},
            "grid": _GRID,
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "enhance": {
        "type": "object",
        "additionalProperties": False,
        "required": ["n_list", "gamma"],
        "properties": {
            "mode": {},
            "n_list": {"type": "array", "items": {"type": "integer", "minimum": 1},
                       "minItems": 1},
            "gamma": {
                "type": "object",
                "additionalProperties": False,
                "required": ["min", "max"],
                "properties": {"min": _NUMBER, "max": _NUMBER},
            },
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
    },
}


@dataclass
class JobConfig:
    """Validated, normalized job description."""

    raw: dict                 # the user's config, for the metadata header
    system: ChainParams       # in units of rabi[1]
    omega_scale: float | None
    mode: str
    run: dict
    out_path: str
    out_format: str
    plot: bool


def _schema_error(exc: jsonschema.ValidationError) -> SchemaError:
    path = ".".join(str(p) for p in exc.absolute_path) or "(top level)"
    return SchemaError(f"{path}: {exc.message}")


def _broadcast(value, n: int, key: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * n
    if len(value) != n:
        raise SchemaError(f"system.{key}: expected n_qubits={n} entries, got {len(value)}")
    return tuple(float(v) for v in value)


def parse_config(text: str, overrides: Sequence[str] = ()) -> JobConfig:
    """Parse and validate a JSON job config; apply --set overrides first.

    Raises SchemaError with the offending key path on any problem.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    for item in overrides:
        raw = _apply_override(raw, item)
    try:
        jsonschema.validate(raw, _TOP_SCHEMA)
        mode = raw["run"]["mode"]
        jsonschema.validate(raw["run"], _RUN_SCHEMAS[mode])
    except jsonschema.ValidationError as exc:
        raise _schema_error(exc) from None

    system = dict(raw["system"])
    n = system["n_qubits"]
    rabi = _broadcast(system.get("rabi", 1.0), n, "rabi")
    detuning = _broadcast(system.get("detuning", 0.0), n, "detuning")
    gamma = _broadcast(system["gamma"], n, "gamma")
    coupling = float(system.get("j", 0.0))
    nbar = float(system.get("nbar", 0.0))
    omega1 = rabi[0]
    if omega1 <= 0:
        raise SchemaError("system.rabi: the first drive amplitude must be > 0")
    # Everything downstream works in units of the first drive amplitude.
    params = ChainParams(
        n_qubits=n,
        rabi=tuple(v / omega1 for v in rabi),
        detuning=tuple(v / omega1 for v in detuning),
        coupling=coupling / omega1,
        gamma=tuple(v / omega1 for v in gamma),
        nbar=nbar,
    )
    omega_scale = system.get("omega_scale")
    if omega_scale is not None:
        omega_scale = float(omega_scale) / omega1

    run = dict(raw["run"])
    _validate_run_block(run, params, omega1)
    output = dict(raw["output"])
    return JobConfig(
        raw=raw,
        system=params,
        omega_scale=omega_scale,
        mode=run["mode"],
        run=run,
        out_path=output["path"],
        out_format=output.get("format", "csv"),
        plot=bool(output.get("plot", False)),
    )


def _apply_override(raw: Any, item: str) -> Any:
    if "=" not in item:
        raise SchemaError(f"--set expects key.path=value, got {item!r}")
    path, _, literal = item.partition("=")
    keys = path.split(".")
    try:
        value = json.loads(literal)
    except json.JSONDecodeError:
        value = literal
    node = raw
    for key in keys[:-1]:
        if not isinstance(node, dict):
            raise SchemaError(f"--set {path}: {key} is not an object")
        node = node.setdefault(key, {})
    if not isinstance(node, dict):
        raise SchemaError(f"--set {path}: parent is not an object")
    node[keys[-1]] = value
    return raw


def _resolve_grid(block: dict, key_path: str) -> tuple[float, ...]:
    if "values" in block:
        extras = set(block) - {"values"}
        if extras:
            raise SchemaError(f"{key_path}: 'values' cannot be combined with {sorted(extras)}")
        values = tuple(float(v) for v in block["values"])
        if any(b <= a for a, b in zip(values, values[1:])):
            raise SchemaError(f"{key_path}.values: must be strictly increasing")
        return values
    missing = {"min", "max", "points"} - set(block)
    if missing:
        raise SchemaError(f"{key_path}: missing {sorted(missing)}")
    try:
        return make_grid(block["min"], block["max"], block["points"],
                         block.get("scale", "linear"))
    except ValueError as exc:
        raise SchemaError(f"{key_path}: {exc}") from None


def _validate_run_block(run: dict, params: ChainParams, omega1: float) -> None:
    mode = run["mode"]
    if mode == "evolve":
        if ("t_grid" in run) == ("t_max" in run):
            raise SchemaError("run: give exactly one of t_grid or t_max (with points)")
        if "t_grid" in run:
            t = tuple(float(v) * omega1 for v in run["t_grid"])
            if t[0] != 0.0 or any(b <= a for a, b in zip(t, t[1:])):
                raise SchemaError("run.t_grid: must start at 0 and be strictly increasing")
        else:
            if "points" not in run:
                raise SchemaError("run.points: required with t_max")
            t = tuple(np.linspace(0.0, float(run["t_max"]) * omega1, run["points"]))
        run["_t_grid"] = t
        try:
            validate_measures(run["measures"], params.n_qubits)
        except ValueError as exc:
            raise SchemaError(f"run.measures: {exc}") from None
    elif mode == "sweep":
        grid = _resolve_grid(run["grid"], "run.grid")
        if run["parameter"] in ("gamma_all", "j"):
            grid = tuple(v / omega1 for v in grid)
        run["_grid"] = grid
        try:
            SweepSpec(params, run["parameter"], grid, tuple(run["measures"]))
        except ValueError as exc:
            raise SchemaError(f"run: {exc}") from None
    elif mode == "verify":
        if params.n_qubits != 2:
            raise SchemaError("run: verify mode requires system.n_qubits = 2")
        if any(d != 0.0 for d in params.detuning):
            raise SchemaError("run: verify mode requires zero detuning")
        if params.nbar != 0.0:
            raise SchemaError("run: verify mode requires nbar = 0")
        if params.coupling <= 0.0:
            raise SchemaError("run: verify mode requires system.j > 0")
        block = run.get("grid", {"min": 0.05, "max": 4.0, "points": 50})
        run["_grid"] = _resolve_grid(block, "run.grid")
        if run["_grid"][0] <= 0:
            raise SchemaError("run.grid: verify requires r > 0 (the undamped point "
                              "has no unique steady state)")
        run.setdefault("tol", 1e-9)
    elif mode == "enhance":
        if not params.is_uniform():
            raise SchemaError("run: enhance mode requires uniform per-qubit parameters")
        gi = run["gamma"]
        if not gi["min"] < gi["max"]:
            raise SchemaError("run.gamma: requires min < max")
        run["_interval"] = (gi["min"] / omega1, gi["max"] / omega1)
        run.setdefault("tol", 1e-4)
    if mode in ("evolve", "sweep") and "family" in run:
        fam = run["family"]
        if mode == "sweep" and fam["parameter"] == run["parameter"]:
            raise SchemaError("run.family: family parameter equals the sweep parameter")
        values = tuple(float(v) for v in fam["values"])
        if fam["parameter"] in ("gamma_all", "j"):
            values = tuple(v / omega1 for v in values)
        run["_family"] = (fam["parameter"], values)


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write_csv(path: str, meta: list[str], header: list[str],
               rows: list) -> None:
    """Atomic CSV write: temp file in the target directory, then rename.

    ``rows`` may mix value lists and '#'-prefixed comment strings.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".srq-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for line in meta:
                fh.write(f"# {line}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                if isinstance(row, str):
                    fh.write(f"# {row}\n")
                else:
                    fh.write(",".join(_format_value(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path: str) -> tuple[list[str], list[list[float]]]:
    """Read back a CSV written by this tool: header plus float rows."""
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header row found")
    return header, rows


def _meta_lines(cfg: JobConfig, reproducible: bool) -> list[str]:
    lines = [f"srq {__version__}"]
    if not reproducible:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        lines.append(f"created: {stamp}")
    lines.append("config: " + json.dumps(cfg.raw, sort_keys=True, separators=(",", ":")))
    return lines


def _plot_path(out_path: str) -> str:
    root, _ = os.path.splitext(out_path)
    return root + ".png"


def _family_runs(cfg: JobConfig):
    """(column name or None, list of (family value or None, params))."""
    fam = cfg.run.get("_family")
    if fam is None:
        return None, [(None, cfg.system)]
    name, values = fam
    return name, [(v, apply_parameter(cfg.system, name, v)) for v in values]


def _run_steady(cfg: JobConfig, reproducible: bool, plot: bool) -> int:
    rho = steady_state(build_liouvillian(cfg.system))
    header = ["row", "col", "real", "imag"]
    rows = [[i, j, rho[i, j].real, rho[i, j].imag]
            for i in range(rho.shape[0]) for j in range(rho.shape[1])]
    _write_csv(cfg.out_path, _meta_lines(cfg, reproducible), header, rows)
    if plot:
        from . import plotting
        plotting.save_matrix(_plot_path(cfg.out_path), rho, title="steady state |rho|")
    return EXIT_OK


def _run_evolve(cfg: JobConfig, reproducible: bool, plot: bool) -> int:
    t = np.asarray(cfg.run["_t_grid"])
    measures = list(cfg.run["measures"])
    fam_name, runs = _family_runs(cfg)
    header = ([fam_name] if fam_name else []) + ["t"] + measures
    rows = []
    plot_series: dict[str, np.ndarray] = {}
    for fam_value, params in runs:
        traj = evolve(ground_state(params.n_qubits), build_liouvillian(params), t)
        table = {m: np.array([evaluate_measure(m, s) for s in traj.states])
                 for m in measures}
        traj.series = table
        for idx in range(t.size):
            prefix = [fam_value] if fam_name else []
            rows.append(prefix + [t[idx]] + [table[m][idx] for m in measures])
        for m in measures:
            label = m if fam_value is None else f"{m} [{fam_name}={fam_value:g}]"
            plot_series[label] = table[m]
    _write_csv(cfg.out_path, _meta_lines(cfg, reproducible), header, rows)
    if plot:
        from . import plotting
        plotting.save_xy(_plot_path(cfg.out_path), t, plot_series, xlabel="t")
    return EXIT_OK


def _record_rows(records: list[MeasureRecord], measures: list[str], prefix: list) -> list:
    rows = []
    for rec in records:
        if rec.error is not None:
            rows.append(f"failed at {_format_value(rec.parameter_value)}: {rec.error}")
            rows.append(prefix + [rec.parameter_value] + [float("nan")] * len(measures))
        else:
            rows.append(prefix + [rec.parameter_value] + [rec.values[m] for m in measures])
    return rows


def _run_sweep(cfg: JobConfig, reproducible: bool, plot: bool) -> int:
    measures = list(cfg.run["measures"])
    grid = cfg.run["_grid"]
    fam_name, runs = _family_runs(cfg)
    header = ([fam_name] if fam_name else []) + [cfg.run["parameter"]] + measures
    rows = []
    plot_series: dict[str, np.ndarray] = {}
    for fam_value, params in runs:
        spec = SweepSpec(params, cfg.run["parameter"], grid, tuple(measures))
        records = run_sweep(spec)
        rows.extend(_record_rows(records, measures, [fam_value] if fam_name else []))
        for m in measures:
            label = m if fam_value is None else f"{m} [{fam_name}={fam_value:g}]"
            plot_series[label] = np.array(
                [r.values.get(m, float("nan")) for r in records])
    _write_csv(cfg.out_path, _meta_lines(cfg, reproducible), header, rows)
    if plot:
        from . import plotting
        plotting.save_xy(_plot_path(cfg.out_path), np.asarray(grid), plot_series,
                         xlabel=cfg.run["parameter"])
    return EXIT_OK


def _run_verify(cfg: JobConfig, reproducible: bool, plot: bool) -> int:
    s = cfg.system.coupling
    tol = cfg.run["tol"]
    devs = []
    for r in cfg.run["_grid"]:
        params = apply_parameter(cfg.system, "gamma_all", r)
        numeric = steady_state(build_liouvillian(params))
        devs.append(float(np.max(np.abs(numeric - steady_state_2q(r, s)))))
    header = ["r", "max_abs_deviation"]
    rows = [[r, d] for r, d in zip(cfg.run["_grid"], devs)]
    _write_csv(cfg.out_path, _meta_lines(cfg, reproducible), header, rows)
    if plot:
        from . import plotting
        plotting.save_xy(_plot_path(cfg.out_path), np.asarray(cfg.run["_grid"]),
                         {"max abs deviation": np.array(devs)}, xlabel="r",
                         logy=True, title="numeric vs closed form")
    worst = max(devs)
    if worst >= tol:
        print(f"srq: verify failed: worst deviation {worst:.3e} >= tol {tol:.1e}",
              file=sys.stderr)
        return EXIT_VERIFY_FAIL
    return EXIT_OK


def _run_enhance(cfg: JobConfig, reproducible: bool, plot: bool) -> int:
    rows_data = array_enhancement(cfg.run["n_list"], cfg.system,
                                  cfg.run["_interval"], tol=cfg.run["tol"])
    header = ["n_qubits", "peak_gamma", "peak_value", "interior"]
    rows = [[r.n_qubits, r.peak_gamma, r.peak_value, int(r.interior)] for r in rows_data]
    _write_csv(cfg.out_path, _meta_lines(cfg, reproducible), header, rows)
    if plot:
        from . import plotting
        plotting.save_enhancement(_plot_path(cfg.out_path),
                                  [r.n_qubits for r in rows_data],
                                  [r.peak_gamma for r in rows_data],
                                  [r.peak_value for r in rows_data])
    return EXIT_OK


_RUNNERS = {
    "steady": _run_steady,
    "evolve": _run_evolve,
    "sweep": _run_sweep,
    "verify": _run_verify,
    "enhance": _run_enhance,
}


def run_job(cfg: JobConfig, reproducible: bool = False, plot: bool = False) -> int:
    """Execute a validated job; returns the process exit code."""
    if cfg.omega_scale is not None:
        for warning in validate_regime(cfg.system, cfg.omega_scale):
            print(f"srq: warning: {warning}", file=sys.stderr)
    return _RUNNERS[cfg.mode](cfg, reproducible, plot or cfg.plot)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srq",
        description="Steady states, dynamics and noise-response sweeps "
                    "of driven dissipative qubit chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"execute the {mode} run mode")
        p.add_argument("--config", required=True, help="path to a JSON job config")
        p.add_argument("--set", action="append", default=[], metavar="KEY.PATH=VALUE",
                       help="override a config value (JSON literal or string)")
        p.add_argument("--out", help="override output.path")
        p.add_argument("--reproducible", action="store_true",
                       help="omit the timestamp line so identical configs give "
                            "byte-identical files")
        p.add_argument("--plot", action="store_true",
                       help="also render a PNG figure next to the CSV")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = open(args.config, encoding="utf-8").read()
    except OSError as exc:
        print(f"srq: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text, args.set)
        if cfg.mode != args.command:
            raise SchemaError(
                f"run.mode is {cfg.mode!r} but the {args.command!r} subcommand was used")
        if args.out:
            cfg.out_path = args.out
    except SchemaError as exc:
        print(f"srq: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run_job(cfg, reproducible=args.reproducible, plot=args.plot)
    except _SOLVER_ERRORS as exc:
        print(f"srq: solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"srq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
