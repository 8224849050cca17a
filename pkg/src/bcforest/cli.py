"""Command-line interface.

Subcommands::

    bcforest simulate        bias/variance comparison on simulated data
    bcforest cv              k-fold CV benchmark on a CSV dataset
    bcforest figure          per-grid-point quantile bands, one CSV per m
    bcforest check-variance  Monte-Carlo variance of the correction vs B_o

Machine-readable results go to stdout; progress lines go to stderr.
Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.  Reruns of the same command are byte-identical on
stdout and in every file written.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .data import load_csv
from .ensemble import ResampleScheme, fit_ensemble, resolve_jobs
from .errors import BcforestError, ConfigError, IngestionError, UsageError
from .experiments import (
    config_comment,
    default_grid,
    emit_figure_data,
    json_dumps,
    run_bias_experiment,
    run_classification_experiment,
    run_cv,
    variance_scaling_check,
    write_csv,
    write_json,
    write_report,
)
from .rng import ROLE_DATA, ROLE_TEST, RngSpec, derive_stream
from .simdata import SimModel, draw_inputs, generate
from .tree import SplitParams, rf_mtry

DEFAULT_SEED = 1729


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit on bad usage."""

    def error(self, message: str):
        raise ConfigError(message)


def _progress(msg: str) -> None:
    print(f"progress: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# option tables: dest -> (converter, default, repeatable)

def _conv_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


def _conv_int(v: str) -> int:
    try:
        return int(v)
    except ValueError:
        raise ConfigError(f"expected an integer, got {v!r}") from None


def _conv_opt_int(v: str) -> int | None:
    if v.strip().lower() in ("", "none"):
        return None
    return _conv_int(v)


def _conv_float(v: str) -> float:
    try:
        return float(v)
    except ValueError:
        raise ConfigError(f"expected a number, got {v!r}") from None


def _conv_choice(*choices: str):
    def conv(v: str) -> str:
        if v not in choices:
            raise ConfigError(f"expected one of {choices}, got {v!r}")
        return v
    return conv


_TREE_OPTS = {
    "type": (_conv_choice("bt", "rf"), None, False),
    "min_leaf": (_conv_int, 5, False),
    "mtry": (_conv_opt_int, None, False),
    "max_depth": (_conv_opt_int, None, False),
}

_COMMON_OPTS = {
    "seed": (_conv_int, DEFAULT_SEED, False),
    "threads": (_conv_int, 1, False),
    "out": (str, None, False),
}

OPTIONS: dict[str, dict] = {
    "simulate": {
        "model": (str, None, False),
        "n": (_conv_int, None, False),
        "B": (_conv_int, None, False),
        "Bo": (_conv_int, None, False),
        "m": (_conv_int, None, False),
        "replacement": (_conv_choice("auto", "yes", "no"), "auto", False),
        "reps": (_conv_int, 20, False),
        "n_test": (_conv_int, 100, False),
        "noise_sd": (_conv_float, 0.1, False),
        "noisy_test": (_conv_bool, False, False),
        "center": (_conv_bool, False, False),
        **_TREE_OPTS,
        **_COMMON_OPTS,
    },
    "cv": {
        "data": (str, None, False),
        "target": (str, None, False),
        "drop": (str, None, True),
        "missing": (str, None, True),
        "no_header": (_conv_bool, False, False),
        "k": (_conv_int, 10, False),
        "B": (_conv_int, 100, False),
        "Bo": (_conv_int, None, False),
        "m": (_conv_int, None, False),
        "replacement": (_conv_choice("auto", "yes", "no"), "auto", False),
        "fold_mode": (_conv_choice("contiguous", "shuffle"), "contiguous", False),
        "fold_seed": (_conv_opt_int, None, False),
        "center": (_conv_bool, False, False),
        **_TREE_OPTS,
        # the benchmark protocol compares random forests, so rf is the default
        "type": (_conv_choice("bt", "rf"), "rf", False),
        **_COMMON_OPTS,
    },
    "figure": {
        "model": (str, None, False),
        "n": (_conv_int, 1000, False),
        "B": (_conv_int, 1000, False),
        "Bo": (_conv_int, None, False),
        "m": (_conv_int, None, True),
        "reps": (_conv_int, 100, False),
        "grid_size": (_conv_int, 200, False),
        "noise_sd": (_conv_float, 0.1, False),
        "center": (_conv_bool, False, False),
        **_TREE_OPTS,
        **_COMMON_OPTS,
        "out": (str, "figure", False),
    },
    "check-variance": {
        "model": (str, "quad1d", False),
        "n": (_conv_int, 200, False),
        "B": (_conv_int, 50, False),
        "Bo": (_conv_int, None, True),
        "repeats": (_conv_int, 50, False),
        "n_points": (_conv_int, 20, False),
        "m": (_conv_int, None, False),
        "replacement": (_conv_choice("auto", "yes", "no"), "auto", False),
        "noise_sd": (_conv_float, 0.1, False),
        "center": (_conv_bool, False, False),
        **_TREE_OPTS,
        **_COMMON_OPTS,
    },
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "simulate": ("model", "n", "B"),
    "cv": ("data", "target"),
    "figure": ("model", "m"),
    "check-variance": (),
}


def build_parser() -> _Parser:
    parser = _Parser(prog="bcforest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", metavar="COMMAND")

    def add(name: str, help_text: str) -> _Parser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None,
                       help="key=value file; explicit flags take precedence")
        for dest, (_conv, _default, repeatable) in OPTIONS[name].items():
            flag = "--" + dest.replace("_", "-")
            kwargs: dict = {"dest": dest, "default": None}
            if dest in ("noisy_test", "center", "no_header"):
                kwargs.update(action="store_const", const=True)
            else:
                kwargs["type"] = str
                if repeatable:
                    kwargs["action"] = "append"
            p.add_argument(flag, **kwargs)
        return p

    add("simulate", "compare corrected vs base predictors on simulated data")
    add("cv", "k-fold cross-validation benchmark on a CSV file")
    add("figure", "prediction quantile bands over a 1-d grid")
    add("check-variance", "variance of the corrected predictor vs B_o")
    return parser


def load_config_file(path: str) -> list[tuple[str, str]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    entries: list[tuple[str, str]] = []
    for i, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {i + 1} is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        entries.append((key.strip().replace("-", "_"), value.strip()))
    return entries


def resolve_options(cmd: str, args: argparse.Namespace) -> dict:
    table = OPTIONS[cmd]
    resolved = {dest: default for dest, (_c, default, _r) in table.items()}
    if getattr(args, "config", None):
        for key, raw in load_config_file(args.config):
            if key not in table:
                raise ConfigError(f"unknown config key {key!r} for {cmd}")
            conv, _default, repeatable = table[key]
            value = conv(raw)
            if repeatable:
                prior = resolved[key]
                resolved[key] = (prior or []) + [value]
            else:
                resolved[key] = value
    for dest, (conv, _default, repeatable) in table.items():
        cli_value = getattr(args, dest)
        if cli_value is None:
            continue
        if dest in ("noisy_test", "center", "no_header"):
            resolved[dest] = True
        elif repeatable:
            resolved[dest] = [conv(v) for v in cli_value]
        else:
            resolved[dest] = conv(cli_value)
    for dest in REQUIRED[cmd]:
        if resolved[dest] is None:
            flag = "--" + dest.replace("_", "-")
            raise ConfigError(f"missing required option {flag}")
    return resolved


# ---------------------------------------------------------------------------
# shared resolution helpers

def _split_params(opts: dict, p: int) -> SplitParams:
    mtry = opts["mtry"]
    if mtry is None and opts["type"] == "rf":
        mtry = rf_mtry(p)
    return SplitParams(min_leaf=opts["min_leaf"], mtry=mtry, max_depth=opts["max_depth"])


def _scheme(opts: dict, n: int) -> ResampleScheme:
    m = opts["m"] if opts["m"] is not None else n
    mode = opts["replacement"]
    replacement = m >= n if mode == "auto" else mode == "yes"
    return ResampleScheme(int(m), replacement)


def _b_o(opts: dict) -> int:
    return opts["Bo"] if opts["Bo"] is not None else 2 * opts["B"]


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(opts: dict) -> None:
    model = SimModel(opts["model"], noise_sd=opts["noise_sd"])
    if model.classification and (opts["noisy_test"] or opts["center"]):
        raise UsageError("--noisy-test/--center apply to regression kinds only")
    spec = RngSpec(opts["seed"])
    scheme = _scheme(opts, opts["n"])
    params = _split_params(opts, model.dim)
    n_jobs = resolve_jobs(opts["threads"])
    runner = run_classification_experiment if model.classification else run_bias_experiment
    kwargs = {} if model.classification else {
        "noisy_test": opts["noisy_test"], "center": opts["center"],
    }
    _progress(f"simulate: {opts['reps']} replications of {model.kind}")
    report = runner(
        model, opts["n"], opts["B"], _b_o(opts), scheme, params,
        opts["reps"], opts["n_test"], spec, n_jobs=n_jobs, **kwargs,
    )
    if opts["out"]:
        csv_path, json_path = write_report(report, opts["out"])
        _progress(f"wrote {csv_path} and {json_path}")
    sys.stdout.write(json_dumps(report.summary()) + "\n")


def _load_cv_data(opts: dict):
    markers = tuple(opts["missing"]) if opts["missing"] else ("",)
    return load_csv(
        opts["data"], opts["target"],
        header=not opts["no_header"],
        drop=tuple(opts["drop"] or ()),
        missing_markers=markers,
    )


def cmd_cv(opts: dict) -> None:
    data = _load_cv_data(opts)
    if data.dropped_rows:
        _progress(f"dropped {data.dropped_rows} rows with missing cells")
    params = _split_params(opts, data.p)
    scheme = None
    if opts["m"] is not None:
        n_retained = opts["k"] * (data.n // opts["k"])
        train_size = n_retained - data.n // opts["k"]
        scheme = _scheme(opts, train_size)
    spec = RngSpec(opts["seed"])
    _progress(f"cv: {opts['k']} folds over {data.n} rows")
    result = run_cv(
        data, opts["k"], opts["B"], _b_o(opts), scheme, params, spec,
        fold_mode=opts["fold_mode"], fold_seed=opts["fold_seed"],
        center=opts["center"], n_jobs=resolve_jobs(opts["threads"]),
    )
    result.config["data"] = opts["data"]
    result.config["target"] = opts["target"]
    result.config["dropped_rows"] = data.dropped_rows
    names = ["var_y", "rf_err", "rfc_err", "rf_imp", "rfc_imp"]
    cols = [[getattr(result, name)] for name in names]
    if opts["out"]:
        write_csv(opts["out"] + ".csv", result.config, names, cols)
        write_json(opts["out"] + ".json", result.summary())
        _progress(f"wrote {opts['out']}.csv and {opts['out']}.json")
    sys.stdout.write(config_comment(result.config) + "\n")
    sys.stdout.write(",".join(names) + "\n")
    sys.stdout.write(",".join(repr(float(c[0])) for c in cols) + "\n")


def cmd_figure(opts: dict) -> None:
    model = SimModel(opts["model"], noise_sd=opts["noise_sd"])
    spec = RngSpec(opts["seed"])
    params = _split_params(opts, model.dim)
    _progress(f"figure: m in {opts['m']}, {opts['reps']} replications each")
    table = emit_figure_data(
        model, opts["n"], opts["B"], _b_o(opts), opts["m"], opts["reps"],
        default_grid(opts["grid_size"]), spec,
        params=params, center=opts["center"], n_jobs=resolve_jobs(opts["threads"]),
    )
    files = []
    for m in table.m_values:
        path = f"{opts['out']}_m{m}.csv"
        names, cols = table.columns_for(m)
        cfg = dict(table.config)
        cfg["m"] = m
        write_csv(path, cfg, names, cols)
        files.append(path)
        _progress(f"wrote {path}")
    sys.stdout.write(json_dumps({"files": files, "config": table.config}) + "\n")


def cmd_check_variance(opts: dict) -> None:
    model = SimModel(opts["model"], noise_sd=opts["noise_sd"])
    spec = RngSpec(opts["seed"])
    scheme = _scheme(opts, opts["n"])
    params = _split_params(opts, model.dim)
    n_jobs = resolve_jobs(opts["threads"])
    b_o_list = opts["Bo"] if opts["Bo"] else [opts["B"], 2 * opts["B"]]
    data = generate(model, opts["n"], derive_stream(spec, 0, role=ROLE_DATA))
    base = fit_ensemble(data, opts["B"], scheme, params, spec, n_jobs=n_jobs)
    points = draw_inputs(model, opts["n_points"], derive_stream(spec, 0, role=ROLE_TEST))
    _progress(f"check-variance: B_o in {b_o_list}, {opts['repeats']} rebuilds each")
    table = variance_scaling_check(
        data, base, b_o_list, opts["repeats"], points, spec,
        center=opts["center"], n_jobs=n_jobs,
    )
    table.config["model"] = model.kind
    table.config["noise_sd"] = model.noise_sd
    ratios = [None] + [
        float(table.mean_variance[i] / table.mean_variance[i - 1])
        if table.mean_variance[i - 1] != 0 else None
        for i in range(1, len(b_o_list))
    ]
    names = ["B_o", "mean_variance", "ratio_to_prev"]
    cols = [list(table.B_o), list(table.mean_variance), ratios]
    if opts["out"]:
        write_csv(opts["out"] + ".csv", table.config, names, cols)
        write_json(opts["out"] + ".json", table.summary())
        _progress(f"wrote {opts['out']}.csv and {opts['out']}.json")
    sys.stdout.write(config_comment(table.config) + "\n")
    sys.stdout.write(",".join(names) + "\n")
    for r in range(len(b_o_list)):
        row = [cols[0][r], cols[1][r], cols[2][r]]
        sys.stdout.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


COMMANDS = {
    "simulate": cmd_simulate,
    "cv": cmd_cv,
    "figure": cmd_figure,
    "check-variance": cmd_check_variance,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cmd is None:
        raise ConfigError("missing subcommand; choose from "
                          + ", ".join(sorted(COMMANDS)))
    opts = resolve_options(args.cmd, args)
    COMMANDS[args.cmd](opts)
    return 0


def run(argv: list[str] | None = None) -> int:
    """Console entry point mapping exceptions to exit codes."""
    try:
        return main(argv)
    except (ConfigError, UsageError) as exc:
        print(f"bcforest: error: {exc}", file=sys.stderr)
        return 1
    except IngestionError as exc:
        print(f"bcforest: data error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return code if isinstance(code, int) else 0
    except BcforestError as exc:
        print(f"bcforest: internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"bcforest: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(run())
