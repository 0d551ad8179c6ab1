"""Command-line driver: run scenarios, compare outputs, print presets.

Exit codes: 0 success, 2 config/schema problem, 3 divergence (partial
CSV still written), 4 numerical failure during the run.
"""

import argparse
import concurrent.futures
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .model import (
    METHODS,
    Scenario,
    ScenarioError,
    dump_scenario,
    load_scenario,
    validate_scenario,
)
from .output import (
    compare_columns,
    read_trajectory_csv,
    write_gnuplot_script,
    write_manifest,
    write_trajectory_csv,
)
from .presets import PRESET_NAMES, preset
from .runner import run_scenario

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_DIVERGED = 3
EXIT_NUMERICAL = 4


def _parse_peaks(text):
    """Parse a peaks JSON string: a list of {Gamma, gamma, omega0} objects."""
    from .model import _parse_peak

    doc = json.loads(text)
    if not isinstance(doc, list) or not doc:
        raise ScenarioError(["peaks: expected a non-empty JSON list"])
    errors: list = []
    peaks = [_parse_peak(p, "peaks[%d]" % i, errors) for i, p in enumerate(doc)]
    if errors:
        raise ScenarioError(errors)
    return peaks


def _resolve_scenario(args) -> tuple:
    """Scenario from --config or --preset plus command-line overrides."""
    if (args.config is None) == (args.preset is None):
        raise ScenarioError(["exactly one of --config or --preset is required"])
    config_path = None
    if args.config is not None:
        config_path = args.config
        sc = load_scenario(args.config)
        if args.method is not None:
            sc = sc.with_overrides(method=args.method)
    else:
        if args.preset not in PRESET_NAMES:
            raise ScenarioError(
                ["unknown preset %r (choose from %s)" % (args.preset, ", ".join(PRESET_NAMES))]
            )
        peaks = _parse_peaks(args.peaks) if args.peaks else None
        sc = preset(args.preset, method=args.method or "lorentzian-low", peaks=peaks)
    over = {}
    if args.dt is not None:
        over["dt"] = args.dt
    if args.t_max is not None:
        over["t_max"] = args.t_max
    if over:
        sc = sc.with_overrides(
            integrator=dataclasses.replace(sc.integrator, **over)
        )
    errors = validate_scenario(sc)
    if errors:
        raise ScenarioError(errors)
    return sc, config_path


def _run_one(sc: Scenario, output, rho_form, deterministic, config_path, gnuplot) -> int:
    traj = run_scenario(sc, rho_form=rho_form, validate=False)
    write_trajectory_csv(output, traj)
    write_manifest(
        str(output) + ".manifest.json", traj, output,
        deterministic=deterministic, config_path=config_path,
    )
    if gnuplot:
        write_gnuplot_script(str(output) + ".gp", output, sc.n_sites)
    if traj.status == "diverged":
        print(
            "diverged: %s (partial output in %s)" % (traj.report.message, output),
            file=sys.stderr,
        )
        return EXIT_DIVERGED
    if traj.status != "completed":
        print("integration failed: %s" % traj.report.message, file=sys.stderr)
        return EXIT_NUMERICAL
    print("%s: %d samples, wall %.2f s" % (output, len(traj.samples), traj.wall_time))
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        sc, config_path = _resolve_scenario(args)
    except (ScenarioError, OSError, json.JSONDecodeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    output = args.output or "%s_%s.csv" % (sc.name or "scenario", sc.method)
    try:
        return _run_one(sc, output, args.rho_form, args.deterministic, config_path, args.gnuplot)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL


def _cmd_sweep(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if not methods or unknown:
        print("sweep: bad method list %r" % (args.methods,), file=sys.stderr)
        return EXIT_SCHEMA
    try:
        base, config_path = _resolve_scenario(args)
    except (ScenarioError, OSError, json.JSONDecodeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    scenarios = [base.with_overrides(method=m) for m in methods]
    for sc in scenarios:
        errors = validate_scenario(sc)
        if errors:
            print("config error: %s" % "; ".join(errors), file=sys.stderr)
            return EXIT_SCHEMA

    def job(sc):
        out = outdir / ("%s_%s.csv" % (sc.name or "scenario", sc.method))
        return _run_one(sc, out, args.rho_form, args.deterministic, config_path, args.gnuplot)

    worst = EXIT_OK
    if args.deterministic or len(scenarios) == 1:
        codes = [job(sc) for sc in scenarios]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=len(scenarios)) as pool:
            codes = list(pool.map(job, scenarios))
    for code in codes:
        worst = max(worst, code)
    return worst


def _cmd_compare(args) -> int:
    try:
        a = read_trajectory_csv(args.csv_a)
        b = read_trajectory_csv(args.csv_b)
        value = compare_columns(a, b, args.column, args.metric, args.interpolate)
    except (OSError, KeyError, ValueError) as exc:
        print("compare error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    print(json.dumps({"column": args.column, "metric": args.metric, "value": value}))
    return EXIT_OK


def _cmd_preset(args) -> int:
    try:
        peaks = _parse_peaks(args.peaks) if args.peaks else None
        sc = preset(args.name, method=args.method or "lorentzian-low", peaks=peaks)
    except (ScenarioError, ValueError, json.JSONDecodeError) as exc:
        print("preset error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    if args.output:
        dump_scenario(sc, args.output)
        print("wrote %s" % args.output)
    else:
        from .model import scenario_to_dict

        json.dump(scenario_to_dict(sc), sys.stdout, indent=2)
        print()
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        sc = load_scenario(args.config)
    except ScenarioError as exc:
        for msg in exc.errors:
            print(msg, file=sys.stderr)
        return EXIT_SCHEMA
    except (OSError, json.JSONDecodeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_SCHEMA
    errors = validate_scenario(sc)
    if errors:
        for msg in errors:
            print(msg, file=sys.stderr)
        return EXIT_SCHEMA
    print("ok: %s (%s, %d sites)" % (args.config, sc.method, sc.n_sites))
    return EXIT_OK


def _add_scenario_args(p):
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--preset", help="built-in scenario name (%s)" % ", ".join(PRESET_NAMES))
    p.add_argument("--method", help="override the scenario method")
    p.add_argument("--dt", type=float, help="override the integrator step")
    p.add_argument("--t-max", type=float, help="override the final time")
    p.add_argument("--peaks", help="JSON list of bath peaks (required by ring-15)")
    p.add_argument(
        "--rho-form", choices=("positive", "trace"), default="positive",
        help="density-matrix reconstruction (default: positive)",
    )
    p.add_argument(
        "--deterministic", action="store_true",
        help="force sequential, reproducible execution",
    )
    p.add_argument("--gnuplot", action="store_true", help="also emit a gnuplot script")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roasim",
        description="Open-system dynamics via reduced operator blocks and a Lindblad reference.",
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write a CSV")
    _add_scenario_args(p_run)
    p_run.add_argument("--output", help="CSV path (default: <name>_<method>.csv)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run several methods on one scenario")
    _add_scenario_args(p_sweep)
    p_sweep.add_argument("--methods", required=True, help="comma-separated method list")
    p_sweep.add_argument("--output-dir", default=".", help="directory for the CSVs")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cmp = sub.add_parser("compare", help="difference of one column of two CSVs")
    p_cmp.add_argument("csv_a")
    p_cmp.add_argument("csv_b")
    p_cmp.add_argument("--column", default="rho_0_0_re")
    p_cmp.add_argument("--metric", choices=("rms", "max"), default="rms")
    p_cmp.add_argument("--interpolate", action="store_true",
                       help="interpolate the second file onto the first grid")
    p_cmp.set_defaults(func=_cmd_compare)

    p_pre = sub.add_parser("preset", help="print or save a built-in scenario")
    p_pre.add_argument("name")
    p_pre.add_argument("--method", help="method recorded in the scenario")
    p_pre.add_argument("--peaks", help="JSON list of bath peaks (required by ring-15)")
    p_pre.add_argument("--output", help="write JSON here instead of stdout")
    p_pre.set_defaults(func=_cmd_preset)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
