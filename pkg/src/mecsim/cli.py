"""Command-line front end: single runs, sweeps, oracle checks.

Exit codes: 0 success, 1 oracle gap above tolerance, 2 missing file,
3 config/schema error, 4 unknown scheduler, 5 brute-force guard rail.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .config import (
    ConfigError,
    UnknownSchedulerError,
    load_raw,
    load_scenario,
    load_sweep,
    scenario_with,
)
from .scheduler import GuardRailError, total_accepted_energy
from .simulator import generate_workload, simulate

EXIT_OK = 0
EXIT_GAP = 1
EXIT_MISSING = 2
EXIT_CONFIG = 3
EXIT_SCHEDULER = 4
EXIT_GUARD = 5

ORACLE_GAP_TOLERANCE = 0.02


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if getattr(args, "scheduler", None) is not None:
        out["scheduler"] = args.scheduler
    return out


def _run_scenario(scenario):
    tasks = generate_workload(scenario.workload)
    return simulate(
        scenario.topology,
        tasks,
        scenario.scheduler,
        epoch_s=scenario.epoch_s,
        freq_optimizer=scenario.freq_optimizer,
        quantile=scenario.quantile,
    )


def cmd_run(args) -> int:
    scenario = load_scenario(args.config, _overrides(args))
    result = _run_scenario(scenario)
    row = report.run_row(result.metrics, scenario.scheduler, scenario.workload.seed)
    text = report.format_csv([row], report.RUN_COLUMNS)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_sweep(args.config)
    base = load_raw(spec.base)
    rows = []
    for value in spec.values:
        for seed in spec.seeds:
            for scheduler in spec.schedulers:
                overrides = {spec.parameter: value, "seed": seed, "scheduler": scheduler}
                try:
                    scenario = scenario_with(base, overrides)
                    result = _run_scenario(scenario)
                except Exception as exc:
                    raise ConfigError(
                        f"sweep point (value={value}, seed={seed}, "
                        f"scheduler={scheduler}) failed: {exc}"
                    ) from exc
                rows.append(report.sweep_row(result.metrics, value, seed, scheduler))

    out = Path(args.out)
    out.write_text(report.format_csv(rows, report.SWEEP_COLUMNS))
    print(f"wrote {len(rows)} rows to {out}")
    if args.emit_plot:
        for figure in report.render_sweep_figures(rows, out):
            print(f"wrote {figure}")
        print(f"wrote {report.write_plot_script(out)}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    scenario = load_scenario(args.config, _overrides(args))
    result_opt = _run_scenario(scenario)

    brute_scenario = load_scenario(
        args.config, {**_overrides(args), "scheduler": "brute_force"}
    )
    result_brute = _run_scenario(brute_scenario)

    e_opt = float(total_accepted_energy(result_opt.decisions))
    e_brute = float(total_accepted_energy(result_brute.decisions))
    gap = (e_opt - e_brute) / e_brute if e_brute > 0 else 0.0
    print(f"scheduler total energy: {e_opt!r} J")
    print(f"brute force total energy: {e_brute!r} J")
    print(f"relative gap: {gap!r}")
    if gap > ORACLE_GAP_TOLERANCE:
        print(f"FAIL: gap exceeds {ORACLE_GAP_TOLERANCE:.0%}")
        return EXIT_GAP
    print("OK")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecsim",
        description="Energy-minimal edge/cloud task placement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and print a metrics CSV row")
    run.add_argument("--config", required=True, help="scenario file or bundled name")
    run.add_argument("--seed", type=int, help="override the workload seed")
    run.add_argument("--scheduler", help="override the scheduler")
    run.add_argument("--out", help="write the CSV to a file instead of stdout")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a parameter sweep into a CSV")
    sweep.add_argument("--config", required=True, help="sweep file or bundled name")
    sweep.add_argument("--out", default="sweep.csv", help="output CSV path")
    sweep.add_argument(
        "--emit-plot", action="store_true",
        help="also render the sweep figures and a standalone plot script",
    )
    sweep.set_defaults(func=cmd_sweep)

    oracle = sub.add_parser(
        "oracle-check", help="compare the scheduler against the brute-force oracle"
    )
    oracle.add_argument("--config", required=True, help="small-instance scenario")
    oracle.add_argument("--seed", type=int, help="override the workload seed")
    oracle.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except UnknownSchedulerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEDULER
    except GuardRailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
