"""Command-line interface: run scenarios, compare strategies, list presets.

Exit codes: 0 on success, 1 on a validation error, 2 when a solve stops
unconverged (artifacts are still written).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .scenarios import (
    OUT_DIR_ENV,
    ComparisonIncompatibleError,
    ScenarioValidationError,
    compare,
    load_scenario,
    presets,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epicontrol",
        description=(
            "Optimal vaccination/treatment/education schedules for scaled "
            "SIR and SEIR epidemics, via forward-backward sweep."
        ),
        epilog=f"The {OUT_DIR_ENV} environment variable sets the default output root.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="solve one scenario and write CSV artifacts")
    run_p.add_argument("scenario", help="scenario file path or preset name")
    run_p.add_argument("--out", help="output directory (overrides the scenario's own)")
    run_p.add_argument(
        "--no-plots", action="store_true", help="skip emitting the plotting script"
    )

    cmp_p = sub.add_parser(
        "compare", help="run several scenarios on one grid and print a summary table"
    )
    cmp_p.add_argument("scenarios", nargs="+", help="scenario files or preset names")
    cmp_p.add_argument("--out", help="root directory for the per-scenario artifacts")

    sub.add_parser("presets", help="list built-in scenario presets")
    return parser


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _print_table(rows: list[dict]) -> None:
    columns = list(rows[0])
    cells = [[_fmt(row[c]) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[k]) for r in cells)) for k, c in enumerate(columns)]
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.out:
        scenario = replace(scenario, out_dir=args.out)
    if args.no_plots:
        scenario = replace(scenario, emit_plots=False)
    artifacts = run(scenario)
    summary = artifacts.summary
    print(f"wrote {artifacts.out_dir}")
    for key in (
        "strategy",
        "converged",
        "iterations",
        "objective",
        "peak_infected",
        "peak_time",
        "final_recovered",
    ):
        print(f"  {key} = {_fmt(summary[key])}")
    if summary.get("baseline_peak_infected") is not None:
        print(f"  baseline_peak_infected = {_fmt(summary['baseline_peak_infected'])}")
        print(f"  baseline_objective = {_fmt(summary['baseline_objective'])}")
    return 0 if summary["converged"] else 2


def _cmd_compare(args) -> int:
    scenarios = [load_scenario(name) for name in args.scenarios]
    rows = compare(scenarios, out_root=args.out)
    _print_table(rows)
    return 0 if all(row["converged"] for row in rows) else 2


def _cmd_presets() -> int:
    for name, scenario in presets().items():
        print(f"{name}: {scenario.strategy.value}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_presets()
    except (ScenarioValidationError, ComparisonIncompatibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
