"""Command-line interface: run scenarios, sweep parameters, print error budgets.

Subcommands
-----------
run    one scenario; writes the per-trial dispersion trace CSV
       (or per-node trajectory CSVs for the fig1/fig2 presets)
sweep  vary one scenario field over a list of values (or a figN preset);
       writes the sweep CSV, plus the theoretical bound CSV for fig7
bound  print the closed-form phase error budget as JSON

Every scenario field can be overridden with a flag of the same name.  Exit
code is 0 on success and 2 on configuration or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import harness
from .analysis import phase_error_budget
from .harness import Scenario, load_config, run_scenario, sweep


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    kinds = {"int": int, "float": float, "str": str}
    for f in fields(Scenario):
        parser.add_argument(f"--{f.name}", type=kinds[f.type], default=None, help=f"override {f.name}")


def _scenario_from_args(args) -> Scenario:
    overrides = {
        f.name: getattr(args, f.name) for f in fields(Scenario) if getattr(args, f.name) is not None
    }
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if args.config:
        return load_config(args.config, overrides)
    return Scenario(**overrides)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def _cmd_run(args) -> int:
    if args.preset:
        if args.preset not in harness.TRAJECTORY_PRESETS:
            raise ValueError(
                f"unknown run preset {args.preset!r}; choose from "
                f"{sorted(harness.TRAJECTORY_PRESETS)}"
            )
        stem = Path(args.out if args.out else f"{args.preset}.csv")
        overrides = {
            f.name: getattr(args, f.name)
            for f in fields(Scenario)
            if f.name != "n_nodes" and getattr(args, f.name) is not None
        }
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        for scenario in harness.TRAJECTORY_PRESETS[args.preset]:
            if overrides:
                scenario = replace(scenario, **overrides)
            traces, _ = run_scenario(scenario, jobs=args.jobs)
            out = stem.with_name(f"{stem.stem}_n{scenario.n_nodes}{stem.suffix}")
            _write(str(out), harness.trajectory_csv_text(traces[0]))
        return 0
    scenario = _scenario_from_args(args)
    traces, record = run_scenario(scenario, jobs=args.jobs)
    if args.out:
        _write(args.out, harness.trace_csv_text(traces))
    summary = {
        "algorithm": scenario.algorithm,
        "trials": record.trials,
        "trials_converged": record.trials_converged,
        "mean_sigma_phi_deg": record.mean_sigma_phi_deg,
        "std_sigma_phi_deg": record.std_sigma_phi_deg,
        "mean_iters": record.mean_iters,
        "mean_lambda2": record.mean_lambda2,
    }
    print(json.dumps(summary, indent=2))
    return 0


def _bound_csv_text(scenario: Scenario, t_values) -> str:
    lines = ["T,sigma_phi_total_deg"]
    for t in t_values:
        point = replace(scenario, T=float(t))
        budget = phase_error_budget(
            point.oscillator_params(),
            point.estimation_params(avg_connections=max(1.0, point.connectivity * (point.n_nodes - 1))),
        )
        lines.append(f"{t:.6g},{math.degrees(budget.sigma_phi_total):.6g}")
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> int:
    if args.preset:
        if args.preset not in harness.SWEEP_PRESETS:
            raise ValueError(
                f"unknown sweep preset {args.preset!r}; choose from {sorted(harness.SWEEP_PRESETS)}"
            )
        scenario, param, values = harness.SWEEP_PRESETS[args.preset]
        overrides = {
            f.name: getattr(args, f.name)
            for f in fields(Scenario)
            if getattr(args, f.name) is not None
        }
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if overrides:
            scenario = replace(scenario, **overrides)
        out = args.out or f"{args.preset}.csv"
    else:
        if not args.param or args.values is None:
            raise ValueError("sweep needs --param and --values (or --preset)")
        scenario = _scenario_from_args(args)
        param, values = args.param, [float(v) for v in args.values.split(",")]
        out = args.out or "sweep.csv"
    records = sweep(scenario, param, values, jobs=args.jobs)
    _write(out, harness.sweep_csv_text(records))
    if args.preset == "fig7":
        bound_path = str(Path(out).with_name(Path(out).stem + "_bound" + Path(out).suffix))
        _write(bound_path, _bound_csv_text(scenario, values))
    return 0


def _cmd_bound(args) -> int:
    scenario = _scenario_from_args(args)
    budget = phase_error_budget(
        scenario.oscillator_params(),
        scenario.estimation_params(
            avg_connections=max(1.0, scenario.connectivity * (scenario.n_nodes - 1))
        ),
        sigma_m_phi_convention=args.sigma_m_phi_convention,
    )
    print(json.dumps(budget.as_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arraysync",
        description="Decentralized frequency/phase synchronization simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--config", help="flat key = value scenario file")
    p_run.add_argument("--seed", type=int, help="override master_seed")
    p_run.add_argument("--out", help="trace CSV output path")
    p_run.add_argument("--preset", help="trajectory preset (fig1, fig2)")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    _add_scenario_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one scenario field")
    p_sweep.add_argument("--config", help="flat key = value scenario file")
    p_sweep.add_argument("--seed", type=int, help="override master_seed")
    p_sweep.add_argument("--param", choices=harness.SWEEPABLE_PARAMS, help="field to sweep")
    p_sweep.add_argument("--values", help="comma-separated list of values")
    p_sweep.add_argument("--preset", help="figure preset (fig3..fig8)")
    p_sweep.add_argument("--out", help="sweep CSV output path")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    _add_scenario_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_bound = sub.add_parser("bound", help="print the phase error budget as JSON")
    p_bound.add_argument("--config", help="flat key = value scenario file")
    p_bound.add_argument("--seed", type=int, help="override master_seed")
    p_bound.add_argument(
        "--sigma_m_phi_convention",
        choices=("hz", "carrier"),
        default="hz",
        help="unit convention for the frequency-estimation phase term",
    )
    _add_scenario_flags(p_bound)
    p_bound.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
