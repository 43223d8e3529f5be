"""Command line front end.

Subcommands:
  run               integrate a scenario and write the energy ledger table
  sweep             rerun a scenario over a grid of one scalar parameter
  check-conditions  sample the no-exchange conditions and print a report
  example           materialize and run the built-in two-qubit scenario

Exit codes: 0 success; 1 input error; 2 the run finished but breached its
trace/positivity diagnostics (output files are still written). The
environment variable CORRFLUX_SEED overrides the check-conditions
sampling seed.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from . import conditions, dynamics, energetics, model, twoqubit
from .linalg import HermiticityError, ShapeError, frobenius_norm

__all__ = ["main", "RunRecord", "COLUMNS"]

COLUMNS = (
    "t",
    "U",
    "U_A",
    "U_B",
    "U_prod",
    "U_chi",
    "dU_prod_dt",
    "dU_chi_dt",
    "dU_dt",
    "chi_norm",
    "trace_drift",
    "min_eig",
    "cond_i_resid",
    "cond_ii_resid",
)

DEFAULT_SAMPLING_SEED = 0
SIGN_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class RunRecord:
    """One output row: every ledger entry plus run diagnostics."""

    t: float
    U: float
    U_A: float
    U_B: float
    U_prod: float
    U_chi: float
    dU_prod_dt: float
    dU_chi_dt: float
    dU_dt: float
    chi_norm: float
    trace_drift: float
    min_eig: float
    cond_i_resid: float
    cond_ii_resid: float


def compute_records(system: model.BipartiteSystem, trajectory: dynamics.Trajectory) -> list[RunRecord]:
    """Evaluate the full ledger and both condition residuals per record."""
    adjoint_resid = conditions.adjoint_residual(system)
    records = []
    for i, state in enumerate(trajectory.states):
        ledger = energetics.energy_ledger(system, state)
        chi = energetics.decompose(state, system.shape).chi
        records.append(
            RunRecord(
                t=float(trajectory.times[i]),
                U=ledger.U,
                U_A=ledger.U_A,
                U_B=ledger.U_B,
                U_prod=ledger.U_prod,
                U_chi=ledger.U_chi,
                dU_prod_dt=ledger.dU_prod_dt,
                dU_chi_dt=ledger.dU_chi_dt,
                dU_dt=ledger.dU_dt,
                chi_norm=frobenius_norm(chi),
                trace_drift=float(trajectory.trace_drift[i]),
                min_eig=float(trajectory.min_eigenvalue[i]),
                cond_i_resid=conditions.commutator_residual(system, state),
                cond_ii_resid=adjoint_resid,
            )
        )
    return records


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_records_csv(records, path) -> None:
    lines = [",".join(COLUMNS)]
    for rec in records:
        lines.append(",".join(_fmt(getattr(rec, col)) for col in COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_records_json(records, path) -> None:
    data = [{col: float(getattr(rec, col)) for col in COLUMNS} for rec in records]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _execute_run(scenario: model.Scenario, output, fmt: str) -> int:
    trajectory = dynamics.integrate(
        scenario.system,
        scenario.initial_state,
        scenario.t_final,
        scenario.dt,
        record_every=scenario.record_every,
    )
    records = compute_records(scenario.system, trajectory)
    writer = write_records_csv if fmt == "csv" else write_records_json
    writer(records, output)
    return 2 if trajectory.breached else 0


def _cmd_run(args) -> int:
    scenario = model.load_scenario(args.scenario)
    return _execute_run(scenario, args.output, args.format)


_PARAM_ALIASES = {"c": ("initial_state", "c"), "g": ("V", "g")}


def _set_scenario_param(document: dict, param: str, value: float) -> None:
    """Overwrite one scalar field of the scenario document in place."""
    path = list(_PARAM_ALIASES.get(param, tuple(param.split("."))))
    node = document
    trail: list[str] = []
    for segment in path[:-1]:
        trail.append(segment)
        if isinstance(node, list):
            try:
                node = node[int(segment)]
            except (ValueError, IndexError) as exc:
                raise model.ValidationError(
                    f"parameter {param!r}: scenario has no element {'.'.join(trail)}"
                ) from exc
        elif isinstance(node, dict) and segment in node:
            node = node[segment]
        else:
            raise model.ValidationError(
                f"parameter {param!r}: scenario has no field {'.'.join(trail)}"
            )
    leaf = path[-1]
    if (
        isinstance(node, dict)
        and isinstance(node.get(leaf), (int, float))
        and not isinstance(node.get(leaf), bool)
    ):
        node[leaf] = value
    else:
        raise model.ValidationError(
            f"parameter {param!r} does not name a scalar scenario field"
        )


def _sign(value: float) -> int:
    if abs(value) <= SIGN_ZERO_TOL:
        return 0
    return 1 if value > 0 else -1


def _cmd_sweep(args) -> int:
    if args.steps < 1:
        raise model.ValidationError(f"--steps must be >= 1, got {args.steps}")
    with open(args.scenario, "r", encoding="utf-8") as fh:
        try:
            base = json.load(fh)
        except json.JSONDecodeError as exc:
            raise model.ValidationError(f"{args.scenario}: invalid JSON: {exc}") from exc
    os.makedirs(args.output_dir, exist_ok=True)
    safe_param = re.sub(r"[^A-Za-z0-9_.-]", "_", args.param)

    grid = np.linspace(args.min, args.max, args.steps)
    summary = ["param,DeltaU_chi_final,sign"]
    status = 0
    for index, value in enumerate(grid):
        document = copy.deepcopy(base)
        _set_scenario_param(document, args.param, float(value))
        scenario = model.parse_scenario(document)
        out_path = os.path.join(args.output_dir, f"sweep_{safe_param}_{index}.csv")
        status = max(status, _execute_run(scenario, out_path, "csv"))
        with open(out_path, "r", encoding="utf-8") as fh:
            rows = fh.read().strip().split("\n")[1:]
        u_chi_col = COLUMNS.index("U_chi")
        delta = float(rows[-1].split(",")[u_chi_col]) - float(rows[0].split(",")[u_chi_col])
        summary.append(f"{_fmt(value)},{_fmt(delta)},{_sign(delta)}")
    with open(os.path.join(args.output_dir, "summary.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(summary) + "\n")
    return status


def _sampling_seed(args) -> int:
    env = os.environ.get("CORRFLUX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise model.ValidationError(f"CORRFLUX_SEED must be an integer, got {env!r}") from exc
    return args.seed


def _cmd_check_conditions(args) -> int:
    scenario = model.load_scenario(args.scenario)
    report = conditions.check_conditions_sampled(
        scenario.system, samples=args.samples, tol=args.tol, seed=_sampling_seed(args)
    )
    print(json.dumps(report.to_json(), indent=2))
    return 0


def _cmd_example(args) -> int:
    params = twoqubit.ExampleParams(
        omega_A=args.omega_a,
        omega_B=args.omega_b,
        g=args.g,
        beta_A=args.beta_a,
        beta_B=args.beta_b,
        c=args.c,
    )
    t_final = args.t_final
    if t_final is None:
        # Default horizon: twelve correlation lifetimes, deep in the plateau.
        t_final = 12.0 / twoqubit.decay_rate(params)
    document = twoqubit.scenario_document(params, t_final, args.dt, args.record_every)
    if args.emit_scenario:
        with open(args.emit_scenario, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(document, fh, indent=2)
            fh.write("\n")
    scenario = model.parse_scenario(document)
    return _execute_run(scenario, args.output, args.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrflux",
        description="Energy bookkeeping for bipartite open quantum systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario and write the ledger table")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    p_run.add_argument("--output", required=True, help="output file path")
    p_run.add_argument("--format", choices=("csv", "json"), default="csv")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="rerun a scenario over a parameter grid")
    p_sweep.add_argument("scenario", help="path to a scenario JSON file")
    p_sweep.add_argument("--param", required=True, help="scalar field to sweep (e.g. c, g, alpha_A)")
    p_sweep.add_argument("--min", type=float, required=True)
    p_sweep.add_argument("--max", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--output-dir", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check-conditions", help="sample the no-exchange conditions")
    p_check.add_argument("scenario", help="path to a scenario JSON file")
    p_check.add_argument("--samples", type=int, default=conditions.DEFAULT_SAMPLES)
    p_check.add_argument("--seed", type=int, default=DEFAULT_SAMPLING_SEED)
    p_check.add_argument("--tol", type=float, default=conditions.DEFAULT_TOL)
    p_check.set_defaults(func=_cmd_check_conditions)

    p_example = sub.add_parser("example", help="run the built-in two-qubit scenario")
    p_example.add_argument("--omega-a", type=float, default=1.0)
    p_example.add_argument("--omega-b", type=float, default=1.0)
    p_example.add_argument("--g", type=float, default=0.2)
    p_example.add_argument("--beta-a", type=float, default=0.5)
    p_example.add_argument("--beta-b", type=float, default=1.0)
    p_example.add_argument("--c", type=float, default=0.02)
    p_example.add_argument("--t-final", type=float, default=None, help="default: 12 / lambda")
    p_example.add_argument("--dt", type=float, default=1e-3)
    p_example.add_argument("--record-every", type=int, default=10)
    p_example.add_argument("--output", default="example.csv")
    p_example.add_argument("--format", choices=("csv", "json"), default="csv")
    p_example.add_argument("--emit-scenario", default=None, help="also write the scenario JSON here")
    p_example.set_defaults(func=_cmd_example)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (model.ValidationError, ShapeError, HermiticityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
