"""Command-line front end: ``elroc3 <subcommand> ...``.

Every successful run writes its effective configuration (including the seed)
next to the result. Failures print a JSON error object to stderr and exit
with a code that identifies the error category.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .empirical import ThresholdPair, vus_estimate, vus_estimate_ties
from .errors import ElrocError, ValidationError
from .io import dataset_summary, interval_to_text, load_dataset, region_to_csv, result_to_json
from .regions import interval_tcf2, interval_vus, region2d_pair, region3d_tcf
from .scenarios import builtin_scenarios, dump_scenarios, load_scenarios
from .simulation import ExperimentPlan, load_plan, render_table, run_coverage

EXIT_CODES = {
    "validation": 2,
    "input": 3,
    "domain_condition": 4,
    "degenerate_bootstrap": 5,
    "empty_interval": 6,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error({"category": "validation", "message": message, "context": {}})
        sys.exit(EXIT_CODES["validation"])


def _emit_error(err: dict):
    sys.stderr.write(json.dumps({"error": err}, sort_keys=True) + "\n")


def _seed(value: str) -> int | str:
    if value == "auto":
        return value
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer or 'auto', got {value!r}")
    if seed < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return seed


def _resolve_seed(args) -> int:
    if args.seed == "auto":
        args.seed = int(np.random.SeedSequence().generate_state(1, np.uint32)[0])
        sys.stderr.write(f"seed: {args.seed}\n")
    return args.seed


def _int_triple(value: str) -> tuple[int, int, int]:
    parts = value.split(",")
    try:
        triple = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must look like 30,30,30, got {value!r}")
    if len(triple) != 3:
        raise argparse.ArgumentTypeError(f"sizes need three counts, got {value!r}")
    return triple


def _float_list(value: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def _int_list(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elroc3", description="Empirical-likelihood inference for three-class ROC analysis.")
    p.add_argument("--version", action="version", version=f"elroc3 {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_cmd(name, help_, formats, default_fmt):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", help="CSV file with class,value rows")
        sp.add_argument("-o", "--output", help="write here instead of standard output")
        sp.add_argument("--format", choices=formats, default=default_fmt)
        return sp

    sp = data_cmd("region3d", "confidence region for (TCF1, TCF2, TCF3) at fixed thresholds", ("csv", "json"), "csv")
    sp.add_argument("--t1", type=float, required=True)
    sp.add_argument("--t2", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--grid-n", type=int, default=99)

    sp = data_cmd("ci-tcf2", "interval for TCF2 with TCF1 and TCF3 fixed", ("json", "text"), "json")
    sp.add_argument("--theta1", type=float, required=True)
    sp.add_argument("--theta3", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--B", type=int, default=200)
    sp.add_argument("--seed", type=_seed, required=True)

    sp = data_cmd("ci-vus", "interval for the volume under the ROC surface", ("json", "text"), "json")
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--B", type=int, default=200)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--ties", action="store_true", help="use the tie-corrected VUS estimator")

    sp = data_cmd("region2d", "confidence region for (TCF2, TCF3) with TCF1 and t2 fixed", ("csv", "json"), "csv")
    sp.add_argument("--theta1", type=float, required=True)
    sp.add_argument("--t2", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--B", type=int, default=200)
    sp.add_argument("--grid-n", type=int, default=199)
    sp.add_argument("--seed", type=_seed, required=True)

    sp = data_cmd("vus", "VUS point estimate", ("json", "text"), "json")
    sp.add_argument("--ties", action="store_true")

    sp = sub.add_parser("simulate", help="Monte Carlo coverage experiment")
    sp.add_argument("--plan", help="JSON plan file; flags below override its fields")
    sp.add_argument("--method", choices=("region3d", "ci_tcf2", "ci_vus", "region2d"))
    sp.add_argument("--scenarios", type=_int_list)
    sp.add_argument("--sizes", type=_int_triple, action="append", help="repeatable, e.g. --sizes 30,30,30")
    sp.add_argument("--levels", type=_float_list)
    sp.add_argument("--R", type=int)
    sp.add_argument("--B", type=int)
    sp.add_argument("--theta1", type=float)
    sp.add_argument("--theta3", type=float)
    sp.add_argument("--t2", help="number, or 'truth' for the scenario's true t2")
    sp.add_argument("--ties", action="store_true", default=None)
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--scenario-file", help="JSON file with custom scenarios")
    sp.add_argument("--workers", type=int)
    sp.add_argument("-o", "--output")
    sp.add_argument("--format", choices=("text", "csv", "json"), default="text")

    sp = sub.add_parser("scenarios", help="print the built-in scenarios as a JSON config")
    sp.add_argument("-o", "--output")
    return p


def _write(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _data_config(args, x, **fields) -> dict[str, Any]:
    cfg = {"command": args.command, "input": args.input, **fields, "data": dataset_summary(x)}
    return cfg


def _cmd_region3d(args) -> int:
    x = load_dataset(args.input)
    region = region3d_tcf(x, ThresholdPair(args.t1, args.t2), args.alpha, args.grid_n)
    cfg = _data_config(args, x, t1=args.t1, t2=args.t2, alpha=args.alpha, grid_n=args.grid_n)
    _write(region_to_csv(region, cfg) if args.format == "csv" else result_to_json(region, cfg), args.output)
    return 0


def _emit_interval(args, ci, cfg) -> int:
    text = result_to_json(ci, cfg) if args.format == "json" else interval_to_text(ci, cfg)
    _write(text, args.output)
    if ci.empty:
        _emit_error({"category": "empty_interval", "message": f"interval is empty: {ci.diagnostic}",
                     "context": {"diagnostic": ci.diagnostic}})
        return EXIT_CODES["empty_interval"]
    return 0


def _cmd_ci_tcf2(args) -> int:
    seed = _resolve_seed(args)
    x = load_dataset(args.input)
    ci = interval_tcf2(x, args.theta1, args.theta3, args.alpha, args.B, seed)
    cfg = _data_config(args, x, theta1=args.theta1, theta3=args.theta3, alpha=args.alpha, B=args.B, seed=seed)
    return _emit_interval(args, ci, cfg)


def _cmd_ci_vus(args) -> int:
    seed = _resolve_seed(args)
    x = load_dataset(args.input)
    ci = interval_vus(x, args.alpha, args.B, seed, args.ties)
    cfg = _data_config(args, x, alpha=args.alpha, B=args.B, seed=seed, ties=args.ties)
    return _emit_interval(args, ci, cfg)


def _cmd_region2d(args) -> int:
    seed = _resolve_seed(args)
    x = load_dataset(args.input)
    region = region2d_pair(x, args.theta1, args.t2, args.alpha, args.B, args.grid_n, seed)
    cfg = _data_config(args, x, theta1=args.theta1, t2=args.t2, alpha=args.alpha, B=args.B,
                       grid_n=args.grid_n, seed=seed)
    _write(region_to_csv(region, cfg) if args.format == "csv" else result_to_json(region, cfg), args.output)
    return 0


def _cmd_vus(args) -> int:
    x = load_dataset(args.input)
    est = vus_estimate_ties(x) if args.ties else vus_estimate(x)
    cfg = _data_config(args, x, ties=args.ties)
    if args.format == "json":
        text = json.dumps({"config": cfg, "result": {"vus": est}}, indent=2, sort_keys=True) + "\n"
    else:
        text = f"# config: {json.dumps(cfg, sort_keys=True)}\nvus {est!r}\n"
    _write(text, args.output)
    return 0


def _plan_from_args(args) -> ExperimentPlan:
    fields: dict[str, Any] = load_plan(args.plan).to_dict() if args.plan else {}
    overrides = {
        "method": args.method, "scenario_ids": args.scenarios, "sizes": args.sizes, "levels": args.levels,
        "R": args.R, "B": args.B, "theta1": args.theta1, "theta3": args.theta3, "ties": args.ties,
    }
    if args.t2 is not None:
        overrides["t2"] = args.t2 if args.t2 == "truth" else _parse_float(args.t2, "t2")
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if args.seed is not None:
        fields["master_seed"] = _resolve_seed(args)
    elif "master_seed" not in fields:
        raise ValidationError("simulate needs --seed (or a plan file with master_seed)")
    for key in ("method", "scenario_ids", "sizes"):
        if key not in fields:
            raise ValidationError(f"simulate needs {key.replace('_ids', 's')} (flag or plan file)")
    return ExperimentPlan.from_dict(fields)


def _parse_float(value: str, name: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValidationError(f"{name} must be a number or 'truth', got {value!r}") from None


def _cmd_simulate(args) -> int:
    plan = _plan_from_args(args)
    scenarios = load_scenarios(args.scenario_file) if args.scenario_file else None
    result = run_coverage(plan, scenarios, workers=args.workers)
    text = render_table([result], args.format)
    if args.format == "json":
        text += "\n"
    else:
        text = f"# plan: {json.dumps(plan.to_dict(), sort_keys=True)}\n" + text
    _write(text, args.output)
    return 0


def _cmd_scenarios(args) -> int:
    _write(dump_scenarios(builtin_scenarios()) + "\n", args.output)
    return 0


_COMMANDS = {
    "region3d": _cmd_region3d,
    "ci-tcf2": _cmd_ci_tcf2,
    "ci-vus": _cmd_ci_vus,
    "region2d": _cmd_region2d,
    "vus": _cmd_vus,
    "simulate": _cmd_simulate,
    "scenarios": _cmd_scenarios,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ElrocError as exc:
        _emit_error(exc.to_dict())
        return EXIT_CODES.get(exc.category, 1)


if __name__ == "__main__":
    raise SystemExit(main())
