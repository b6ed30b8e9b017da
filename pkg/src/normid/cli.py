"""Command-line entry point: ``normid <subcommand> ...``.

Subcommands mirror the pipeline: plan, recognize, learn, learn-threshold,
simulate, evaluate and pipeline (simulate, learn-threshold, evaluate in one
go). Artifacts are written with ``--out``; stdout gets a text or JSON
summary depending on ``--format``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import formats
from .errors import (
    DepthCapExceeded,
    DomainError,
    EmptyGrammar,
    GroundingExplosion,
    InvalidThreshold,
    NoCompliantPlan,
    NoParse,
    StateMismatch,
)
from .grounding import DEFAULT_GROUND_CAP
from .learner import check_thresholds, learn_norms, t_learn_norms
from .norms import NormSet
from .planner import DEFAULT_DEPTH_CAP, Planner, bracketed, format_tree
from .recognizer import Recognizer, Run
from .simulator import evaluate, generate_runs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NO_PARSE = 10
EXIT_STATE_MISMATCH = 11
EXIT_DEPTH_CAP = 12
EXIT_GROUNDING = 13
EXIT_NO_COMPLIANT = 14
EXIT_THRESHOLD = 15
EXIT_DOMAIN = 16
EXIT_EMPTY_GRAMMAR = 17

_EXIT_CODES = [
    (NoParse, EXIT_NO_PARSE),
    (StateMismatch, EXIT_STATE_MISMATCH),
    (DepthCapExceeded, EXIT_DEPTH_CAP),
    (GroundingExplosion, EXIT_GROUNDING),
    (NoCompliantPlan, EXIT_NO_COMPLIANT),
    (InvalidThreshold, EXIT_THRESHOLD),
    (EmptyGrammar, EXIT_EMPTY_GRAMMAR),
    (DomainError, EXIT_DOMAIN),
    (OSError, EXIT_IO),
    (json.JSONDecodeError, EXIT_IO),
    (ValueError, EXIT_DOMAIN),
    (KeyError, EXIT_DOMAIN),
]

log = logging.getLogger("normid")


class UsageError(Exception):
    pass


def _emit(args, text: str, machine) -> None:
    if args.format == "machine":
        sys.stdout.write(formats.dumps(machine))
    elif text:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _write(path, obj) -> None:
    if path is not None:
        formats.write_json(path, obj)


def _require(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {' '.join(missing)}")


def _goals(args):
    return None if not args.goals else tuple(formats.parse_task(g) for g in args.goals)


def _load(what: str, loader, path):
    try:
        return loader(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise type(exc)(f"{what} file {path}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise DomainError(f"{what} file {path}: {exc}") from exc


# -- subcommands --------------------------------------------------------------


def cmd_plan(args) -> int:
    _require(args, "domain", "goals")
    domain = _load("domain", formats.load_domain, args.domain)
    initial = formats.parse_state(args.initial or ())
    planner = Planner(domain, args.depth_cap)
    plans = list(planner.iter_network(initial, _goals(args)))
    if not args.all:
        plans = plans[:1]
    goal = _goals(args)[0] if len(args.goals) == 1 else None
    runs = [Run.of_plan(p, goal) for p in plans if p.actions]
    _write(args.out, formats.runs_to_list(runs))
    text = "\n\n".join(format_tree(p.root) for p in plans) if plans else "no plan"
    _emit(args, text, {"plans": [bracketed(p.root) for p in plans], "runs": formats.runs_to_list(runs)})
    return EXIT_OK if plans else 1


def cmd_recognize(args) -> int:
    _require(args, "domain", "runs")
    domain = _load("domain", formats.load_domain, args.domain)
    runs = _load("runs", formats.load_runs, args.runs)
    recognizer = Recognizer(domain, _goals(args), args.ground_cap)
    blocks, machine = [], []
    for i, run in enumerate(runs):
        rec = recognizer.recognize(run, i)
        blocks.append(f"run {i}:\n{format_tree(rec.plan.root)}")
        machine.append({"run": i, "tree": bracketed(rec.plan.root), "ambiguity": rec.ambiguity})
    _write(args.out, machine)
    _emit(args, "\n\n".join(blocks), machine)
    return EXIT_OK


def cmd_learn(args) -> int:
    _require(args, "domain", "runs")
    domain = _load("domain", formats.load_domain, args.domain)
    runs = _load("runs", formats.load_runs, args.runs)
    pot_o, pot_f = learn_norms(runs, domain, _goals(args), args.depth_cap, args.ground_cap)
    norms = NormSet(tuple(pot_o.norms()) + tuple(pot_f))
    listing = formats.norms_to_list(norms)
    _write(args.out, listing)
    _emit(args, str(norms), listing)
    return EXIT_OK


def _threshold_args(args) -> None:
    _require(args, "ot", "ft")
    check_thresholds(args.ot, args.ft)


def cmd_learn_threshold(args) -> int:
    _require(args, "domain", "runs")
    _threshold_args(args)
    domain = _load("domain", formats.load_domain, args.domain)
    runs = _load("runs", formats.load_runs, args.runs)
    result = t_learn_norms(
        runs,
        args.ot,
        args.ft,
        domain,
        _goals(args),
        refute_obligations=not args.no_obligation_refutation,
        depth_cap=args.depth_cap,
        ground_cap=args.ground_cap,
    )
    listing = formats.norms_to_list(result.norms)
    _write(args.out, listing)
    text = "\n".join(f"{n}  (support {s}, refute {r})" for n, (s, r) in sorted(result.norms.evidence.items()))
    _emit(args, text, listing)
    return EXIT_OK


def _scenario(args):
    _require(args, "scenario")
    scenario = _load("scenario", formats.load_scenario, args.scenario)
    if args.seed is not None:
        from dataclasses import replace

        scenario = replace(scenario, seed=args.seed)
    return scenario


def cmd_simulate(args) -> int:
    scenario = _scenario(args)
    runs = generate_runs(scenario, args.n, args.depth_cap)
    listing = formats.runs_to_list(runs)
    _write(args.out, listing)
    _emit(args, f"{len(runs)} runs generated (seed {scenario.seed})", listing)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    _require(args, "domain", "norms", "planted", "runs")
    domain = _load("domain", formats.load_domain, args.domain)
    learned = _load("norms", formats.load_norms, args.norms)
    planted = _load("planted norms", formats.load_norms, args.planted)
    runs = _load("runs", formats.load_runs, args.runs)
    report = evaluate(learned, planted, runs, domain, _goals(args), args.depth_cap)
    _write(args.out, report.to_dict())
    _emit(args, report.to_text(), report.to_dict())
    return EXIT_OK


def cmd_pipeline(args) -> int:
    _threshold_args(args)
    scenario = _scenario(args)
    out = Path(args.out) if args.out else None
    runs = generate_runs(scenario, args.n, args.depth_cap)
    result = t_learn_norms(
        runs,
        args.ot,
        args.ft,
        scenario.domain,
        _goals(args),
        refute_obligations=not args.no_obligation_refutation,
        depth_cap=args.depth_cap,
        ground_cap=args.ground_cap,
    )
    report = evaluate(result.norms, scenario.planted, runs, scenario.domain, plans=result.plans, depth_cap=args.depth_cap)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        formats.save_runs(out / "runs.json", runs)
        formats.save_norms(out / "norms.json", result.norms)
        formats.write_json(out / "report.json", report.to_dict())
        (out / "report.txt").write_text(report.to_text() + "\n", encoding="utf-8")
    _emit(args, report.to_text(), report.to_dict())
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "recognize": cmd_recognize,
    "learn": cmd_learn,
    "learn-threshold": cmd_learn_threshold,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", help="domain file (JSON)")
    common.add_argument("--norms", help="norm file (JSON)")
    common.add_argument("--runs", help="run-trace file (JSON)")
    common.add_argument("--goals", nargs="+", help="ground goal tasks, e.g. 'travel(aberdeen,paris)'")
    common.add_argument("--depth-cap", type=int, default=DEFAULT_DEPTH_CAP)
    common.add_argument("--ground-cap", type=int, default=DEFAULT_GROUND_CAP)
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--out", help="output file (a directory for pipeline)")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("-v", "--verbose", action="store_true")

    thresholds = argparse.ArgumentParser(add_help=False)
    thresholds.add_argument("--ot", type=float, help="obligation ratio threshold (> 0)")
    thresholds.add_argument("--ft", type=float, help="prohibition ratio threshold (> 0)")
    thresholds.add_argument(
        "--no-obligation-refutation",
        action="store_true",
        help="never count refuting evidence for obligations",
    )

    scenario = argparse.ArgumentParser(add_help=False)
    scenario.add_argument("--scenario", help="scenario file (JSON)")
    scenario.add_argument("-n", "--n", type=int, default=100, help="number of runs to generate")

    parser = argparse.ArgumentParser(prog="normid", description="Learn norms from observed HTN plans.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plan", parents=[common], help="enumerate plans for a goal network")
    p.add_argument("--initial", nargs="*", help="initial state atoms")
    p.add_argument("--all", action="store_true", help="emit every plan, not just the first")
    sub.add_parser("recognize", parents=[common], help="explain runs with decomposition trees")
    sub.add_parser("learn", parents=[common], help="learn norms assuming compliant runs")
    sub.add_parser("learn-threshold", parents=[common, thresholds], help="learn norms tolerating violations")
    sub.add_parser("simulate", parents=[common, scenario], help="generate runs from a scenario")
    e = sub.add_parser("evaluate", parents=[common], help="score learned norms against planted ones")
    e.add_argument("--planted", help="planted norm file (JSON)")
    sub.add_parser("pipeline", parents=[common, thresholds, scenario], help="simulate, learn-threshold, evaluate")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        for kind, code in _EXIT_CODES:
            if isinstance(exc, kind):
                print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
