"""Command-line entry point: ``bellcorr <command> --scenario FILE --out DIR``."""
from __future__ import annotations

import argparse
import json
import sys

from .errors import BellcorrError, ConvergenceError, InputError, InvariantViolation, ScenarioError
from .runner import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_VIOLATION, run_scenario
from .scenario import parse_scenario

COMMANDS = {
    "beta": "beta",
    "invariant": "invariant",
    "cluster": "cluster",
    "chain": "chain_curve",
    "verify": "verify_suite",
}


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellcorr", description="Maximal Bell correlations of commuting algebras.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, task in COMMANDS.items():
        c = sub.add_parser(name, help=f"run a '{task}' scenario")
        c.add_argument("--scenario", required=True, help="path to the JSON scenario file")
        c.add_argument("--out", help="output directory (defaults to the scenario's 'output')")
        c.add_argument("--seed", type=_u64, help="overrides every seed in the scenario")
        c.add_argument("--restarts", type=int)
        c.add_argument("--max-sweeps", type=int)
        c.add_argument("--tol", type=float)
    return p


def _apply_overrides(data: dict, args) -> dict:
    data = json.loads(json.dumps(data))
    opt = data.setdefault("optimizer", {})
    if args.seed is not None:
        data["seed"] = args.seed
        opt["seed"] = args.seed
    for key, val in (("restarts", args.restarts), ("max_sweeps", args.max_sweeps), ("tol", args.tol)):
        if val is not None:
            opt[key] = val
    if not opt:
        del data["optimizer"]
    return data


def _err(msg: str):
    print(f"bellcorr: {msg}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    try:
        with open(args.scenario, "rb") as fh:
            raw = fh.read()
        s = parse_scenario(raw)
        if s.task != COMMANDS[args.command]:
            raise ScenarioError([f"$.task: '{s.task}' does not match command '{args.command}'"])
        if any(v is not None for v in (args.seed, args.restarts, args.max_sweeps, args.tol)):
            s = parse_scenario(json.dumps(_apply_overrides(s.data, args)))
        out = args.out or s.output
        if not out:
            raise ScenarioError(["$.output: no output directory (use --out)"])
    except OSError as exc:
        _err(f"cannot read scenario: {exc}")
        return EXIT_CONFIG
    except ScenarioError as exc:
        for e in exc.errors:
            _err(e)
        return EXIT_CONFIG
    try:
        bundle = run_scenario(s, out)
    except InvariantViolation as exc:
        _err(str(exc))
        return EXIT_VIOLATION
    except ConvergenceError as exc:
        _err(str(exc))
        return EXIT_CONVERGENCE
    except InputError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except BellcorrError as exc:
        _err(str(exc))
        return EXIT_CONVERGENCE
    for v in bundle.summary.get("violations", []):
        _err(f"violation: {v}")
    print(json.dumps({"task": bundle.task, "exit_code": bundle.exit_code, "out": out}, sort_keys=True))
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
