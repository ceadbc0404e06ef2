"""Command-line front end: ``expansia <task> --scenario FILE``.

Exit codes: 0 certified/verified, 1 falsified/refuted, 2 inconclusive,
3 replay mismatch, 64 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from . import __version__
from .runner import EXIT_OK, EXIT_REPLAY, EXIT_USAGE, ReplayMismatch, exit_code, replay, run
from .scenario import TASKS, Scenario, ScenarioError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="expansia", description="Expansivity checks for group actions on concrete spaces.")
    p.add_argument("task", choices=TASKS + ("run", "replay"),
                   help="task to run; 'run' takes the task from the scenario")
    p.add_argument("--scenario", metavar="FILE", help="scenario file")
    p.add_argument("--depth", type=int, help="Cayley-ball radius")
    p.add_argument("--grid", type=int, metavar="Q", help="grid denominator")
    p.add_argument("--seed", type=int, help="seed for every random choice")
    p.add_argument("--replay", metavar="FILE", help="re-validate a JSON-lines report")
    p.add_argument("--json", action="store_true", help="emit JSON lines")
    p.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    p.add_argument("--version", action="version", version=f"expansia {__version__}")
    return p


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def describe(rec: dict) -> str:
    skip = {"tool", "version", "scenario", "params", "index", "exit", "task", "kind", "seed"}
    extra = ", ".join(f"{k}={_short(rec[k])}" for k in sorted(rec) if k not in skip and rec[k] is not None)
    return f"{rec['task']}: {rec['kind']}" + (f" ({extra})" if extra else "")


def _short(v) -> str:
    if isinstance(v, list):
        return "[" + "; ".join(map(str, v)) + "]"
    return str(v)


def _replay(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            records = [json.loads(ln) for ln in fh if ln.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        print(f"expansia: cannot read report {path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        for line in replay(records):
            print(line)
    except ReplayMismatch as exc:
        print(f"replay FAILED: {exc}", file=sys.stderr)
        return EXIT_REPLAY
    except (ScenarioError, ValueError) as exc:
        print(f"expansia: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.replay:
        return _replay(args.replay)
    if args.task == "replay":
        print("expansia: replay needs --replay FILE", file=sys.stderr)
        return EXIT_USAGE
    if not args.scenario:
        print("expansia: --scenario FILE is required", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        scn = Scenario.load(args.scenario)
        task = None if args.task == "run" else args.task
        records = run(scn, task, {"depth": args.depth, "grid": args.grid, "seed": args.seed})
    except OSError as exc:
        print(f"expansia: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, ValueError) as exc:
        print(f"expansia: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for rec in records:
        print(dumps(rec) if args.json else describe(rec))
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return exit_code(records)


if __name__ == "__main__":
    sys.exit(main())
