"""Command line entry point.

Subcommands:

    fockbench run --scenario PATH [overrides] [--report PATH]
    fockbench validate --scenario PATH
    fockbench replay --report PATH [--check NAME]
    fockbench list-scenarios

Exit codes for ``run``: 0 all checks pass, 1 any violation, 2 any
inconclusive (and nothing worse), 3 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .scenario import load_scenario, parse_scenario, ScenarioError
from .runner import run_scenario, replay_report, report_bytes


def _bundled():
    root = resources.files("fockbench") / "scenarios"
    return sorted(p for p in root.iterdir() if p.name.endswith(".json"))


def _resolve_scenario(name_or_path):
    """A filesystem path, or the name of a bundled scenario."""
    import os
    if os.path.exists(name_or_path):
        return load_scenario(name_or_path)
    for p in _bundled():
        if p.name == name_or_path + ".json" or p.name == name_or_path:
            return parse_scenario(json.loads(p.read_text()))
    raise FileNotFoundError(
        f"no such scenario file or bundled scenario: {name_or_path!r}")


def _apply_overrides(scenario, args):
    b = scenario.bounds
    if args.truncation is not None:
        b["L"] = args.truncation
        b["L_big"] = args.truncation + 2
    if args.big_truncation is not None:
        b["L_big"] = args.big_truncation
    if args.word_length is not None:
        b["W"] = args.word_length
    if args.backend is not None:
        b["backend"] = args.backend
    if args.tolerance is not None:
        b["tolerance"] = args.tolerance
    if args.seed is not None:
        b["seed"] = args.seed
    # overrides are part of the replayed document
    scenario.doc["bounds"] = {k: v for k, v in b.items() if v is not None}
    return scenario


def build_parser():
    ap = argparse.ArgumentParser(
        prog="fockbench",
        description="scenario-driven checks for semigroup operator-"
                    "algebra combinatorics")
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a scenario's checks")
    runp.add_argument("--scenario", required=True,
                      help="path to a scenario JSON, or a bundled name")
    runp.add_argument("--truncation", "-L", type=int, default=None)
    runp.add_argument("--big-truncation", type=int, default=None)
    runp.add_argument("--word-length", "-W", type=int, default=None)
    runp.add_argument("--backend", choices=["exact", "float"], default=None)
    runp.add_argument("--tolerance", type=float, default=None)
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--report", default=None,
                      help="write the JSON report here (default stdout)")
    runp.add_argument("--cache-dir", default=None)
    runp.add_argument("--timing", action="store_true",
                      help="include wall-clock timings (report no longer "
                           "byte-stable)")

    vp = sub.add_parser("validate", help="validate a scenario file")
    vp.add_argument("--scenario", required=True)

    rp = sub.add_parser("replay",
                        help="re-verify recorded violations from a report")
    rp.add_argument("--report", required=True)
    rp.add_argument("--check", default=None,
                    help="replay only this check entry")
    rp.add_argument("--cache-dir", default=None)

    sub.add_parser("list-scenarios", help="list bundled scenarios")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.command == "list-scenarios":
        for p in _bundled():
            doc = json.loads(p.read_text())
            print(f"{p.name[:-5]:28s} {doc.get('description', '')}")
        return 0

    if args.command == "validate":
        try:
            sc = _resolve_scenario(args.scenario)
        except ScenarioError as exc:
            for path, msg in exc.errors:
                print(f"error: {path}: {msg}", file=sys.stderr)
            return 3
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
        for w in sc.warnings:
            print(f"warning: {w}", file=sys.stderr)
        print(f"{sc.name}: valid ({len(sc.checks)} checks)")
        return 0

    if args.command == "replay":
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
        ok, results = replay_report(report, check=args.check,
                                    cache_dir=args.cache_dir)
        for r in results:
            mark = "ok" if r["match"] else "DIFFERS"
            print(f"{r['check']}: recorded={r['recorded']} "
                  f"replayed={r['replayed']} [{mark}]")
        if not results:
            print("nothing to replay (no recorded violations matched)")
        return 0 if ok else 3

    # run
    try:
        sc = _resolve_scenario(args.scenario)
    except ScenarioError as exc:
        for path, msg in exc.errors:
            print(f"error: {path}: {msg}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for w in sc.warnings:
        print(f"warning: {w}", file=sys.stderr)
    sc = _apply_overrides(sc, args)
    try:
        report = run_scenario(sc, cache_dir=args.cache_dir,
                              include_timing=args.timing)
    except Exception as exc:  # structural failure outside any one check
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    body = report_bytes(report)
    if args.timing:
        body = (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()
    if args.report:
        with open(args.report, "wb") as fh:
            fh.write(body)
        for rec in report["checks"]:
            print(f"{rec['check']}: {rec['status']}")
    else:
        sys.stdout.write(body.decode())
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
