"""Command-line entry point.

    fuzzysched schedule --workload case_study_1_arrival.csv --policy modified_fuzzy --replay
    fuzzysched compare --workload case_study_1_no_arrival.csv --replay
    fuzzysched infer 5 20
    fuzzysched rules-check default

Exit status: 0 on success, 1 on usage errors, 2 on bad data or configuration.
The geometry file defaults to ``$FUZZYSCHED_GEOMETRY`` when set.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .fuzzy import FuzzyConfigError, NoRuleFiredError, build_engine, load_geometry
from .metrics import DEFAULT_POLICIES, compare, compute_metrics
from .rules import parse_rulebase
from .scheduling import Policy, WorkloadError, simulate
from .workload_io import (
    RenderOptions,
    WorkloadParseError,
    emit_report,
    fixture_path,
    fmt2,
    load_workload,
    metrics_table,
    render_gantt,
    schedule_document,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")


def _engine_args(p):
    p.add_argument("--rules", help="rule file (default: built-in rule table)")
    p.add_argument("--geometry", help="membership geometry JSON (default: $FUZZYSCHED_GEOMETRY or built-in)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzysched", description="Fuzzy-priority CPU scheduling simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("schedule", help="simulate one policy and print the Gantt chart and metrics")
    p.add_argument("--workload", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--output", choices=("table", "ascii", "svg", "json"), default="table")
    p.add_argument("--scale", type=float, help="time units per character (ascii) or pixel (svg)")
    p.add_argument("--replay", action="store_true", help="use recorded new_priority values instead of inference")
    _engine_args(p)

    p = sub.add_parser("compare", help="compare several policies on one workload")
    p.add_argument("--workload", required=True)
    p.add_argument("--policies", default=",".join(DEFAULT_POLICIES),
                   help="comma-separated subset (default: %(default)s)")
    p.add_argument("--output", choices=("table", "json"), default="table")
    p.add_argument("--replay", action="store_true")
    _engine_args(p)

    p = sub.add_parser("infer", help="print the crisp new priority for one input pair")
    p.add_argument("pp", type=float)
    p.add_argument("et", type=float)
    _engine_args(p)

    p = sub.add_parser("rules-check", help="validate a rule file ('default' for the built-in table)")
    p.add_argument("file")
    p.add_argument("--geometry")
    return parser


def _schedule(args) -> str:
    try:
        Policy.parse(args.policy)
    except ValueError as exc:
        raise UsageError(f"schedule: {exc}\n") from None
    doc = load_workload(args.workload)
    engine = build_engine(args.geometry, args.rules)
    policy = Policy.parse(args.policy, engine, args.replay)
    sched = simulate(doc.tasks, policy)
    metrics = compute_metrics(sched)
    if args.output == "json":
        return json.dumps(schedule_document(sched, metrics, doc.name or ""), indent=2) + "\n"
    if args.output == "svg":
        return render_gantt(sched, RenderOptions("svg", args.scale))
    chart = render_gantt(sched, RenderOptions("ascii", args.scale))
    if args.output == "ascii":
        return chart
    return f"{doc.name} / {policy.name}\n{chart}\n{metrics_table(metrics)}"


def _compare(args) -> str:
    doc = load_workload(args.workload)
    engine = build_engine(args.geometry, args.rules)
    names = [n.strip() for n in args.policies.split(",") if n.strip()]
    if not names:
        raise UsageError("compare: no policies given\n")
    for n in names:
        try:
            Policy.parse(n)
        except ValueError as exc:
            raise UsageError(f"compare: {exc}\n") from None
    report = compare(doc.tasks, names, engine=engine, replay=args.replay, workload=doc.name or "")
    return emit_report(report, args.output)


def _infer(args) -> str:
    engine = build_engine(args.geometry, args.rules)
    return f"{fmt2(engine.infer(args.pp, args.et))}\n"


def _rules_check(args) -> str:
    path = fixture_path("default.rules") if args.file == "default" else Path(args.file)
    inputs, output = load_geometry(args.geometry)
    rb = parse_rulebase(path.read_text(encoding="utf-8"), inputs=inputs, output=output)
    return f"{len(rb)} rules OK\n"


_COMMANDS = {"schedule": _schedule, "compare": _compare, "infer": _infer, "rules-check": _rules_check}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = _COMMANDS[args.command](args)
    except UsageError as exc:
        stderr.write(str(exc))
        return EXIT_USAGE
    except (OSError, WorkloadParseError, WorkloadError, FuzzyConfigError, NoRuleFiredError, ValueError) as exc:
        stderr.write(f"fuzzysched: error: {exc}\n")
        return EXIT_DATA
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
