"""Workload files, Gantt rendering and report serialization."""

from __future__ import annotations

import csv
import io
import json
import os
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from html import escape
from importlib import resources
from pathlib import Path

from .metrics import ComparisonReport, ReportEntry, ScheduleMetrics, TaskMetrics
from .scheduling import Schedule, Task

COLUMNS = ("id", "burst", "arrival", "priority", "external_priority", "new_priority")
REQUIRED = ("id", "burst")
_FIELD = {"priority": "static_priority"}

_INT = re.compile(r"[+-]?\d+\Z")


class WorkloadParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class WorkloadDocument:
    tasks: tuple[Task, ...] = ()
    name: str | None = None
    source: str | None = None


def _number(text: str, column: str, line: int | None):
    text = text.strip()
    if _INT.match(text):
        return int(text)
    try:
        value = float(text)
    except ValueError:
        raise WorkloadParseError(f"{column}: not a number: {text!r}", line) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise WorkloadParseError(f"{column}: not a finite number: {text!r}", line)
    return value


def _task_from_record(rec: dict, line: int | None) -> Task:
    tid = str(rec.get("id") or "").strip()
    if not tid:
        raise WorkloadParseError("missing task id", line)
    if rec.get("burst") in (None, ""):
        raise WorkloadParseError(f"task {tid}: missing burst", line)
    values = {}
    for col in COLUMNS[1:]:
        raw = rec.get(col)
        if raw is None or (isinstance(raw, str) and not raw.strip()):
            continue
        if isinstance(raw, bool):
            raise WorkloadParseError(f"task {tid}: {col} must be a number", line)
        values[col] = raw if isinstance(raw, (int, float)) else _number(str(raw), col, line)
    if values["burst"] <= 0:
        raise WorkloadParseError(f"task {tid}: burst must be positive, got {values['burst']}", line)
    if values.get("arrival", 0) < 0:
        raise WorkloadParseError(f"task {tid}: arrival must be non-negative, got {values['arrival']}", line)
    return Task(
        id=tid,
        burst=values["burst"],
        arrival=values.get("arrival", 0),
        static_priority=values.get("priority"),
        external_priority=values.get("external_priority"),
        new_priority=values.get("new_priority"),
    )


def _check_ids(tasks, lines):
    seen: dict[str, int | None] = {}
    for t, line in zip(tasks, lines):
        if t.id in seen:
            raise WorkloadParseError(
                f"duplicate id {t.id!r} (first on line {seen[t.id]})", line
            )
        seen[t.id] = line


def parse_workload(data: bytes | str, format: str = "csv") -> WorkloadDocument:
    """Parse a CSV or JSON workload; a missing arrival column means arrival 0."""
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    if format == "csv":
        return _parse_csv(text)
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown workload format {format!r}")


def _parse_csv(text: str) -> WorkloadDocument:
    meta: dict[str, str] = {}
    header = None
    tasks, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = re.match(r"#\s*(name|source)\s*:\s*(.*)", stripped)
            if m and header is None:
                meta[m.group(1)] = m.group(2).strip()
            continue
        cells = [c.strip() for c in next(csv.reader([raw]))]
        if header is None:
            header = [c.lower() for c in cells]
            unknown = [c for c in header if c not in COLUMNS]
            missing = [c for c in REQUIRED if c not in header]
            if unknown or missing or len(set(header)) != len(header):
                raise WorkloadParseError(
                    "bad header; expected id,burst[,arrival][,priority][,external_priority][,new_priority]"
                    + (f"; unknown {unknown}" if unknown else "")
                    + (f"; missing {missing}" if missing else ""),
                    lineno,
                )
            continue
        if len(cells) != len(header):
            raise WorkloadParseError(f"expected {len(header)} fields, got {len(cells)}", lineno)
        tasks.append(_task_from_record(dict(zip(header, cells)), lineno))
        lines.append(lineno)
    _check_ids(tasks, lines)
    return WorkloadDocument(tuple(tasks), meta.get("name"), meta.get("source"))


def _parse_json(text: str) -> WorkloadDocument:
    try:
        doc = json.loads(text) if text.strip() else {"tasks": []}
    except json.JSONDecodeError as exc:
        raise WorkloadParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if isinstance(doc, list):
        doc = {"tasks": doc}
    if not isinstance(doc, dict) or not isinstance(doc.get("tasks", []), list):
        raise WorkloadParseError("expected an object with a 'tasks' list")
    tasks = []
    for i, rec in enumerate(doc.get("tasks", [])):
        if not isinstance(rec, dict):
            raise WorkloadParseError(f"task {i}: expected an object")
        unknown = sorted(set(rec) - set(COLUMNS))
        if unknown:
            raise WorkloadParseError(f"task {i}: unknown fields {unknown}")
        try:
            tasks.append(_task_from_record(rec, None))
        except WorkloadParseError as exc:
            raise WorkloadParseError(f"task {i}: {exc}") from None
    _check_ids(tasks, [None] * len(tasks))
    return WorkloadDocument(tuple(tasks), doc.get("name"), doc.get("source"))


def _columns_for(tasks) -> list[str]:
    cols = ["id", "burst", "arrival", "priority"]
    for extra in ("external_priority", "new_priority"):
        if any(getattr(t, extra) is not None for t in tasks):
            cols.append(extra)
    return cols


def _cell(t: Task, col: str):
    return getattr(t, _FIELD.get(col, col))


def emit_workload(doc: WorkloadDocument, format: str = "csv") -> str:
    if format == "json":
        tasks = []
        for t in doc.tasks:
            rec = {c: _cell(t, c) for c in COLUMNS}
            tasks.append({k: v for k, v in rec.items() if v is not None})
        out: dict = {}
        if doc.name is not None:
            out["name"] = doc.name
        if doc.source is not None:
            out["source"] = doc.source
        out["tasks"] = tasks
        return json.dumps(out, indent=2) + "\n"
    if format != "csv":
        raise ValueError(f"unknown workload format {format!r}")
    buf = io.StringIO()
    if doc.name is not None:
        buf.write(f"# name: {doc.name}\n")
    if doc.source is not None:
        buf.write(f"# source: {doc.source}\n")
    cols = _columns_for(doc.tasks)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for t in doc.tasks:
        w.writerow(["" if _cell(t, c) is None else format_time(_cell(t, c)) for c in cols])
    return buf.getvalue()


def fixture_path(name: str) -> Path:
    """Path of a workload shipped with the package, e.g. ``case_study_1_arrival.csv``."""
    ref = resources.files("fuzzysched") / "data" / name
    return Path(str(ref))


def load_workload(path: str | os.PathLike) -> WorkloadDocument:
    """Read a workload file; bare names of shipped fixtures are also accepted."""
    p = Path(path)
    if not p.exists():
        shipped = fixture_path(p.name)
        if shipped.exists() and p.parent == Path("."):
            p = shipped
        else:
            raise FileNotFoundError(f"no such workload file: {path}")
    fmt = "json" if p.suffix.lower() == ".json" else "csv"
    doc = parse_workload(p.read_bytes(), fmt)
    if doc.name is None:
        doc = WorkloadDocument(doc.tasks, p.stem, doc.source)
    return doc


# formatting

def format_time(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


def fmt2(x: float) -> str:
    """Two decimals, rounding half away from zero on the shortest decimal repr."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


# Gantt charts

@dataclass(frozen=True)
class RenderOptions:
    format: str = "ascii"
    # time units per character (ascii) or per pixel (svg)
    scale: float | None = None
    show_labels: bool = True
    show_times: bool = True

    def __post_init__(self):
        if self.format not in ("ascii", "svg", "json"):
            raise ValueError(f"unknown render format {self.format!r}")
        if self.scale is not None and not self.scale > 0:
            raise ValueError("scale must be positive")


def _cells(schedule: Schedule):
    """Segments with idle gaps filled in as ``None`` ids, starting at time 0."""
    cells = []
    t = 0
    for s in schedule.segments:
        if s.start > t:
            cells.append((None, t, s.start))
        cells.append((s.task_id, s.start, s.end))
        t = s.end
    return cells


def render_gantt(schedule: Schedule, options: RenderOptions | None = None) -> str:
    options = options or RenderOptions()
    if options.format == "json":
        return json.dumps(
            [{"id": s.task_id, "start": s.start, "end": s.end} for s in schedule.segments]
        ) + "\n"
    if options.format == "svg":
        return _render_svg(schedule, options)
    return _render_ascii(schedule, options)


def _render_ascii(schedule: Schedule, options: RenderOptions) -> str:
    scale = options.scale or 1.0
    cells = _cells(schedule)
    if not cells:
        return "+\n+\n0\n" if options.show_times else "+\n+\n"
    top, mid, times = "+", "|", ""
    for tid, start, end in cells:
        label = ("idle" if tid is None else tid) if options.show_labels else ""
        stamp = format_time(start)
        width = max(round((end - start) / scale), len(label) + 2, len(stamp) if options.show_times else 1)
        top += "-" * width + "+"
        mid += label.center(width) + "|"
        times += stamp.ljust(width + 1)
    times += format_time(cells[-1][2])
    lines = [top, mid, top]
    if options.show_times:
        lines.append(times)
    return "\n".join(lines) + "\n"


_PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac")


def _num(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _render_svg(schedule: Schedule, options: RenderOptions) -> str:
    scale = options.scale or 0.05
    pad, lane, axis = 10.0, 30.0, 18.0
    end = schedule.makespan
    width = pad * 2 + end / scale
    height = pad * 2 + lane + (axis if options.show_times else 0)
    colour = {t.id: _PALETTE[i % len(_PALETTE)] for i, t in enumerate(schedule.tasks)}
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
        f'<line x1="{_num(pad)}" y1="{_num(pad + lane)}" x2="{_num(pad + end / scale)}" '
        f'y2="{_num(pad + lane)}" stroke="#333"/>',
    ]
    for s in schedule.segments:
        x = pad + s.start / scale
        w = (s.end - s.start) / scale
        out.append(
            f'<rect x="{_num(x)}" y="{_num(pad)}" width="{_num(w)}" height="{_num(lane)}" '
            f'fill="{colour.get(s.task_id, "#999")}" stroke="#222" data-id="{escape(s.task_id)}" '
            f'data-start="{format_time(s.start)}" data-end="{format_time(s.end)}"/>'
        )
        if options.show_labels:
            out.append(
                f'<text x="{_num(x + w / 2)}" y="{_num(pad + lane / 2 + 4)}" text-anchor="middle" '
                f'font-family="monospace" font-size="12">{escape(s.task_id)}</text>'
            )
    if options.show_times:
        for t in schedule.boundaries():
            out.append(
                f'<text x="{_num(pad + t / scale)}" y="{_num(pad + lane + axis - 4)}" '
                f'text-anchor="middle" font-family="monospace" font-size="10">{format_time(t)}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# reports

def metrics_to_dict(m: ScheduleMetrics) -> dict:
    return {
        "per_task": [
            {"id": t.id, "completion": t.completion, "turnaround": t.turnaround, "waiting": t.waiting}
            for t in m.per_task
        ],
        "avg_waiting": m.avg_waiting,
        "avg_turnaround": m.avg_turnaround,
    }


def metrics_from_dict(d: dict) -> ScheduleMetrics:
    return ScheduleMetrics(
        tuple(TaskMetrics(r["id"], r["completion"], r["turnaround"], r["waiting"]) for r in d["per_task"]),
        d["avg_waiting"],
        d["avg_turnaround"],
    )


def schedule_document(schedule: Schedule, metrics: ScheduleMetrics, workload: str = "") -> dict:
    return {
        "workload": workload,
        "policy": schedule.policy,
        "segments": [{"id": s.task_id, "start": s.start, "end": s.end} for s in schedule.segments],
        "metrics": metrics_to_dict(metrics),
    }


def emit_report(report: ComparisonReport, format: str = "table") -> str:
    if format == "json":
        results = []
        for e in report.entries:
            if e.metrics is None:
                results.append({"policy": e.policy, "error": e.error})
            else:
                results.append({"policy": e.policy, **metrics_to_dict(e.metrics)})
        return json.dumps({"workload": report.workload, "results": results}, indent=2) + "\n"
    if format != "table":
        raise ValueError(f"unknown report format {format!r}")
    head = ("policy", "avg_waiting", "avg_turnaround")
    rows = []
    for e in report.entries:
        if e.metrics is None:
            rows.append((e.policy, "error", e.error or ""))
        else:
            rows.append((e.policy, fmt2(e.metrics.avg_waiting), fmt2(e.metrics.avg_turnaround)))
    w0 = max([len(head[0])] + [len(r[0]) for r in rows])
    w1 = max([len(head[1])] + [len(r[1]) for r in rows])
    lines = [f"{head[0]:<{w0}}  {head[1]:>{w1}}  {head[2]:>14}"]
    for p, a, b in rows:
        lines.append(f"{p:<{w0}}  {a:>{w1}}  {b:>14}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ComparisonReport:
    doc = json.loads(text)
    entries = []
    for r in doc["results"]:
        if "error" in r:
            entries.append(ReportEntry(r["policy"], error=r["error"]))
        else:
            entries.append(ReportEntry(r["policy"], metrics_from_dict(r)))
    return ComparisonReport(doc.get("workload", ""), tuple(entries))


def metrics_table(metrics: ScheduleMetrics) -> str:
    lines = [f"{'task':<6} {'completion':>10} {'turnaround':>10} {'waiting':>8}"]
    for m in metrics.per_task:
        lines.append(
            f"{m.id:<6} {format_time(m.completion):>10} {format_time(m.turnaround):>10} {format_time(m.waiting):>8}"
        )
    lines.append(f"Average Waiting Time: {fmt2(metrics.avg_waiting)}")
    lines.append(f"Average Turn Around Time: {fmt2(metrics.avg_turnaround)}")
    return "\n".join(lines) + "\n"
