"""Waiting and turnaround times for schedules, and multi-policy comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .fuzzy import FuzzyEngine
from .scheduling import Policy, Schedule, Task, simulate


class IntegrityError(ValueError):
    """Schedule does not fully serve its workload."""


@dataclass(frozen=True)
class TaskMetrics:
    id: str
    completion: float
    turnaround: float
    waiting: float


@dataclass(frozen=True)
class ScheduleMetrics:
    per_task: tuple[TaskMetrics, ...]
    avg_waiting: float
    avg_turnaround: float

    def task(self, task_id: str) -> TaskMetrics:
        for m in self.per_task:
            if m.id == task_id:
                return m
        raise KeyError(task_id)


def compute_metrics(schedule: Schedule) -> ScheduleMetrics:
    """Per-task completion, turnaround and waiting time plus their means.

    Waiting is ``turnaround - burst``, so time lost to preemption counts as
    waiting.
    """
    completion: dict[str, float] = {}
    served: dict[str, float] = {}
    for seg in schedule.segments:
        completion[seg.task_id] = max(completion.get(seg.task_id, seg.end), seg.end)
        served[seg.task_id] = served.get(seg.task_id, 0) + (seg.end - seg.start)

    ids = {t.id for t in schedule.tasks}
    stray = sorted(set(completion) - ids)
    if stray:
        raise IntegrityError(f"segments for unknown tasks: {', '.join(stray)}")

    rows = []
    for t in schedule.tasks:
        if t.id not in completion:
            raise IntegrityError(f"task {t.id} never runs")
        if not math.isclose(served[t.id], t.burst, rel_tol=1e-9, abs_tol=1e-12):
            raise IntegrityError(f"task {t.id} served {served[t.id]} of burst {t.burst}")
        turnaround = completion[t.id] - t.arrival
        rows.append(TaskMetrics(t.id, completion[t.id], turnaround, turnaround - t.burst))

    n = len(rows)
    if n == 0:
        return ScheduleMetrics((), 0.0, 0.0)
    return ScheduleMetrics(
        tuple(rows),
        sum(r.waiting for r in rows) / n,
        sum(r.turnaround for r in rows) / n,
    )


@dataclass(frozen=True)
class ReportEntry:
    policy: str
    metrics: ScheduleMetrics | None = None
    error: str | None = None


@dataclass(frozen=True)
class ComparisonReport:
    workload: str
    entries: tuple[ReportEntry, ...] = field(default_factory=tuple)

    def __getitem__(self, policy: str) -> ReportEntry:
        for e in self.entries:
            if e.policy == policy:
                return e
        raise KeyError(policy)

    def avg_waiting(self) -> dict[str, float]:
        return {e.policy: e.metrics.avg_waiting for e in self.entries if e.metrics}


DEFAULT_POLICIES = ("priority", "sjf", "fuzzy_priority", "modified_fuzzy")


def compare(
    tasks: Sequence[Task],
    policies: Iterable[Policy | str] = DEFAULT_POLICIES,
    *,
    engine: FuzzyEngine | None = None,
    replay: bool = False,
    workload: str = "",
    labels: Sequence[str] | None = None,
) -> ComparisonReport:
    """Simulate each policy on the same tasks.

    A failing policy is reported in its own entry and does not stop the others.
    """
    entries = []
    policies = list(policies)
    if labels is not None and len(labels) != len(policies):
        raise ValueError("one label per policy required")
    for i, p in enumerate(policies):
        label = labels[i] if labels is not None else (p.name if isinstance(p, Policy) else str(p))
        try:
            pol = Policy.parse(p, engine, replay)
            metrics = compute_metrics(simulate(tasks, pol, engine))
        except (ValueError, ArithmeticError) as exc:
            entries.append(ReportEntry(label, error=str(exc)))
        else:
            entries.append(ReportEntry(label, metrics))
    return ComparisonReport(workload, tuple(entries))
