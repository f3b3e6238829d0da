"""Event-driven single-CPU scheduler.

Four policies share one simulation loop and differ only in the priority key
and in whether an arrival may interrupt the running task:

* ``sjf``: shortest burst first, non-preemptive.
* ``static_priority``: highest static priority first, non-preemptive.
* ``fuzzy_priority``: highest precomputed fuzzy priority first, non-preemptive.
* ``modified_fuzzy``: highest fuzzy new priority first; a task is interrupted
  when a newly arrived task has a strictly higher new priority.

Larger priority values win. Ties go to the earlier arrival, then to the
lexicographically smaller id.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .fuzzy import FuzzyEngine, default_engine


class WorkloadError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Task:
    id: str
    burst: float
    arrival: float = 0
    static_priority: float | None = None
    # priority computed by an earlier fuzzy scheduler, replayed as data
    external_priority: float | None = None
    # recorded new priority, used instead of inference in replay mode
    new_priority: float | None = None


@dataclass(frozen=True)
class PrioritizedTask:
    task: Task
    new_priority: float

    @property
    def id(self) -> str:
        return self.task.id


@dataclass(frozen=True)
class Segment:
    task_id: str
    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start


class PolicyKind(str, Enum):
    SJF = "sjf"
    STATIC_PRIORITY = "static_priority"
    FUZZY_PRIORITY = "fuzzy_priority"
    MODIFIED_FUZZY = "modified_fuzzy"


_ALIASES = {"priority": PolicyKind.STATIC_PRIORITY, "static": PolicyKind.STATIC_PRIORITY}


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    engine: FuzzyEngine | None = field(default=None, compare=False)
    replay: bool = False

    @classmethod
    def parse(cls, name: str | PolicyKind | Policy, engine: FuzzyEngine | None = None,
              replay: bool = False) -> Policy:
        if isinstance(name, Policy):
            return name
        if isinstance(name, PolicyKind):
            return cls(name, engine, replay)
        key = name.strip().lower().replace("-", "_")
        try:
            kind = _ALIASES.get(key) or PolicyKind(key)
        except ValueError:
            known = ", ".join([k.value for k in PolicyKind] + list(_ALIASES))
            raise ValueError(f"unknown policy {name!r} (known: {known})") from None
        return cls(kind, engine, replay)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def preemptive(self) -> bool:
        return self.kind is PolicyKind.MODIFIED_FUZZY


@dataclass(frozen=True)
class Schedule:
    segments: tuple[Segment, ...]
    tasks: tuple[Task, ...]
    policy: str = ""

    @property
    def makespan(self) -> float:
        return self.segments[-1].end if self.segments else 0

    def order(self) -> list[str]:
        return [s.task_id for s in self.segments]

    def boundaries(self) -> list[float]:
        """Timeline instants from time 0, including both edges of idle gaps."""
        out: list[float] = [0] if self.segments else []
        for s in self.segments:
            if not out or out[-1] != s.start:
                out.append(s.start)
            out.append(s.end)
        return out

    def for_task(self, task_id: str) -> list[Segment]:
        return [s for s in self.segments if s.task_id == task_id]


def validate_workload(tasks: Iterable[Task], policy: Policy | str | None = None) -> list[str]:
    """Return human-readable violations; an empty list means the workload is usable."""
    tasks = list(tasks)
    problems: list[str] = []
    rows: dict[str, list[int]] = {}
    for i, t in enumerate(tasks, start=1):
        rows.setdefault(t.id, []).append(i)
        if not t.id:
            problems.append(f"row {i}: empty task id")
        if not _finite(t.burst) or t.burst <= 0:
            problems.append(f"task {t.id} (row {i}): burst must be positive, got {t.burst}")
        if not _finite(t.arrival) or t.arrival < 0:
            problems.append(f"task {t.id} (row {i}): arrival must be non-negative, got {t.arrival}")
    for tid, where in rows.items():
        if len(where) > 1:
            problems.append(f"duplicate id {tid!r} on rows {', '.join(map(str, where))}")

    if policy is not None:
        policy = Policy.parse(policy)
        needed = _required_field(policy, tasks)
        if needed:
            for i, t in enumerate(tasks, start=1):
                v = getattr(t, needed)
                if v is None or not _finite(v):
                    problems.append(f"task {t.id} (row {i}): {policy.name} needs {needed}")
    return problems


def _finite(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def _required_field(policy: Policy, tasks: Sequence[Task]) -> str | None:
    kind = policy.kind
    if kind is PolicyKind.STATIC_PRIORITY:
        return "static_priority"
    if kind is PolicyKind.FUZZY_PRIORITY:
        if all(t.external_priority is not None for t in tasks):
            return None
        return "static_priority"
    if kind is PolicyKind.MODIFIED_FUZZY:
        return "new_priority" if policy.replay else "static_priority"
    return None


def assign_new_priorities(
    tasks: Iterable[Task],
    engine: FuzzyEngine | None = None,
    *,
    replay: str | None = None,
) -> list[PrioritizedTask]:
    """Attach a new priority to every task.

    By default the priority is inferred from ``(static_priority, burst)``.
    ``replay`` names a task field (``"new_priority"`` or
    ``"external_priority"``) whose recorded value is copied instead, for tasks
    that carry it.
    """
    tasks = list(tasks)
    if replay is not None and replay not in ("new_priority", "external_priority"):
        raise ValueError(f"cannot replay field {replay!r}")
    out = []
    pending = []
    for t in tasks:
        recorded = getattr(t, replay) if replay else None
        if recorded is None:
            if t.static_priority is None:
                raise WorkloadError([f"task {t.id}: static_priority needed to infer a new priority"])
            pending.append(t)
        out.append(recorded)
    if pending:
        engine = engine or default_engine()
        inferred = iter(engine.infer_many([[t.static_priority, t.burst] for t in pending]).tolist())
        out = [next(inferred) if v is None else v for v in out]
    return [PrioritizedTask(t, float(v)) for t, v in zip(tasks, out)]


def priority_keys(tasks: Sequence[Task], policy: Policy) -> dict[str, float]:
    """Per-task value the policy ranks by; larger means dispatched earlier."""
    kind = policy.kind
    if kind is PolicyKind.SJF:
        return {t.id: -t.burst for t in tasks}
    if kind is PolicyKind.STATIC_PRIORITY:
        return {t.id: t.static_priority for t in tasks}
    if kind is PolicyKind.FUZZY_PRIORITY:
        if all(t.external_priority is not None for t in tasks):
            return {t.id: t.external_priority for t in tasks}
        return {p.id: p.new_priority for p in assign_new_priorities(tasks, policy.engine)}
    replay = "new_priority" if policy.replay else None
    return {p.id: p.new_priority for p in assign_new_priorities(tasks, policy.engine, replay=replay)}


def simulate(tasks: Iterable[Task], policy: Policy | str, engine: FuzzyEngine | None = None) -> Schedule:
    """Run ``tasks`` under ``policy`` and return the resulting Gantt chart."""
    tasks = tuple(tasks)
    policy = Policy.parse(policy, engine)
    if engine is not None and policy.engine is None:
        policy = replace(policy, engine=engine)
    problems = validate_workload(tasks, policy)
    if problems:
        raise WorkloadError(problems)
    if not tasks:
        return Schedule((), (), policy.name)

    prio = priority_keys(tasks, policy)
    by_id = {t.id: t for t in tasks}

    def rank(t: Task):
        return (-prio[t.id], t.arrival, t.id)

    arrivals = sorted(tasks, key=lambda t: (t.arrival, t.id))
    remaining = {t.id: t.burst for t in tasks}
    ready: list[tuple] = []
    segments: list[Segment] = []
    nxt = 0
    now = arrivals[0].arrival

    def admit(upto):
        nonlocal nxt
        fresh = []
        while nxt < len(arrivals) and arrivals[nxt].arrival <= upto:
            t = arrivals[nxt]
            heapq.heappush(ready, (rank(t), t.id))
            fresh.append(t)
            nxt += 1
        return fresh

    def emit(tid, start, end):
        if segments and segments[-1].task_id == tid and segments[-1].end == start:
            segments[-1] = Segment(tid, segments[-1].start, end)
        else:
            segments.append(Segment(tid, start, end))

    admit(now)
    while ready or nxt < len(arrivals):
        if not ready:
            now = max(now, arrivals[nxt].arrival)
            admit(now)
        _, tid = heapq.heappop(ready)
        current = by_id[tid]
        while True:
            finish = now + remaining[tid]
            next_arrival = arrivals[nxt].arrival if nxt < len(arrivals) else None
            if not policy.preemptive or next_arrival is None or next_arrival >= finish:
                emit(tid, now, finish)
                now = finish
                remaining[tid] = 0
                admit(now)
                break
            emit(tid, now, next_arrival)
            remaining[tid] -= next_arrival - now
            now = next_arrival
            fresh = admit(now)
            if any(rank(t) < rank(current) for t in fresh):
                heapq.heappush(ready, (rank(current), tid))
                break
    return Schedule(tuple(segments), tasks, policy.name)
