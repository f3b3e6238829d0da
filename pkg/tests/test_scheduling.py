import random

import pytest

from fuzzysched.fuzzy import default_engine
from fuzzysched.metrics import compute_metrics
from fuzzysched.scheduling import (
    Policy,
    Task,
    WorkloadError,
    assign_new_priorities,
    priority_keys,
    simulate,
    validate_workload,
)

from oracles import brute_force_best_avg_waiting, schedule_violations, stepped_schedule

POLICIES = ["sjf", "static_priority", "fuzzy_priority", "modified_fuzzy"]


def _segs(schedule):
    return [(s.task_id, s.start, s.end) for s in schedule.segments]


def random_workload(rng, n_max=20, zero_arrivals=False, external=False):
    n = rng.randint(1, n_max)
    tasks = []
    for i in range(n):
        tasks.append(
            Task(
                id=f"T{i:02d}",
                burst=rng.randint(1, 30),
                arrival=0 if zero_arrivals else rng.randint(0, 20),
                static_priority=rng.randint(0, 10),
                external_priority=round(rng.uniform(0, 10), 3) if external else None,
            )
        )
    return tasks


def test_table2_sjf(cs1):
    assert _segs(simulate(cs1, "sjf")) == [
        ("P1", 0, 3), ("P3", 3, 9), ("P5", 9, 17), ("P4", 17, 26), ("P2", 26, 50)
    ]


def test_table3_static_priority(cs1_arrival):
    assert _segs(simulate(cs1_arrival, "static_priority")) == [
        ("P5", 0, 8), ("P1", 8, 11), ("P2", 11, 35), ("P4", 35, 44), ("P3", 44, 50)
    ]


def test_table3_modified_fuzzy_replay(cs1_arrival):
    sched = simulate(cs1_arrival, Policy.parse("modified_fuzzy", replay=True))
    assert _segs(sched) == [
        ("P5", 0, 1), ("P4", 1, 2), ("P1", 2, 5), ("P3", 5, 11),
        ("P4", 11, 19), ("P5", 19, 26), ("P2", 26, 50),
    ]


def test_idle_before_first_arrival():
    sched = simulate([Task("P", 5, 7, 3)], "sjf")
    assert _segs(sched) == [("P", 7, 12)]
    assert sched.boundaries() == [0, 7, 12]


def test_idle_gap_between_tasks():
    tasks = [Task("A", 2, 0, 1), Task("B", 3, 10, 1)]
    for p in POLICIES:
        assert _segs(simulate(tasks, p)) == [("A", 0, 2), ("B", 10, 13)]


def test_empty_workload():
    for p in POLICIES:
        assert simulate([], p).segments == ()


def test_validate_workload(cs1):
    assert validate_workload(cs1) == []
    assert validate_workload(cs1, "modified_fuzzy") == []
    bad = [Task("P1", 0, 0, 1)]
    (msg,) = validate_workload(bad)
    assert "P1" in msg and "burst" in msg
    dup = [Task("P1", 3, 0, 1), Task("P2", 4, 0, 1), Task("P1", 5, 0, 1)]
    (msg,) = validate_workload(dup)
    assert "'P1'" in msg and "rows 1, 3" in msg
    assert validate_workload([Task("P1", 3, -1, 1)])
    # policy-specific requirements
    no_prio = [Task("A", 3)]
    assert validate_workload(no_prio, "sjf") == []
    assert validate_workload(no_prio, "static_priority")
    assert validate_workload(no_prio, Policy.parse("modified_fuzzy", replay=True))
    with pytest.raises(WorkloadError):
        simulate(no_prio, "static_priority")
    with pytest.raises(WorkloadError):
        simulate(bad, "sjf")


def test_unknown_policy():
    with pytest.raises(ValueError, match="unknown policy"):
        Policy.parse("round_robin")
    assert Policy.parse("priority").kind.value == "static_priority"


def test_assign_new_priorities_inferred(cs1):
    out = assign_new_priorities(cs1)
    engine = default_engine()
    for p, t in zip(out, cs1):
        assert p.task == t
        assert p.new_priority == engine.infer(t.static_priority, t.burst)


def test_assign_new_priorities_single():
    t = Task("X", 4, 2, 7)
    (p,) = assign_new_priorities([t])
    assert p.task is t


def test_assign_new_priorities_replay(cs1):
    out = assign_new_priorities(cs1, replay="external_priority")
    assert [p.new_priority for p in out] == [5.961, 4.407, 4.891, 5.081, 4.967]
    out = assign_new_priorities(cs1, replay="new_priority")
    assert [p.new_priority for p in out] == [7.66, 2.72, 5.41, 5.31, 4.22]


def test_fuzzy_priority_falls_back_to_inference(cs1):
    stripped = [Task(t.id, t.burst, t.arrival, t.static_priority) for t in cs1]
    keys = priority_keys(stripped, Policy.parse("fuzzy_priority"))
    assert keys == {p.id: p.new_priority for p in assign_new_priorities(stripped)}


def test_equal_priority_arrival_does_not_preempt():
    tasks = [
        Task("A", 5, 0, new_priority=5.0),
        Task("B", 2, 1, new_priority=5.0),
        Task("C", 2, 2, new_priority=5.5),
    ]
    sched = simulate(tasks, Policy.parse("modified_fuzzy", replay=True))
    assert _segs(sched) == [("A", 0, 2), ("C", 2, 4), ("A", 4, 7), ("B", 7, 9)]


def test_tie_break_arrival_then_id():
    tasks = [Task("B", 3, 0, 4), Task("A", 3, 0, 4), Task("C", 3, 1, 4), Task("D", 1, 0, 4)]
    assert [s.task_id for s in simulate(tasks, "static_priority").segments] == ["A", "B", "D", "C"]


def _rank_key(tasks, policy):
    prio = priority_keys(tasks, policy)
    return lambda t: (-prio[t.id], t.arrival, t.id)


@pytest.mark.parametrize("name", POLICIES)
def test_invariants_random_workloads(name):
    rng = random.Random(hash(name) % 10_000)
    for _ in range(1000):
        tasks = random_workload(rng, external=rng.random() < 0.5)
        policy = Policy.parse(name)
        sched = simulate(tasks, policy)
        assert schedule_violations(sched) == []
        if policy.preemptive:
            assert len(sched.segments) >= len(tasks)
        else:
            assert len(sched.segments) == len(tasks)
        if min(t.arrival for t in tasks) == 0 and len(sched.boundaries()) == len(sched.segments) + 1:
            assert sched.makespan == sum(t.burst for t in tasks)
        m = compute_metrics(sched)
        for tm, t in zip(m.per_task, tasks):
            assert tm.turnaround == tm.completion - t.arrival
            assert tm.waiting == tm.turnaround - t.burst
            assert tm.waiting >= 0


@pytest.mark.parametrize("name", POLICIES)
def test_matches_unit_step_reference(name):
    rng = random.Random(99)
    for _ in range(200):
        tasks = random_workload(rng, n_max=8)
        policy = Policy.parse(name)
        expected = stepped_schedule(tasks, _rank_key(tasks, policy), policy.preemptive)
        assert _segs(simulate(tasks, policy)) == expected


def test_sjf_optimal_for_zero_arrivals():
    rng = random.Random(5)
    for _ in range(150):
        tasks = random_workload(rng, n_max=6, zero_arrivals=True)
        got = compute_metrics(simulate(tasks, "sjf")).avg_waiting
        assert got <= brute_force_best_avg_waiting([t.burst for t in tasks]) + 1e-12


def test_modified_fuzzy_zero_arrivals_is_descending_np():
    rng = random.Random(17)
    for _ in range(300):
        tasks = random_workload(rng, zero_arrivals=True)
        sched = simulate(tasks, "modified_fuzzy")
        nps = {p.id: p.new_priority for p in assign_new_priorities(tasks)}
        order = sorted(tasks, key=lambda t: (-nps[t.id], t.arrival, t.id))
        t0 = 0
        expected = []
        for t in order:
            expected.append((t.id, t0, t0 + t.burst))
            t0 += t.burst
        assert _segs(sched) == expected


def test_deterministic(cs1_arrival):
    for p in POLICIES:
        assert simulate(cs1_arrival, p) == simulate(cs1_arrival, p)


def test_real_valued_times():
    tasks = [Task("A", 2.5, 0, 3), Task("B", 1.25, 0.5, 9)]
    sched = simulate(tasks, Policy.parse("static_priority"))
    assert _segs(sched) == [("A", 0, 2.5), ("B", 2.5, 3.75)]
    pre = simulate(
        [Task("A", 2.5, 0, new_priority=1), Task("B", 1.25, 0.5, new_priority=9)],
        Policy.parse("modified_fuzzy", replay=True),
    )
    assert _segs(pre) == [("A", 0, 0.5), ("B", 0.5, 1.75), ("A", 1.75, 3.75)]
