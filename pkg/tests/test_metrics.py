import random

import pytest

from fuzzysched.metrics import IntegrityError, compare, compute_metrics
from fuzzysched.scheduling import Policy, Schedule, Segment, Task, simulate

from oracles import prefix_sum_avg_waiting
from test_scheduling import random_workload


def test_sjf_case_study(cs1):
    m = compute_metrics(simulate(cs1, "sjf"))
    assert (m.avg_waiting, m.avg_turnaround) == (11.0, 21.0)


def test_static_priority_case_study(cs1):
    m = compute_metrics(simulate(cs1, "priority"))
    assert (m.avg_waiting, m.avg_turnaround) == (22, 32)


def test_modified_fuzzy_with_arrivals(cs1_arrival):
    m = compute_metrics(simulate(cs1_arrival, Policy.parse("modified_fuzzy", replay=True)))
    assert m.avg_turnaround == 21.0
    # hand-summed from the chart: waits P1..P5 = 0, 25, 3, 9, 18
    assert [t.waiting for t in m.per_task] == [0, 25, 3, 9, 18]
    assert m.avg_waiting == 11.0


def test_single_task():
    m = compute_metrics(simulate([Task("A", 7, 0, 1)], "sjf"))
    assert m.task("A").waiting == 0 and m.task("A").turnaround == 7


def test_empty_schedule():
    m = compute_metrics(simulate([], "sjf"))
    assert m.per_task == () and m.avg_waiting == 0.0


def test_integrity_errors():
    tasks = (Task("A", 3), Task("B", 2))
    with pytest.raises(IntegrityError, match="B"):
        compute_metrics(Schedule((Segment("A", 0, 3),), tasks))
    with pytest.raises(IntegrityError, match="served"):
        compute_metrics(Schedule((Segment("A", 0, 2), Segment("B", 2, 4)), tasks))
    with pytest.raises(IntegrityError, match="unknown"):
        compute_metrics(Schedule((Segment("A", 0, 3), Segment("B", 3, 5), Segment("Z", 5, 6)), tasks))


def test_identities_and_prefix_sum_cross_check():
    rng = random.Random(2024)
    for _ in range(200):
        tasks = random_workload(rng, zero_arrivals=True)
        for name in ("sjf", "static_priority", "fuzzy_priority"):
            sched = simulate(tasks, name)
            m = compute_metrics(sched)
            order = [next(t.burst for t in tasks if t.id == s.task_id) for s in sched.segments]
            assert m.avg_waiting == pytest.approx(prefix_sum_avg_waiting(order), abs=1e-12)
            mean_burst = sum(t.burst for t in tasks) / len(tasks)
            assert m.avg_turnaround - m.avg_waiting == pytest.approx(mean_burst, abs=1e-12)


def test_compare_case_study_no_arrival(cs1):
    report = compare(cs1, replay=True, workload="cs1")
    assert [e.policy for e in report.entries] == ["priority", "sjf", "fuzzy_priority", "modified_fuzzy"]
    assert report.avg_waiting() == {"priority": 22, "sjf": 11.0, "fuzzy_priority": 12.2, "modified_fuzzy": 11.2}


def test_compare_case_study_arrival(cs1_arrival):
    report = compare(cs1_arrival, ["priority", "sjf", "fuzzy_priority"])
    assert report.avg_waiting() == {"priority": 18.4, "sjf": 11.2, "fuzzy_priority": 11.8}


def test_compare_single_and_failures():
    tasks = [Task("A", 3), Task("B", 1, 1)]
    report = compare(tasks, ["sjf"])
    assert len(report.entries) == 1
    report = compare(tasks, ["static_priority", "sjf", "bogus"])
    assert report["static_priority"].error and report["static_priority"].metrics is None
    assert report["sjf"].metrics.avg_waiting == 1.0
    assert "unknown policy" in report["bogus"].error


def test_compare_labels_and_policy_objects(cs1):
    report = compare(cs1, [Policy.parse("modified_fuzzy", replay=True)], labels=["mf-replay"])
    assert report["mf-replay"].metrics.avg_waiting == 11.2
