import pytest

from rewritelen.automorphisms import automorphism_set
from rewritelen.enumeration import iter_levels, rewritability_length, seed_frontier
from rewritelen.groups import builtin_group
from rewritelen.parallel import (
    TaskFailed,
    TaskResult,
    TaskSpec,
    make_tasks,
    rewritability_parallel,
    run_parallel,
    run_task,
    scaling_table,
)

GROUPS = [("symmetric", 3), ("quaternion", 8), ("alternating", 4), ("symmetric", 4), ("dihedral", 6)]


@pytest.mark.parametrize("family,n", GROUPS)
@pytest.mark.parametrize("workers", [1, 2, 4, 8])
def test_matches_sequential(family, n, workers):
    t = builtin_group(family, n)
    auts = automorphism_set(t)
    expected = rewritability_length(t, 10, aut=auts)
    for start_depth in (2, 3, 4):
        assert rewritability_parallel(t, 10, start_depth, workers, aut=auts) == expected


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_dispatch_order_irrelevant(seed):
    t = builtin_group("symmetric", 4)
    expected = rewritability_length(t, 10)
    assert rewritability_parallel(t, 10, 3, 4, dispatch_seed=seed) == expected


def test_limit_failure_matches_sequential():
    t = builtin_group("symmetric", 4)
    for limit in (4, 5):
        seq = rewritability_length(t, limit)
        par = rewritability_parallel(t, limit, 3, 2)
        assert seq == par and par.failed


def test_abelian_dispatches_nothing():
    run = run_parallel(builtin_group("cyclic", 9), 10, 4, 4)
    assert run.report.result == 2 and run.report.counts == {2: 0}
    assert run.tasks == 0


def test_bad_arguments():
    t = builtin_group("symmetric", 3)
    with pytest.raises(ValueError):
        run_parallel(t, 10, 11, 2)
    with pytest.raises(ValueError):
        run_parallel(t, 10, 1, 2)
    with pytest.raises(ValueError):
        run_parallel(t, 10, 4, 0)


def test_task_partition_is_complete():
    t = builtin_group("symmetric", 4)
    auts = automorphism_set(t)
    levels = list(iter_levels(t, auts, 10))
    frontier3 = levels[1]
    tasks = make_tasks(frontier3, 10)
    totals = {}
    for task in tasks:
        for r, c in run_task(t, auts, task).partial_counts.items():
            totals[r] = totals.get(r, 0) + c
    for lvl in levels[2:]:
        assert totals[lvl.length] == len(lvl)


def test_dead_task_and_idempotence():
    t = builtin_group("quaternion", 8)
    auts = automorphism_set(t)
    (level2,) = [f for f in iter_levels(t, auts, 2)]
    (task,) = make_tasks(level2, 6)
    result = run_task(t, auts, task)
    assert all(c == 0 for c in result.partial_counts.values())
    assert run_task(t, auts, task) == result


def test_task_json_roundtrip():
    t = builtin_group("symmetric", 4)
    auts = automorphism_set(t)
    for task in make_tasks(seed_frontier(t, auts), 6):
        assert TaskSpec.from_json(task.to_json()) == task
        result = run_task(t, auts, task)
        assert TaskResult.from_json(result.to_json()) == result


def test_audit_stream(tmp_path):
    t = builtin_group("symmetric", 4)
    path = tmp_path / "audit.txt"
    report = rewritability_parallel(t, 10, 3, 2, audit_path=path)
    lines = path.read_text().splitlines()
    by_length = {}
    for line in lines:
        r = int(line.split()[0])
        by_length[r] = by_length.get(r, 0) + 1
    assert by_length == {r: c for r, c in report.counts.items() if r >= 3 and c}


def test_failing_task_is_retried_then_reported():
    t = builtin_group("symmetric", 4)
    attempts = {}

    def flaky(tbl, a, task):
        attempts[task.task_id] = attempts.get(task.task_id, 0) + 1
        if task.task_id == 5 and attempts[task.task_id] == 1:
            raise RuntimeError("lost worker")
        return run_task(tbl, a, task)

    assert rewritability_parallel(t, 10, 3, 2, task_runner=flaky) == rewritability_length(t, 10)
    assert attempts[5] == 2

    def broken(tbl, a, task):
        if task.task_id == 7:
            raise RuntimeError("always fails")
        return run_task(tbl, a, task)

    with pytest.raises(TaskFailed) as info:
        run_parallel(t, 10, 3, 2, task_runner=broken)
    assert info.value.task_id == 7


def test_worker_task_totals():
    run = run_parallel(builtin_group("symmetric", 4), 10, 4, 3)
    assert sum(run.worker_tasks) == run.tasks == 236
    assert len(run.worker_tasks) == 3


def test_scaling_rows():
    rows = scaling_table(builtin_group("symmetric", 4), 10, 3, [1, 2], baseline=1.0)
    assert [r.workers for r in rows] == [1, 2]
    for r in rows:
        assert r.speedup == pytest.approx(1.0 / r.wall_time)
        assert r.efficiency == pytest.approx(r.speedup / r.workers)
