"""Master-worker search over independent frontier subtrees.

The frontier is built sequentially up to ``start_depth - 1``; each record
then becomes a task whose whole subtree is explored depth-first by a
worker.  Workers return per-length tallies which the master sums.  The
compiled kernels release the GIL, so a thread pool gives real parallelism
while sharing the read-only tables.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .automorphisms import AutSet, automorphism_set
from .enumeration import (
    Frontier,
    LengthReport,
    Progress,
    SearchOptions,
    _format_record_line,
    extend_frontier,
    iter_levels,
    resolve,
    seed_frontier,
    write_checkpoint,
)
from .groups import GroupTable
from .rewritability import PermutationCache

DEFAULT_START_DEPTH = 4


class TaskFailed(RuntimeError):
    def __init__(self, task_id: int, cause: BaseException):
        super().__init__(f"task {task_id} failed twice: {cause!r}")
        self.task_id = task_id
        self.cause = cause


@dataclass(frozen=True)
class TaskSpec:
    task_id: int
    word: tuple[int, ...]
    stab_ids: tuple[int, ...]  # empty for a trivial stabilizer
    max_length: int

    def to_json(self) -> str:
        return json.dumps(
            {"task_id": self.task_id, "word": list(self.word),
             "stab_ids": list(self.stab_ids), "max_length": self.max_length}
        )

    @classmethod
    def from_json(cls, text: str) -> "TaskSpec":
        d = json.loads(text)
        return cls(d["task_id"], tuple(d["word"]), tuple(d["stab_ids"]), d["max_length"])


@dataclass(frozen=True)
class TaskResult:
    task_id: int
    partial_counts: dict[int, int]
    records: tuple[str, ...] = ()  # audit mode only

    def to_json(self) -> str:
        return json.dumps(
            {"task_id": self.task_id,
             "partial_counts": {str(k): v for k, v in self.partial_counts.items()}}
        )

    @classmethod
    def from_json(cls, text: str) -> "TaskResult":
        d = json.loads(text)
        return cls(d["task_id"], {int(k): v for k, v in d["partial_counts"].items()})


def make_tasks(frontier: Frontier, max_length: int) -> list[TaskSpec]:
    return [
        TaskSpec(
            i,
            tuple(int(x) for x in frontier.words[i]),
            tuple(int(x) for x in frontier.stab_members(i)),
            max_length,
        )
        for i in range(len(frontier))
    ]


def run_task(
    table: GroupTable,
    aut: AutSet,
    task: TaskSpec,
    cache: PermutationCache | None = None,
    *,
    choose: str = "min",
    audit: bool = False,
) -> TaskResult:
    """Tally the non-rewritable descendants of one frontier word.

    ``cache`` is accepted for interface symmetry; the compiled search walks
    permutations in the same lexicographic order without materializing them.
    ``audit`` switches to a level-wise walk that also returns every record
    as a checkpoint line.
    """
    start = len(task.word)
    if audit:
        return _run_task_audit(table, aut, task, choose)
    raw = _kernels.subtree_counts(
        table.mult,
        aut.images,
        np.array(task.word, dtype=np.int32),
        np.array(task.stab_ids, dtype=np.int32),
        task.max_length,
        choose == "max",
        True,
    )
    counts = {r: int(raw[r]) for r in range(start + 1, task.max_length + 1)}
    return TaskResult(task.task_id, counts)


def _run_task_audit(table, aut, task, choose) -> TaskResult:
    frontier = Frontier(
        np.array([task.word], dtype=np.int32),
        np.array([0, len(task.stab_ids)], dtype=np.int64),
        np.array(task.stab_ids, dtype=np.int32),
    )
    options = SearchOptions(choose=choose)
    counts = {r: 0 for r in range(len(task.word) + 1, task.max_length + 1)}
    lines = []
    while frontier.length < task.max_length and len(frontier):
        frontier, _ = extend_frontier(table, aut, frontier, options)
        n = frontier.length
        counts[n] = len(frontier)
        ptr, ids = frontier.stab_ptr, frontier.stab_ids
        lines.extend(
            _format_record_line(n, frontier.words[i], ids[ptr[i]:ptr[i + 1]])
            for i in range(len(frontier))
        )
    return TaskResult(task.task_id, counts, tuple(lines))


@dataclass
class ParallelRun:
    report: LengthReport
    workers: int
    start_depth: int
    tasks: int
    worker_tasks: list[int] = field(default_factory=list)
    wall_time: float = 0.0


TaskRunner = Callable[[GroupTable, AutSet, TaskSpec], TaskResult]


def run_parallel(
    table: GroupTable,
    limit: int,
    start_depth: int = DEFAULT_START_DEPTH,
    workers: int = 1,
    *,
    aut: AutSet | None = None,
    options: SearchOptions | None = None,
    progress: Progress | None = None,
    task_progress: Progress | None = None,
    dispatch_seed: int | None = None,
    audit_path: str | os.PathLike | None = None,
    checkpoint: str | os.PathLike | None = None,
    start: Frontier | None = None,
    counts: dict[int, int] | None = None,
    task_runner: TaskRunner | None = None,
) -> ParallelRun:
    """Sequential prefix, then one task per frontier record.

    ``dispatch_seed`` shuffles the order in which tasks are queued; the
    summed counts do not depend on it.  ``checkpoint`` saves the frontier
    after each sequentially built length; ``start``/``counts`` resume from
    one.  A failing task is retried once
    before the run is aborted with :class:`TaskFailed`.
    """
    if limit < 2:
        raise ValueError("limit must be at least 2")
    if not 2 <= start_depth <= limit:
        raise ValueError("start_depth must satisfy 2 <= start_depth <= limit")
    if workers < 1:
        raise ValueError("workers must be positive")
    t0 = time.perf_counter()
    aut = aut if aut is not None else automorphism_set(table)
    options = options or SearchOptions()
    counts = dict(counts or {})
    frontier = start if start is not None else seed_frontier(table, aut, options.choose)

    for frontier in iter_levels(
        table, aut, min(start_depth - 1, limit), start=frontier, options=options, progress=progress
    ):
        counts[frontier.length] = len(frontier)
        if checkpoint is not None:
            write_checkpoint(checkpoint, table, aut, counts, frontier, options)
    if len(frontier) == 0 and frontier.length not in counts:
        counts[frontier.length + 1] = 0  # no seeds: the trivial group
    if len(frontier) == 0 or frontier.length >= limit:
        report = resolve(counts, limit)
        return ParallelRun(report, workers, start_depth, 0, [0] * workers, time.perf_counter() - t0)

    tasks = make_tasks(frontier, limit)
    order = list(range(len(tasks)))
    if dispatch_seed is not None:
        random.Random(dispatch_seed).shuffle(order)

    if task_runner is None:
        def task_runner(tbl, a, task):
            return run_task(tbl, a, task, choose=options.choose, audit=audit_path is not None)

    totals = {r: 0 for r in range(frontier.length + 1, limit + 1)}
    worker_tasks = [0] * workers
    ids = itertools.count()
    local = threading.local()

    def init_worker():
        local.worker = next(ids)

    def work(task: TaskSpec):
        result = task_runner(table, aut, task)
        return getattr(local, "worker", 0), result

    audit_fh = open(audit_path, "w", encoding="utf-8") if audit_path is not None else None
    try:
        with ThreadPoolExecutor(max_workers=workers, initializer=init_worker) as pool:
            pending = {pool.submit(work, tasks[i]): (tasks[i], 0) for i in order}
            while pending:
                done, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    task, attempt = pending.pop(fut)
                    try:
                        worker, result = fut.result()
                    except Exception as exc:
                        if attempt >= 1:
                            for other in pending:
                                other.cancel()
                            raise TaskFailed(task.task_id, exc) from exc
                        pending[pool.submit(work, task)] = (task, attempt + 1)
                        continue
                    worker_tasks[worker] += 1
                    for r, c in result.partial_counts.items():
                        totals[r] += c
                    if audit_fh is not None:
                        audit_fh.writelines(result.records)
                    if task_progress:
                        task_progress(
                            f"task {task.task_id} on worker {worker}: "
                            + " ".join(f"{r}:{c}" for r, c in sorted(result.partial_counts.items()))
                        )
    finally:
        if audit_fh is not None:
            audit_fh.close()

    counts.update(totals)
    report = resolve(counts, limit)
    if progress:
        for r in sorted(totals):
            if r not in report.counts:
                break
            progress(f"Started enumeration of NRW of length {r}")
            progress(f"{report.counts[r]} NRW of length {r} constructed")
    return ParallelRun(report, workers, start_depth, len(tasks), worker_tasks, time.perf_counter() - t0)


def rewritability_parallel(
    table: GroupTable,
    limit: int,
    start_depth: int = DEFAULT_START_DEPTH,
    workers: int = 1,
    **kwargs,
) -> LengthReport:
    return run_parallel(table, limit, start_depth, workers, **kwargs).report


@dataclass
class ScalingRow:
    workers: int
    wall_time: float
    speedup: float
    efficiency: float


def scaling_table(
    table: GroupTable,
    limit: int,
    start_depth: int,
    worker_counts: Sequence[int],
    *,
    aut: AutSet | None = None,
    baseline: float | None = None,
) -> list[ScalingRow]:
    """Time the parallel search for several worker counts.

    Speedup is relative to ``baseline`` seconds, or to a fresh 1-worker run
    when no baseline is given; efficiency is speedup per worker.
    """
    aut = aut if aut is not None else automorphism_set(table)
    if baseline is None:
        baseline = run_parallel(table, limit, start_depth, 1, aut=aut).wall_time
    rows = []
    for w in worker_counts:
        elapsed = run_parallel(table, limit, start_depth, w, aut=aut).wall_time
        speedup = baseline / elapsed if elapsed > 0 else float("inf")
        rows.append(ScalingRow(w, elapsed, speedup, speedup / w))
    return rows
