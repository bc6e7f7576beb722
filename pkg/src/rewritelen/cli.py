"""Command-line front end.

Exit codes: 0 length found, 3 limit reached, 1 usage error,
2 resource or internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from typing import Sequence, TextIO

from .automorphisms import TooManyAutomorphisms, automorphism_set
from .enumeration import (
    DEFAULT_MAX_FRONTIER,
    CheckpointMismatch,
    ResourceLimit,
    SearchOptions,
    load_checkpoint,
    resolve,
    rewritability_length,
)
from .groups import (
    DEFAULT_ORDER_CAP,
    GroupTable,
    GroupTooLarge,
    build_group_from_generators,
    builtin_group,
    read_generator_file,
)
from .parallel import DEFAULT_START_DEPTH, TaskFailed, run_parallel, scaling_table
from .report import build_report, to_json, to_table

EXIT_FOUND = 0
EXIT_USAGE = 1
EXIT_RESOURCE = 2
EXIT_LIMIT = 3

log = logging.getLogger("rewritelen")

_FAMILIES = {"alt": "alternating", "sym": "symmetric", "cyclic": "cyclic", "dihedral": "dihedral"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    group_spec: str
    limit: int = 10
    mode: str = "sequential"
    start_depth: int = DEFAULT_START_DEPTH
    workers: int = 1
    output_format: str = "json"
    checkpoint_path: str | None = None
    resume_path: str | None = None
    verbosity: int = 0
    max_frontier: int = DEFAULT_MAX_FRONTIER
    order_cap: int = DEFAULT_ORDER_CAP
    audit_path: str | None = None
    dispatch_seed: int | None = None
    scaling: tuple[int, ...] = ()
    baseline_ms: float | None = None


def parse_group_spec(spec: str, *, order_cap: int = DEFAULT_ORDER_CAP) -> GroupTable:
    """``alt:N``, ``sym:N``, ``cyclic:N``, ``dihedral:N``, ``q8`` or ``file:PATH``."""
    spec = spec.strip()
    if spec == "q8":
        return builtin_group("quaternion", 8, order_cap=order_cap)
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise UsageError(f"cannot parse group spec {spec!r}")
    if kind == "file":
        try:
            gens = read_generator_file(arg)
        except OSError as exc:
            raise UsageError(f"cannot read generator file: {exc}") from exc
        try:
            return build_group_from_generators(gens, order_cap=order_cap, description=spec)
        except GroupTooLarge:
            raise
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if kind not in _FAMILIES or not arg.isdigit():
        raise UsageError(f"cannot parse group spec {spec!r}")
    try:
        return builtin_group(_FAMILIES[kind], int(arg), order_cap=order_cap)
    except GroupTooLarge:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def run(config: RunConfig, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    if config.limit < 2:
        raise UsageError("--limit must be at least 2")
    if config.mode not in ("sequential", "parallel"):
        raise UsageError(f"unknown mode {config.mode!r}")
    if config.output_format not in ("json", "table"):
        raise UsageError(f"unknown format {config.output_format!r}")

    t0 = time.perf_counter()
    table = parse_group_spec(config.group_spec, order_cap=config.order_cap)
    aut = automorphism_set(table)
    options = SearchOptions(max_frontier=config.max_frontier)
    progress = log.info if config.verbosity >= 1 else None

    parallel_info = None
    if config.mode == "sequential":
        report = rewritability_length(
            table,
            config.limit,
            aut=aut,
            options=options,
            progress=progress,
            checkpoint=config.checkpoint_path,
            resume=config.resume_path,
        )
    else:
        if not 2 <= config.start_depth <= config.limit:
            raise UsageError("--start-depth must lie between 2 and --limit")
        if config.workers < 1:
            raise UsageError("--workers must be positive")
        start = counts = None
        if config.resume_path is not None:
            counts, start = load_checkpoint(config.resume_path, table, aut, options)
        if counts and counts[max(counts)] == 0:
            report = resolve(counts, config.limit)
            parallel_info = {"workers": config.workers, "start_depth": config.start_depth,
                             "tasks": 0, "worker_tasks": [0] * config.workers}
        else:
            par = run_parallel(
                table,
                config.limit,
                config.start_depth,
                config.workers,
                aut=aut,
                options=options,
                progress=progress,
                task_progress=log.debug if config.verbosity >= 2 else None,
                dispatch_seed=config.dispatch_seed,
                audit_path=config.audit_path,
                checkpoint=config.checkpoint_path,
                start=start,
                counts=counts,
            )
            report = par.report
            parallel_info = {"workers": par.workers, "start_depth": par.start_depth,
                             "tasks": par.tasks, "worker_tasks": par.worker_tasks}
    wall = time.perf_counter() - t0

    scaling = None
    if config.scaling:
        baseline = config.baseline_ms / 1000.0 if config.baseline_ms else None
        scaling = scaling_table(
            table, config.limit, config.start_depth, config.scaling, aut=aut, baseline=baseline
        )

    data = build_report(
        group=table.description or config.group_spec,
        fingerprint=table.fingerprint,
        order=table.order,
        aut_size=aut.size,
        mode=config.mode,
        report=report,
        wall_time=wall,
        parallel=parallel_info,
        scaling=scaling,
    )
    stdout.write((to_json(data) if config.output_format == "json" else to_table(data)) + "\n")
    return EXIT_LIMIT if report.failed else EXIT_FOUND


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _worker_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad worker list {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bad worker list {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="rewritelen",
        description="Rewritability length of a small finite group.",
    )
    p.add_argument("--group", required=True,
                   help="alt:N, sym:N, cyclic:N, dihedral:N, q8 or file:PATH")
    p.add_argument("--limit", type=int, default=10, help="largest length to try (default 10)")
    p.add_argument("--mode", choices=["seq", "sequential", "par", "parallel"], default="seq")
    p.add_argument("--start-depth", type=int, default=DEFAULT_START_DEPTH,
                   help="length at which parallel tasks start (default 4)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", dest="output_format", choices=["json", "table"], default="json")
    p.add_argument("--checkpoint", help="save the frontier here after each length")
    p.add_argument("--resume", help="continue from a checkpoint file")
    p.add_argument("--audit", help="parallel mode: stream every record to this file")
    p.add_argument("--max-frontier", type=int, default=DEFAULT_MAX_FRONTIER)
    p.add_argument("--order-cap", type=int, default=DEFAULT_ORDER_CAP)
    p.add_argument("--dispatch-seed", type=int, help="shuffle parallel task dispatch")
    p.add_argument("--scaling", type=_worker_list, default=(),
                   help="comma-separated worker counts to time, e.g. 1,2,4,8")
    p.add_argument("--baseline-ms", type=float,
                   help="single-worker runtime used as the speedup baseline")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        group_spec=args.group,
        limit=args.limit,
        mode="sequential" if args.mode.startswith("seq") else "parallel",
        start_depth=args.start_depth,
        workers=args.workers,
        output_format=args.output_format,
        checkpoint_path=args.checkpoint,
        resume_path=args.resume,
        verbosity=args.verbose,
        max_frontier=args.max_frontier,
        order_cap=args.order_cap,
        audit_path=args.audit,
        dispatch_seed=args.dispatch_seed,
        scaling=args.scaling,
        baseline_ms=args.baseline_ms,
    )


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    if config.verbosity and not log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        log.addHandler(handler)
    log.setLevel(logging.DEBUG if config.verbosity >= 2 else logging.INFO)
    try:
        return run(config, stdout)
    except (UsageError, CheckpointMismatch) as exc:
        print(f"rewritelen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimit, GroupTooLarge, TooManyAutomorphisms, TaskFailed) as exc:
        print(f"rewritelen: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (OSError, ValueError) as exc:
        print(f"rewritelen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"rewritelen: internal error: {exc!r}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
