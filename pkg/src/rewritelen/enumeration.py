"""Level-by-level search for non-rewritable words up to automorphism.

Starting from one representative per automorphism orbit of non-identity
elements, every non-rewritable word of length n-1 is extended by the orbit
representatives of its pointwise stabilizer.  The first length with no
survivors is the rewritability length.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from . import _kernels
from .automorphisms import (
    AutSet,
    AutSubgroup,
    automorphism_set,
    intersect,
    nontrivial_orbit_representatives,
    stabilizer,
)
from .groups import GroupTable
from .rewritability import PermutationCache, _shared_cache, is_rewritable

DEFAULT_MAX_FRONTIER = 10**7
DEFAULT_BRUTE_FORCE_BOUND = 5 * 10**8
CHECKPOINT_MAGIC = "# rewritelen checkpoint v1"

Progress = Callable[[str], None]


class ResourceLimit(RuntimeError):
    """A configured size bound was exceeded."""


class CheckpointMismatch(ValueError):
    """Checkpoint was written for a different group or configuration."""


@dataclass(frozen=True, eq=False)
class NRWRecord:
    word: tuple[int, ...]
    stab: AutSubgroup


@dataclass
class Frontier:
    """All stored records of one length, in a flat layout.

    Stabilizer members of record i are ``stab_ids[stab_ptr[i]:stab_ptr[i+1]]``;
    an empty slice marks a trivial stabilizer.
    """

    words: np.ndarray
    stab_ptr: np.ndarray
    stab_ids: np.ndarray

    @property
    def length(self) -> int:
        return int(self.words.shape[1])

    def __len__(self) -> int:
        return int(self.words.shape[0])

    def stab_members(self, i: int) -> np.ndarray:
        return self.stab_ids[self.stab_ptr[i]:self.stab_ptr[i + 1]]

    def stab_sizes(self) -> np.ndarray:
        sizes = np.diff(self.stab_ptr)
        return np.where(sizes == 0, 1, sizes)

    def orbit_total(self, aut_size: int) -> int:
        """Number of words the stored representatives stand for."""
        return int(sum(aut_size // int(s) for s in self.stab_sizes()))

    def record(self, i: int, aut: AutSet) -> NRWRecord:
        members = self.stab_members(i)
        stab = AutSubgroup(aut, members.copy()) if len(members) else aut.trivial()
        return NRWRecord(tuple(int(x) for x in self.words[i]), stab)

    def records(self, aut: AutSet) -> Iterator[NRWRecord]:
        for i in range(len(self)):
            yield self.record(i, aut)

    @classmethod
    def from_records(cls, records: Sequence[NRWRecord], length: int) -> "Frontier":
        words = np.array([r.word for r in records], dtype=np.int32).reshape(-1, length)
        ptr = [0]
        ids: list[int] = []
        for r in records:
            if not r.stab.is_trivial:
                ids.extend(int(x) for x in r.stab.member_ids)
            ptr.append(len(ids))
        return cls(words, np.array(ptr, dtype=np.int64), np.array(ids, dtype=np.int32))


@dataclass
class LengthReport:
    """Per-length representative counts and the resolved length.

    ``result`` is None when the limit was reached with survivors left.
    """

    counts: dict[int, int]
    result: int | None
    limit: int

    @property
    def failed(self) -> bool:
        return self.result is None

    def as_vector(self) -> list[int]:
        return [self.counts[r] for r in sorted(self.counts)]


@dataclass
class SearchOptions:
    choose: str = "min"
    cache_stabilizers: bool = True
    reuse_scratch: bool = True
    prefix_buffer: bool = True
    max_frontier: int = DEFAULT_MAX_FRONTIER

    @property
    def choose_max(self) -> bool:
        if self.choose not in ("min", "max"):
            raise ValueError(f"unknown representative choice {self.choose!r}")
        return self.choose == "max"


def seed_frontier(table: GroupTable, aut: AutSet, choose: str = "min") -> Frontier:
    """Length-1 representatives paired with their stabilizers."""
    reps = nontrivial_orbit_representatives(aut, table, choose=choose)
    records = [NRWRecord((g,), stabilizer(aut, g)) for g in reps]
    return Frontier.from_records(records, 1)


def extend_frontier(
    table: GroupTable, aut: AutSet, frontier: Frontier, options: SearchOptions | None = None
) -> tuple[Frontier, int]:
    """One search step; returns the next frontier and candidates examined."""
    options = options or SearchOptions()
    words, ptr, ids, examined, overflow = _kernels.extend_level(
        table.mult,
        aut.images,
        np.ascontiguousarray(frontier.words, dtype=np.int32),
        frontier.stab_ptr,
        frontier.stab_ids,
        options.choose_max,
        options.cache_stabilizers,
        options.reuse_scratch,
        options.prefix_buffer,
        options.max_frontier,
    )
    if overflow:
        raise ResourceLimit(
            f"frontier of length {frontier.length + 1} exceeds {options.max_frontier} records"
        )
    return Frontier(words, ptr, ids), int(examined)


def extension_candidates(table: GroupTable, record: NRWRecord, choose: str = "min") -> list[int]:
    if record.stab.is_trivial:
        return list(range(1, table.order))
    return nontrivial_orbit_representatives(record.stab, table, choose=choose)


def extend_record(
    table: GroupTable,
    aut: AutSet,
    record: NRWRecord,
    cache: PermutationCache | None = None,
    *,
    choose: str = "min",
) -> list[NRWRecord]:
    """Non-rewritable one-entry extensions of a single record.

    Readable reference for the batch kernel; the last entry of a scratch
    word is overwritten for each candidate.
    """
    cache = cache or _shared_cache
    scratch = list(record.word) + [0]
    out = []
    for v in extension_candidates(table, record, choose):
        scratch[-1] = v
        if is_rewritable(table, scratch, cache):
            continue
        stab = record.stab if record.stab.is_trivial else intersect(record.stab, stabilizer(aut, v))
        out.append(NRWRecord(tuple(scratch), stab))
    return out


def iter_levels(
    table: GroupTable,
    aut: AutSet,
    limit: int,
    *,
    start: Frontier | None = None,
    options: SearchOptions | None = None,
    progress: Progress | None = None,
) -> Iterator[Frontier]:
    """Yield the frontier of each length after ``start`` up to ``limit``.

    Stops after the first empty frontier.
    """
    options = options or SearchOptions()
    frontier = start if start is not None else seed_frontier(table, aut, options.choose)
    n = frontier.length
    while n < limit:
        n += 1
        if progress:
            progress(f"Started enumeration of NRW of length {n}")
        frontier, _ = extend_frontier(table, aut, frontier, options)
        if progress:
            progress(f"{len(frontier)} NRW of length {n} constructed")
        yield frontier
        if not len(frontier):
            break


def resolve(counts: dict[int, int], limit: int) -> LengthReport:
    """Truncate at the first zero count; otherwise report failure."""
    kept: dict[int, int] = {}
    for r in sorted(counts):
        kept[r] = counts[r]
        if counts[r] == 0:
            return LengthReport(kept, r, limit)
    return LengthReport(kept, None, limit)


def rewritability_length(
    table: GroupTable,
    limit: int,
    *,
    aut: AutSet | None = None,
    options: SearchOptions | None = None,
    progress: Progress | None = None,
    checkpoint: str | os.PathLike | None = None,
    resume: str | os.PathLike | None = None,
) -> LengthReport:
    """Least n <= limit such that every n-tuple is rewritable.

    With ``checkpoint`` the frontier is saved after every completed length;
    ``resume`` continues from such a file.
    """
    if limit < 2:
        raise ValueError("limit must be at least 2")
    aut = aut if aut is not None else automorphism_set(table)
    options = options or SearchOptions()
    counts: dict[int, int] = {}
    start = None
    if resume is not None:
        counts, start = load_checkpoint(resume, table, aut, options)
        if counts and counts[max(counts)] == 0:
            return resolve(counts, limit)
    for frontier in iter_levels(table, aut, limit, start=start, options=options, progress=progress):
        counts[frontier.length] = len(frontier)
        if checkpoint is not None:
            write_checkpoint(checkpoint, table, aut, counts, frontier, options)
    return resolve(counts, limit)


def brute_force_count(
    table: GroupTable,
    length: int,
    cache: PermutationCache | None = None,
    *,
    work_bound: int = DEFAULT_BRUTE_FORCE_BOUND,
) -> int:
    """Count every non-rewritable tuple of non-identity elements.

    No symmetry reduction; meant for desk-scale groups only.
    """
    if length < 1:
        raise ValueError("length must be positive")
    work = (table.order - 1) ** length * math.factorial(length)
    if work > work_bound:
        raise ResourceLimit(f"brute force needs ~{work} steps, bound is {work_bound}")
    cache = cache or _shared_cache
    return int(
        _kernels.brute_force_nonrewritable(
            table.mult, length, cache.permutations_of(length), cache.starts_of(length)
        )
    )


# checkpoints ---------------------------------------------------------------


def _format_record_line(length: int, word, members) -> str:
    entries = ",".join(str(int(x)) for x in word)
    stab = ",".join(str(int(x)) for x in members) if len(members) else "T"
    return f"{length} {entries} {stab}\n"


def write_checkpoint(
    path, table: GroupTable, aut: AutSet, counts: dict[int, int], frontier: Frontier,
    options: SearchOptions | None = None,
) -> None:
    """Atomically replace ``path`` with the given completed frontier."""
    options = options or SearchOptions()
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(CHECKPOINT_MAGIC + "\n")
        fh.write(f"# fingerprint {table.fingerprint}\n")
        fh.write(f"# aut_size {aut.size}\n")
        fh.write(f"# choose {options.choose}\n")
        fh.write("# counts " + " ".join(f"{r}:{c}" for r, c in sorted(counts.items())) + "\n")
        fh.write(f"# length {frontier.length}\n")
        n = frontier.length
        ptr, ids = frontier.stab_ptr, frontier.stab_ids
        fh.writelines(
            _format_record_line(n, frontier.words[i], ids[ptr[i]:ptr[i + 1]])
            for i in range(len(frontier))
        )
    os.replace(tmp, path)


def load_checkpoint(
    path, table: GroupTable, aut: AutSet, options: SearchOptions | None = None
) -> tuple[dict[int, int], Frontier]:
    """Read a checkpoint, rejecting one written for another group."""
    options = options or SearchOptions()
    header: dict[str, str] = {}
    words: list[list[int]] = []
    ptr = [0]
    ids: list[int] = []
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != CHECKPOINT_MAGIC:
            raise CheckpointMismatch(f"{path}: not a checkpoint file")
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition(" ")
                header[key] = value
                continue
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise CheckpointMismatch(f"{path}: malformed record line {line!r}")
            words.append([int(x) for x in parts[1].split(",")])
            if parts[2] != "T":
                ids.extend(int(x) for x in parts[2].split(","))
            ptr.append(len(ids))
    if header.get("fingerprint") != table.fingerprint:
        raise CheckpointMismatch(
            f"{path}: group fingerprint {header.get('fingerprint')} does not match {table.fingerprint}"
        )
    if int(header.get("aut_size", -1)) != aut.size:
        raise CheckpointMismatch(f"{path}: automorphism group size differs")
    if header.get("choose", "min") != options.choose:
        raise CheckpointMismatch(f"{path}: written with representative choice {header.get('choose')}")
    counts = {}
    for item in header.get("counts", "").split():
        r, c = item.split(":")
        counts[int(r)] = int(c)
    length = int(header["length"])
    frontier = Frontier(
        np.array(words, dtype=np.int32).reshape(-1, length),
        np.array(ptr, dtype=np.int64),
        np.array(ids, dtype=np.int32),
    )
    if counts.get(length) != len(frontier):
        raise CheckpointMismatch(f"{path}: record count does not match header")
    return counts, frontier
