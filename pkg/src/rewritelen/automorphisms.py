"""Automorphism groups of table-materialized groups.

Automorphisms are stored explicitly as index permutations (one row of
``AutSet.images`` per automorphism) and subgroups as sorted row positions,
so orbits and stabilizers reduce to array scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .groups import GroupTable

DEFAULT_AUT_CAP = 10**6


class TooManyAutomorphisms(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class AutSet:
    """Every automorphism of a group, sorted lexicographically by image."""

    images: np.ndarray  # (size, order), int32

    @property
    def size(self) -> int:
        return int(self.images.shape[0])

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, i: int) -> np.ndarray:
        return self.images[i]

    def __iter__(self):
        return iter(self.images)

    def whole(self) -> "AutSubgroup":
        return AutSubgroup(self, np.arange(self.size, dtype=np.int32))

    def trivial(self) -> "AutSubgroup":
        return AutSubgroup(self, np.zeros(1, dtype=np.int32))

    def position(self, image: Sequence[int]) -> int:
        """Row position of an automorphism given by its image sequence."""
        target = np.asarray(image, dtype=self.images.dtype)
        hits = np.flatnonzero((self.images == target).all(axis=1))
        if hits.size == 0:
            raise KeyError("not a member")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class AutSubgroup:
    parent: AutSet
    member_ids: np.ndarray

    @property
    def size(self) -> int:
        return int(self.member_ids.shape[0])

    def __len__(self) -> int:
        return self.size

    @property
    def is_trivial(self) -> bool:
        return self.size == 1

    @property
    def images(self) -> np.ndarray:
        return self.parent.images[self.member_ids]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AutSubgroup):
            return NotImplemented
        return self.parent is other.parent and np.array_equal(self.member_ids, other.member_ids)

    def __hash__(self) -> int:
        return hash(self.member_ids.tobytes())


def _as_subgroup(auts: AutSet | AutSubgroup) -> AutSubgroup:
    return auts.whole() if isinstance(auts, AutSet) else auts


def is_automorphism(table: GroupTable, image: Sequence[int]) -> bool:
    """Exhaustive check of the multiplicative law and bijectivity."""
    img = np.asarray(image)
    n = table.order
    if img.shape != (n,) or img[0] != 0 or len(set(img.tolist())) != n:
        return False
    mult = table.mult
    # image[mult[a][b]] == mult[image[a]][image[b]] for all a, b
    return bool(np.array_equal(img[mult], mult[np.ix_(img, img)]))


def generating_set(table: GroupTable) -> list[int]:
    """A small generating set, picked greedily by descending element order."""
    mult = table.mult
    candidates = sorted(range(1, table.order), key=lambda g: (-table.element_orders[g], g))
    gens: list[int] = []
    inside = np.zeros(table.order, dtype=bool)
    inside[0] = True
    for g in candidates:
        if inside.all():
            break
        if inside[g]:
            continue
        gens.append(g)
        inside = _closure_mask(mult, gens)
    return gens


def _closure_mask(mult: np.ndarray, gens: Sequence[int]) -> np.ndarray:
    inside = np.zeros(mult.shape[0], dtype=bool)
    inside[0] = True
    queue = [0]
    while queue:
        a = queue.pop()
        for s in gens:
            b = mult[a, s]
            if not inside[b]:
                inside[b] = True
                queue.append(b)
    return inside


def _extend_map(mult, gens, images) -> np.ndarray | None:
    """Extend a generator assignment over the subgroup they generate.

    Returns the partial map (-1 where undefined), or None on the first
    multiplicative or injectivity conflict.
    """
    n = mult.shape[0]
    phi = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    phi[0] = 0
    used[0] = True
    queue = [0]
    head = 0
    while head < len(queue):
        a = queue[head]
        head += 1
        pa = phi[a]
        for s, ps in zip(gens, images):
            b = mult[a, s]
            val = mult[pa, ps]
            if phi[b] < 0:
                if used[val]:
                    return None
                phi[b] = val
                used[val] = True
                queue.append(b)
            elif phi[b] != val:
                return None
    return phi


def automorphism_set(table: GroupTable, *, cap: int = DEFAULT_AUT_CAP) -> AutSet:
    """All automorphisms, by backtracking over images of a generating set.

    Candidate images of each generator are restricted to elements of equal
    order; each partial assignment is extended by closure and abandoned on
    the first inconsistency.
    """
    mult = table.mult
    n = table.order
    if n == 1:
        return AutSet(np.zeros((1, 1), dtype=np.int32))
    gens = generating_set(table)
    orders = table.element_orders
    candidates = [np.flatnonzero(orders == orders[g]).tolist() for g in gens]
    found: list[np.ndarray] = []

    def search(depth: int, chosen: list[int]) -> None:
        for c in candidates[depth]:
            trial = chosen + [c]
            phi = _extend_map(mult, gens[: depth + 1], trial)
            if phi is None:
                continue
            if depth + 1 == len(gens):
                found.append(phi.astype(np.int32))
                if len(found) > cap:
                    raise TooManyAutomorphisms(
                        f"more than {cap} automorphisms; group unsupported at this scale"
                    )
            else:
                search(depth + 1, trial)

    search(0, [])
    images = np.array(found, dtype=np.int32)
    order = np.lexsort(images.T[::-1])
    return AutSet(np.ascontiguousarray(images[order]))


def inner_automorphisms(table: GroupTable) -> AutSet:
    """Conjugations x -> g^-1 x g, deduplicated and canonically sorted."""
    mult, inv = table.mult, table.inverse
    rows = {mult[mult[inv[g]], g].astype(np.int32).tobytes() for g in range(table.order)}
    images = np.array([np.frombuffer(r, dtype=np.int32) for r in rows])
    order = np.lexsort(images.T[::-1])
    return AutSet(np.ascontiguousarray(images[order]))


def orbits(auts: AutSet | AutSubgroup, table: GroupTable) -> list[list[int]]:
    """Orbits of the non-identity elements, each sorted, ordered by minimum."""
    imgs = _as_subgroup(auts).images
    seen = np.zeros(table.order, dtype=bool)
    seen[0] = True
    out = []
    for g in range(1, table.order):
        if seen[g]:
            continue
        orbit = np.unique(imgs[:, g])
        seen[orbit] = True
        out.append(orbit.tolist())
    return out


def nontrivial_orbit_representatives(
    auts: AutSet | AutSubgroup, table: GroupTable, *, choose: str = "min"
) -> list[int]:
    """One representative per orbit of non-identity elements, ascending.

    ``choose="max"`` picks the largest index instead; it exists so counts can
    be checked for independence from the representative choice.
    """
    pick = min if choose == "min" else max
    return sorted(pick(orb) for orb in orbits(auts, table))


def stabilizer(auts: AutSet | AutSubgroup, g: int) -> AutSubgroup:
    sub = _as_subgroup(auts)
    keep = sub.parent.images[sub.member_ids, g] == g
    return AutSubgroup(sub.parent, sub.member_ids[keep])


def intersect(a: AutSubgroup, b: AutSubgroup) -> AutSubgroup:
    return AutSubgroup(a.parent, np.intersect1d(a.member_ids, b.member_ids))


def pointwise_stabilizer(
    auts: AutSet | AutSubgroup,
    word: Iterable[int],
    *,
    early_exit: bool = True,
    on_visit: Callable[[int], None] | None = None,
) -> AutSubgroup:
    """Automorphisms fixing every entry of ``word``.

    The per-entry stabilizers are intersected in turn; the loop stops as
    soon as the running intersection is trivial.
    """
    word = list(word)
    if not word:
        raise ValueError("word must be non-empty")
    current = _as_subgroup(auts)
    for i, g in enumerate(word):
        if early_exit and current.is_trivial:
            break
        if on_visit is not None:
            on_visit(i)
        current = intersect(current, stabilizer(current.parent, g))
    return current
