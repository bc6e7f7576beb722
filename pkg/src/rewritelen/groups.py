"""Finite groups materialized as index-based multiplication tables.

Elements are numbered by a breadth-first closure over the generators, with
the identity at index 0.  Permutations follow the usual computer-algebra
convention of acting on the right, so ``a*b`` means "apply a, then b".
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

DEFAULT_ORDER_CAP = 2000

Permutation = Union[str, Sequence[int]]


class GroupTooLarge(RuntimeError):
    """Closure exceeded the order cap for table materialization."""


@dataclass(frozen=True, eq=False)
class GroupTable:
    mult: np.ndarray
    inverse: np.ndarray
    labels: tuple[str, ...]
    element_orders: np.ndarray
    description: str = ""

    @property
    def order(self) -> int:
        return int(self.mult.shape[0])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    @cached_property
    def fingerprint(self) -> str:
        """Order, element-order multiset and a hash of the table."""
        counts = Counter(int(k) for k in self.element_orders)
        spectrum = ",".join(f"{k}x{counts[k]}" for k in sorted(counts))
        digest = hashlib.sha256(
            np.ascontiguousarray(self.mult, dtype=np.int32).tobytes()
        ).hexdigest()[:16]
        return f"{self.order}:{spectrum}:{digest}"

    def index(self, label: str) -> int:
        """Index of the element whose label matches ``label``.

        Accepts any cycle notation that normalizes to the stored label.
        """
        try:
            return self.labels.index(label)
        except ValueError:
            pass
        degree = max((_max_point(label)), 1)
        perm = parse_cycles(label, degree)
        wanted = format_cycles(perm)
        try:
            return self.labels.index(wanted)
        except ValueError:
            raise KeyError(label) from None


def word_product(table: GroupTable, word: Iterable[int]) -> int:
    """Left-to-right product of a word; the empty word gives the identity."""
    mult = table.mult
    acc = 0
    for x in word:
        acc = int(mult[acc, x])
    return acc


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _max_point(text: str) -> int:
    points = [int(t) for t in re.findall(r"\d+", text)]
    return max(points, default=0)


def parse_cycles(text: str, degree: int | None = None) -> tuple[int, ...]:
    """Parse disjoint-cycle notation such as ``(1,2,3)(4,5)`` or ``(1 2 3)``.

    Points are 1-based in the text; the result is a 0-based image tuple.
    """
    stripped = text.strip()
    if not stripped:
        raise ValueError("empty permutation")
    leftover = _CYCLE_RE.sub("", stripped).strip()
    if leftover:
        raise ValueError(f"cannot parse permutation {text!r}")
    if degree is None:
        degree = _max_point(stripped)
    image = list(range(degree))
    seen: set[int] = set()
    for body in _CYCLE_RE.findall(stripped):
        tokens = [t for t in re.split(r"[,\s]+", body.strip()) if t]
        points = []
        for tok in tokens:
            if not tok.isdigit() or int(tok) < 1:
                raise ValueError(f"bad point {tok!r} in {text!r}")
            points.append(int(tok) - 1)
        if len(set(points)) != len(points) or seen.intersection(points):
            raise ValueError(f"cycles in {text!r} are not disjoint")
        if points and max(points) >= degree:
            raise ValueError(f"point out of range in {text!r}")
        seen.update(points)
        for a, b in zip(points, points[1:] + points[:1]):
            image[a] = b
    return tuple(image)


def format_cycles(image: Sequence[int]) -> str:
    """Disjoint-cycle notation with 1-based points; identity is ``()``."""
    seen = set()
    out = []
    for start in range(len(image)):
        if start in seen or image[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        j = image[start]
        while j != start:
            cycle.append(j)
            seen.add(j)
            j = image[j]
        out.append("(" + ",".join(str(p + 1) for p in cycle) + ")")
    return "".join(out) or "()"


def read_generator_file(path) -> list[str]:
    """One permutation per line; blank lines and ``#`` comments are skipped."""
    gens = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            gens.append(line)
    return gens


def _normalize_generators(generators: Sequence[Permutation]) -> np.ndarray:
    if len(generators) == 0:
        raise ValueError("generator sequence is empty")
    strings = [g for g in generators if isinstance(g, str)]
    degree = max((_max_point(s) for s in strings), default=0)
    arrays = [g for g in generators if not isinstance(g, str)]
    if arrays:
        lengths = {len(g) for g in arrays}
        if len(lengths) != 1:
            raise ValueError("generators act on different point sets")
        (n_points,) = lengths
        if degree > n_points:
            raise ValueError("generators act on different point sets")
        degree = n_points
    degree = max(degree, 1)
    rows = []
    for g in generators:
        img = parse_cycles(g, degree) if isinstance(g, str) else tuple(int(x) for x in g)
        if sorted(img) != list(range(degree)):
            raise ValueError(f"generator {g!r} is not a bijection on {degree} points")
        rows.append(img)
    return np.array(rows, dtype=np.int64)


def build_group_from_generators(
    generators: Sequence[Permutation],
    *,
    order_cap: int = DEFAULT_ORDER_CAP,
    description: str = "",
) -> GroupTable:
    """Materialize the permutation group generated by ``generators``.

    Generators may be cycle strings or 0-based image sequences.  Elements
    are enumerated breadth-first from the identity, expanding generators in
    input order, so the numbering is reproducible.
    """
    gens = _normalize_generators(generators)
    degree = gens.shape[1]
    identity = np.arange(degree, dtype=np.int64)

    perms = [identity]
    index = {identity.tobytes(): 0}
    head = 0
    while head < len(perms):
        a = perms[head]
        head += 1
        for s in gens:
            prod = s[a]  # (a*s)[x] = s[a[x]]
            key = prod.tobytes()
            if key not in index:
                if len(perms) >= order_cap:
                    raise GroupTooLarge(
                        f"group too large for table materialization (cap {order_cap})"
                    )
                index[key] = len(perms)
                perms.append(prod)

    P = np.array(perms)
    n = len(perms)
    mult = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        # row i: products P[i]*P[j] = P[j][P[i]]
        prods = P[:, P[i]]
        mult[i] = [index[row.tobytes()] for row in prods]

    inverse = np.argmax(mult == 0, axis=1).astype(np.int32)
    orders = _element_orders(mult)
    labels = tuple(format_cycles(p) for p in P)
    return GroupTable(
        mult=mult,
        inverse=inverse,
        labels=labels,
        element_orders=orders,
        description=description,
    )


def _element_orders(mult: np.ndarray) -> np.ndarray:
    n = mult.shape[0]
    orders = np.zeros(n, dtype=np.int64)
    for a in range(n):
        k, x = 1, a
        while x != 0:
            x = mult[x, a]
            k += 1
        orders[a] = k
    return orders


def _quaternion_generators() -> list[list[int]]:
    # Q8 = {±1, ±i, ±j, ±k}; point 2*u + s encodes sign s of unit u.
    units = "1ijk"
    table = {
        ("1", "1"): (0, "1"), ("1", "i"): (0, "i"), ("1", "j"): (0, "j"), ("1", "k"): (0, "k"),
        ("i", "1"): (0, "i"), ("i", "i"): (1, "1"), ("i", "j"): (0, "k"), ("i", "k"): (1, "j"),
        ("j", "1"): (0, "j"), ("j", "i"): (1, "k"), ("j", "j"): (1, "1"), ("j", "k"): (0, "i"),
        ("k", "1"): (0, "k"), ("k", "i"): (0, "j"), ("k", "j"): (1, "i"), ("k", "k"): (1, "1"),
    }
    gens = []
    for g in "ij":
        image = []
        for point in range(8):
            u, s = units[point // 2], point % 2
            ds, w = table[(u, g)]
            image.append(2 * units.index(w) + (s ^ ds))
        gens.append(image)
    return gens


def _cycle(points: Iterable[int]) -> str:
    return "(" + ",".join(str(p) for p in points) + ")"


FAMILIES = ("alternating", "symmetric", "cyclic", "dihedral", "quaternion")


def builtin_generators(family: str, parameter: int) -> list[Permutation]:
    """Canonical generators for a built-in family.

    ============  ==========================================
    alternating   (1,2,3) and (1..n) for odd n, (2..n) for even n
    symmetric     (1,2) and (1..n)
    cyclic        (1..n)
    dihedral      rotation (1..n), reflection i -> n+2-i
    quaternion    right multiplication by i and j on ±{1,i,j,k}
    ============  ==========================================
    """
    n = int(parameter)
    if family == "alternating":
        if n < 1:
            raise ValueError("alternating group needs n >= 1")
        if n < 3:
            return [list(range(max(n, 1)))]
        if n == 3:
            return ["(1,2,3)"]
        long = _cycle(range(1, n + 1)) if n % 2 else _cycle(range(2, n + 1))
        return ["(1,2,3)", long]
    if family == "symmetric":
        if n < 1:
            raise ValueError("symmetric group needs n >= 1")
        if n == 1:
            return [[0]]
        if n == 2:
            return ["(1,2)"]
        return ["(1,2)", _cycle(range(1, n + 1))]
    if family == "cyclic":
        if n < 1:
            raise ValueError("cyclic group needs n >= 1")
        if n == 1:
            return [[0]]
        return [_cycle(range(1, n + 1))]
    if family == "dihedral":
        if n < 3:
            raise ValueError("dihedral group needs a polygon size >= 3")
        reflection = [(n - i) % n for i in range(n)]
        return [_cycle(range(1, n + 1)), reflection]
    if family == "quaternion":
        if n != 8:
            raise ValueError("only the quaternion group of order 8 is supported")
        return _quaternion_generators()
    raise ValueError(f"unsupported group family {family!r}")


def builtin_group(family: str, parameter: int, *, order_cap: int = DEFAULT_ORDER_CAP) -> GroupTable:
    names = {"alternating": "alt", "symmetric": "sym", "cyclic": "cyclic", "dihedral": "dihedral", "quaternion": "q"}
    if family not in names:
        raise ValueError(f"unsupported group family {family!r}")
    gens = builtin_generators(family, parameter)
    return build_group_from_generators(
        gens, order_cap=order_cap, description="q8" if family == "quaternion" else f"{names[family]}:{parameter}"
    )
