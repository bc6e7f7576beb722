"""Deciding whether a word is rewritable.

A word ``(x1, ..., xn)`` is rewritable when some non-identity permutation
of its positions leaves the product unchanged.  Words are sequences of
element indices into a :class:`~rewritelen.groups.GroupTable`.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from . import _kernels
from .groups import GroupTable, word_product

MAX_WORD_LENGTH = 12


class PermutationCache:
    """All non-identity permutations of ``n`` symbols, built once per length.

    Permutations are 0-based position tuples in lexicographic order, or the
    reverse of it when ``reverse=True`` (used for differential testing).
    Alongside each table the cache keeps, per row, the first position at
    which the row differs from its predecessor, which lets the checker reuse
    prefix products.
    """

    def __init__(self, *, reverse: bool = False, eager_up_to: int = 0):
        self.reverse = reverse
        self._by_length: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for n in range(1, eager_up_to + 1):
            self._build(n)

    def _build(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if not 1 <= n <= MAX_WORD_LENGTH:
            raise ValueError(f"permutation length {n} outside 1..{MAX_WORD_LENGTH}")
        if n not in self._by_length:
            perms = np.array(list(itertools.permutations(range(n)))[1:], dtype=np.int8).reshape(-1, n)
            if self.reverse:
                perms = perms[::-1].copy()
            starts = np.zeros(len(perms), dtype=np.int64)
            if len(perms) > 1:
                diff = perms[1:] != perms[:-1]
                starts[1:] = diff.argmax(axis=1)
            self._by_length[n] = (perms, starts)
        return self._by_length[n]

    def permutations_of(self, n: int) -> np.ndarray:
        return self._build(n)[0]

    def starts_of(self, n: int) -> np.ndarray:
        return self._build(n)[1]

    def lengths(self) -> list[int]:
        return sorted(self._by_length)


def permutations_of(cache: PermutationCache, n: int) -> np.ndarray:
    return cache.permutations_of(n)


_shared_cache = PermutationCache()


def _check_word(table: GroupTable, word: Sequence[int]) -> np.ndarray:
    w = np.asarray(word, dtype=np.int32)
    if w.ndim != 1:
        raise ValueError("word must be one-dimensional")
    if len(w) and (w.min() < 0 or w.max() >= table.order):
        raise IndexError("element index out of range")
    return w


def is_rewritable(
    table: GroupTable,
    word: Sequence[int],
    cache: PermutationCache | None = None,
    *,
    prefix_buffer: bool = True,
) -> bool:
    """True iff a non-identity permutation of ``word`` has the same product.

    Stops at the first witnessing permutation in the cache's order.
    """
    w = _check_word(table, word)
    n = len(w)
    if not 2 <= n <= MAX_WORD_LENGTH:
        raise ValueError(f"word length {n} outside 2..{MAX_WORD_LENGTH}")
    cache = _shared_cache if cache is None else cache
    return bool(
        _kernels.rewritable_with_perms(
            table.mult, w, cache.permutations_of(n), cache.starts_of(n), prefix_buffer
        )
    )


def rewriting_witnesses(table: GroupTable, word: Sequence[int]) -> list[tuple[int, ...]]:
    """Every non-identity permutation preserving the product.

    Definition-level and exhaustive: no early exit, no shared buffers.
    """
    word = list(word)
    target = word_product(table, word)
    identity = tuple(range(len(word)))
    return [
        sigma
        for sigma in itertools.permutations(range(len(word)))
        if sigma != identity and word_product(table, [word[i] for i in sigma]) == target
    ]


def is_rewritable_by_definition(table: GroupTable, word: Sequence[int]) -> bool:
    return bool(rewriting_witnesses(table, word))
