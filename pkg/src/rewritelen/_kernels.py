"""Compiled inner loops shared by the sequential and parallel searches.

Conventions: ``mult`` is the int32 multiplication table, ``auts`` the
(size, order) automorphism image table.  A stabilizer is a slice of row
positions into ``auts``; a length of 0 or 1 both mean "identity only".
All kernels release the GIL.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def inverses(mult):
    order = mult.shape[0]
    inv = np.empty(order, np.int64)
    for a in range(order):
        for b in range(order):
            if mult[a, b] == 0:
                inv[a] = b
                break
    return inv


@njit(**_JIT)
def next_permutation(perm, n):
    """Advance ``perm[:n]`` to its lexicographic successor in place.

    Returns the leftmost changed position, or -1 after the last permutation.
    """
    i = n - 2
    while i >= 0 and perm[i] >= perm[i + 1]:
        i -= 1
    if i < 0:
        return -1
    j = n - 1
    while perm[j] <= perm[i]:
        j -= 1
    perm[i], perm[j] = perm[j], perm[i]
    lo, hi = i + 1, n - 1
    while lo < hi:
        perm[lo], perm[hi] = perm[hi], perm[lo]
        lo += 1
        hi -= 1
    return i


@njit(**_JIT)
def rewritable_lex(mult, inv, word, n, perm, prefix, need, use_prefix):
    """Search non-identity position permutations in lexicographic order.

    ``prefix[k]`` holds the product of the first k permuted entries, so a
    successor only recomputes from its pivot onward.  Lexicographic order
    visits the two arrangements of the last two slots back to back, so they
    are tested as a pair against ``need[j] = target * word[j]^-1``.
    Requires n >= 2.
    """
    prefix[0] = 0
    for k in range(n):
        perm[k] = k
        prefix[k + 1] = mult[prefix[k], word[k]]
    target = prefix[n]
    for k in range(n):
        need[k] = mult[target, inv[word[k]]]
    a_pos = n - 2
    b_pos = n - 1
    # the identity is skipped; only its swapped twin is a candidate
    if mult[prefix[a_pos], word[b_pos]] == need[a_pos]:
        return True
    while True:
        perm[a_pos], perm[b_pos] = perm[b_pos], perm[a_pos]
        i = next_permutation(perm, n)
        if i < 0:
            return False
        # last two slots are ascending again, pivot is left of them
        start = i if use_prefix else 0
        for k in range(start, a_pos):
            prefix[k + 1] = mult[prefix[k], word[perm[k]]]
        p = prefix[a_pos]
        x = perm[a_pos]
        y = perm[b_pos]
        if mult[p, word[x]] == need[y] or mult[p, word[y]] == need[x]:
            return True


@njit(**_JIT)
def rewritable_with_perms(mult, word, perms, starts, use_prefix):
    """Same predicate, iterating an explicit permutation list.

    ``starts[k]`` is the first position where ``perms[k]`` differs from
    ``perms[k-1]``; products before it are reused from the previous row.
    """
    n = word.shape[0]
    prefix = np.empty(n + 1, np.int64)
    prefix[0] = 0
    for k in range(n):
        prefix[k + 1] = mult[prefix[k], word[k]]
    target = prefix[n]
    for r in range(perms.shape[0]):
        start = starts[r] if use_prefix else 0
        for k in range(start, n):
            prefix[k + 1] = mult[prefix[k], word[perms[r, k]]]
        if prefix[n] == target:
            return True
    return False


@njit(**_JIT)
def candidates(auts, stab, stab_len, order, choose_max, out):
    """Write extension candidates into ``out``; returns how many.

    With a trivial stabilizer every non-identity element is a candidate,
    otherwise one orbit representative per orbit.
    """
    if stab_len <= 1:
        for g in range(1, order):
            out[g - 1] = g
        return order - 1
    count = 0
    for g in range(1, order):
        rep = True
        for t in range(stab_len):
            h = auts[stab[t], g]
            if (h > g) if choose_max else (h < g):
                rep = False
                break
        if rep:
            out[count] = g
            count += 1
    return count


@njit(**_JIT)
def child_stabilizer(auts, stab, stab_len, v, out):
    """Members of ``stab`` fixing ``v``; returns 0 when only the identity remains."""
    if stab_len <= 1:
        return 0
    count = 0
    for t in range(stab_len):
        a = stab[t]
        if auts[a, v] == v:
            out[count] = a
            count += 1
    return count if count > 1 else 0


@njit(**_JIT)
def pointwise_from_scratch(auts, word, n, out):
    """Pointwise stabilizer of ``word[:n]`` recomputed over the whole group."""
    count = 0
    for a in range(auts.shape[0]):
        fixes = True
        for k in range(n):
            if auts[a, word[k]] != word[k]:
                fixes = False
                break
        if fixes:
            out[count] = a
            count += 1
    return count if count > 1 else 0


@njit(**_JIT)
def extend_level(mult, auts, words, stab_ptr, stab_ids, choose_max, cache_stab,
                 reuse_scratch, use_prefix, max_out):
    """Extend every word of a frontier by one entry.

    Returns (words, stab_ptr, stab_ids, candidates_examined, overflowed).
    Output stabilizers use the same CSR layout as the input, with empty
    slices for trivial ones.
    """
    n_rec, m = words.shape
    n = m + 1
    order = mult.shape[0]
    n_aut = auts.shape[0]

    cap = max(1024, 2 * n_rec)
    out_words = np.empty((cap, n), np.int32)
    out_ptr = np.zeros(cap + 1, np.int64)
    ids_cap = 1024
    out_ids = np.empty(ids_cap, np.int32)
    count = 0
    n_ids = 0
    examined = 0

    scratch = np.empty(n, np.int32)
    inv = inverses(mult)
    perm = np.empty(n, np.int64)
    prefix = np.empty(n + 1, np.int64)
    need = np.empty(n, np.int64)
    cand = np.empty(order, np.int32)
    stab_buf = np.empty(n_aut, np.int32)

    for r in range(n_rec):
        s0 = stab_ptr[r]
        s1 = stab_ptr[r + 1]
        stab = stab_ids[s0:s1]
        nc = candidates(auts, stab, s1 - s0, order, choose_max, cand)
        for k in range(m):
            scratch[k] = words[r, k]
        for c in range(nc):
            v = cand[c]
            examined += 1
            if reuse_scratch:
                w = scratch
            else:
                w = np.empty(n, np.int32)
                for k in range(m):
                    w[k] = words[r, k]
            w[m] = v
            if rewritable_lex(mult, inv, w, n, perm, prefix, need, use_prefix):
                continue
            if count >= max_out:
                return out_words[:count].copy(), out_ptr[:count + 1].copy(), out_ids[:n_ids].copy(), examined, True
            if count >= cap:
                cap *= 2
                grown = np.empty((cap, n), np.int32)
                grown[:count] = out_words[:count]
                out_words = grown
                grown_ptr = np.zeros(cap + 1, np.int64)
                grown_ptr[:count + 1] = out_ptr[:count + 1]
                out_ptr = grown_ptr
            for k in range(n):
                out_words[count, k] = w[k]
            if cache_stab:
                sl = child_stabilizer(auts, stab, s1 - s0, v, stab_buf)
            else:
                sl = pointwise_from_scratch(auts, w, n, stab_buf)
            if n_ids + sl > ids_cap:
                while n_ids + sl > ids_cap:
                    ids_cap *= 2
                grown_ids = np.empty(ids_cap, np.int32)
                grown_ids[:n_ids] = out_ids[:n_ids]
                out_ids = grown_ids
            for t in range(sl):
                out_ids[n_ids + t] = stab_buf[t]
            n_ids += sl
            count += 1
            out_ptr[count] = n_ids
    return out_words[:count].copy(), out_ptr[:count + 1].copy(), out_ids[:n_ids].copy(), examined, False


@njit(**_JIT)
def subtree_counts(mult, auts, word0, stab0, max_length, choose_max, use_prefix):
    """Depth-first exhaustive extension of one non-rewritable word.

    ``counts[r]`` is the number of non-rewritable representatives of length
    r in the subtree (r > len(word0)).
    """
    m0 = word0.shape[0]
    counts = np.zeros(max_length + 1, np.int64)
    if m0 >= max_length:
        return counts
    order = mult.shape[0]
    n_aut = auts.shape[0]
    word = np.empty(max_length, np.int32)
    for k in range(m0):
        word[k] = word0[k]
    inv = inverses(mult)
    perm = np.empty(max_length, np.int64)
    prefix = np.empty(max_length + 1, np.int64)
    need = np.empty(max_length, np.int64)
    cands = np.empty((max_length + 1, order), np.int32)
    ncand = np.zeros(max_length + 1, np.int64)
    cursor = np.zeros(max_length + 1, np.int64)
    stabs = np.empty((max_length + 1, n_aut), np.int32)
    slen = np.zeros(max_length + 1, np.int64)

    for t in range(stab0.shape[0]):
        stabs[m0, t] = stab0[t]
    slen[m0] = stab0.shape[0] if stab0.shape[0] > 1 else 0
    ncand[m0 + 1] = candidates(auts, stabs[m0], slen[m0], order, choose_max, cands[m0 + 1])
    n = m0 + 1
    while n > m0:
        if cursor[n] >= ncand[n]:
            n -= 1
            continue
        v = cands[n, cursor[n]]
        cursor[n] += 1
        word[n - 1] = v
        if rewritable_lex(mult, inv, word, n, perm, prefix, need, use_prefix):
            continue
        counts[n] += 1
        if n < max_length:
            slen[n] = child_stabilizer(auts, stabs[n - 1], slen[n - 1], v, stabs[n])
            ncand[n + 1] = candidates(auts, stabs[n], slen[n], order, choose_max, cands[n + 1])
            cursor[n + 1] = 0
            n += 1
    return counts


@njit(**_JIT)
def brute_force_nonrewritable(mult, length, perms, starts):
    """Count every non-rewritable tuple of non-identity elements."""
    order = mult.shape[0]
    word = np.ones(length, np.int32)
    total = 0
    if order < 2:
        return 0
    while True:
        if not rewritable_with_perms(mult, word, perms, starts, True):
            total += 1
        k = length - 1
        while k >= 0:
            word[k] += 1
            if word[k] < order:
                break
            word[k] = 1
            k -= 1
        if k < 0:
            return total
