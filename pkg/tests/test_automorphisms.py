import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rewritelen.automorphisms import (
    TooManyAutomorphisms,
    automorphism_set,
    inner_automorphisms,
    is_automorphism,
    nontrivial_orbit_representatives,
    orbits,
    pointwise_stabilizer,
    stabilizer,
)
from rewritelen.groups import build_group_from_generators, builtin_group, parse_cycles


def brute_force_automorphisms(t):
    """Every bijection fixing the identity that respects the table."""
    m = t.mult
    found = set()
    for rest in itertools.permutations(range(1, t.order)):
        img = np.array((0,) + rest)
        if np.array_equal(img[m], m[np.ix_(img, img)]):
            found.add(tuple(img.tolist()))
    return found


def as_set(autset):
    return {tuple(row.tolist()) for row in autset.images}


@pytest.mark.parametrize(
    "group,size",
    [(("symmetric", 3), 6), (("quaternion", 8), 24), (("cyclic", 7), 6), (("dihedral", 4), 8),
     (("cyclic", 2), 1), (("cyclic", 8), 4)],
)
def test_matches_brute_force(group, size):
    t = builtin_group(*group)
    auts = automorphism_set(t)
    assert auts.size == size
    assert as_set(auts) == brute_force_automorphisms(t)


def test_klein_four(klein):
    auts = automorphism_set(klein)
    assert auts.size == 6
    assert as_set(auts) == brute_force_automorphisms(klein)


def test_a5_is_conjugation_by_s5(a5, a5_aut):
    labels = {lab: i for i, lab in enumerate(a5.labels)}
    perms = [parse_cycles(lab, 5) if lab != "()" else tuple(range(5)) for lab in a5.labels]
    from rewritelen.groups import format_cycles

    conj = set()
    for s in itertools.permutations(range(5)):
        s_inv = [0] * 5
        for i, x in enumerate(s):
            s_inv[x] = i
        # s^-1 * p * s acting on the right: x -> s[p[s_inv[x]]]
        img = tuple(labels[format_cycles([s[p[s_inv[x]]] for x in range(5)])] for p in perms)
        conj.add(img)
    assert a5_aut.size == 120
    assert as_set(a5_aut) == conj


def test_canonical_order_and_identity(a5_aut):
    rows = [tuple(r.tolist()) for r in a5_aut.images]
    assert rows == sorted(rows)
    assert rows[0] == tuple(range(60))
    assert len(set(rows)) == len(rows)


def test_members_satisfy_law(small_group):
    t, auts = small_group
    for img in auts.images:
        assert is_automorphism(t, img)
        assert np.array_equal(t.element_orders[img], t.element_orders)


def test_closure_under_composition_and_inverse(small_group):
    _, auts = small_group
    members = as_set(auts)
    for a in auts.images:
        inv = np.argsort(a)
        assert tuple(inv.tolist()) in members
        for b in auts.images:
            assert tuple(b[a].tolist()) in members


@pytest.mark.parametrize(
    "group,size", [(("alternating", 5), 60), (("quaternion", 8), 4), (("cyclic", 9), 1),
                   (("symmetric", 3), 6), (("dihedral", 4), 4)]
)
def test_inner_automorphisms(group, size):
    t = builtin_group(*group)
    inner = inner_automorphisms(t)
    assert inner.size == size
    assert as_set(inner) <= as_set(automorphism_set(t))


def test_aut_cap():
    elementary = build_group_from_generators(["(1,2)", "(3,4)", "(5,6)", "(7,8)"])
    with pytest.raises(TooManyAutomorphisms):
        automorphism_set(elementary, cap=1000)


def test_orbit_representatives(a5, a5_aut):
    reps = nontrivial_orbit_representatives(a5_aut, a5)
    assert len(reps) == 3
    assert sorted(a5.element_orders[reps].tolist()) == [2, 3, 5]
    assert nontrivial_orbit_representatives(a5_aut.trivial(), a5) == list(range(1, 60))
    c2 = builtin_group("cyclic", 2)
    assert nontrivial_orbit_representatives(automorphism_set(c2), c2) == [1]


def test_orbits_partition(small_group):
    t, auts = small_group
    orbs = orbits(auts, t)
    flat = sorted(x for o in orbs for x in o)
    assert flat == list(range(1, t.order))
    for o in orbs:
        assert auts.size % len(o) == 0


def test_orbit_stabilizer(small_group):
    t, auts = small_group
    sizes = {x: len(o) for o in orbits(auts, t) for x in o}
    for g in range(1, t.order):
        assert sizes[g] * stabilizer(auts, g).size == auts.size
    assert stabilizer(auts, 0).size == auts.size


def test_three_cycle_stabilizer(a5, a5_aut):
    assert stabilizer(a5_aut, a5.index("(1,2,3)")).size == 6


def test_pointwise_single_and_repeat(a5, a5_aut):
    g = a5.index("(1,2,3)")
    assert pointwise_stabilizer(a5_aut, [g]) == stabilizer(a5_aut, g)
    assert pointwise_stabilizer(a5_aut, [g, g]) == stabilizer(a5_aut, g)
    with pytest.raises(ValueError):
        pointwise_stabilizer(a5_aut, [])


def test_pointwise_early_exit(a5, a5_aut):
    # find a non-commuting pair whose stabilizers meet trivially
    pair = next(
        (a, b)
        for a in range(1, 60)
        for b in range(1, 60)
        if a5.mult[a, b] != a5.mult[b, a]
        and pointwise_stabilizer(a5_aut, [a, b], early_exit=False).is_trivial
    )
    visited = []
    word = list(pair) + [5, 7, 11]
    result = pointwise_stabilizer(a5_aut, word, on_visit=visited.append)
    assert result.is_trivial
    assert visited == [0, 1]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 59), min_size=1, max_size=5))
def test_pointwise_matches_naive(word):
    t = builtin_group("alternating", 5)
    auts = automorphism_set(t)
    fast = pointwise_stabilizer(auts, word)
    slow = pointwise_stabilizer(auts, word, early_exit=False)
    naive = [i for i, img in enumerate(auts.images) if all(img[g] == g for g in word)]
    assert fast.member_ids.tolist() == slow.member_ids.tolist() == naive
