"""Rewritability length of small finite groups.

A group is n-rewritable when every n-tuple of its elements has a
non-identity reordering with the same product.  The search enumerates
non-rewritable words one automorphism orbit at a time.
"""

from .automorphisms import (
    AutSet,
    AutSubgroup,
    automorphism_set,
    inner_automorphisms,
    nontrivial_orbit_representatives,
    pointwise_stabilizer,
    stabilizer,
)
from .enumeration import (
    LengthReport,
    NRWRecord,
    SearchOptions,
    brute_force_count,
    extend_record,
    rewritability_length,
)
from .groups import GroupTable, build_group_from_generators, builtin_group, word_product
from .parallel import TaskResult, TaskSpec, rewritability_parallel, run_task
from .rewritability import PermutationCache, is_rewritable, permutations_of

__all__ = [
    "AutSet",
    "AutSubgroup",
    "GroupTable",
    "LengthReport",
    "NRWRecord",
    "PermutationCache",
    "SearchOptions",
    "TaskResult",
    "TaskSpec",
    "automorphism_set",
    "brute_force_count",
    "build_group_from_generators",
    "builtin_group",
    "extend_record",
    "inner_automorphisms",
    "is_rewritable",
    "nontrivial_orbit_representatives",
    "permutations_of",
    "pointwise_stabilizer",
    "rewritability_length",
    "rewritability_parallel",
    "run_task",
    "stabilizer",
    "word_product",
]
