"""Counting, random access, inverted access and uniformly-random-order
enumeration for free-connex conjunctive queries and unions of them."""

from .bench import BenchReport, baseline_sample_with_rejection, bench_run
from .engine import CompiledCq, UnsupportedQueryError, build_union_sets, compile_cq
from .index import (
    NOT_AN_ANSWER,
    OUT_OF_BOUND,
    CqIndex,
    combine_index,
    split_index,
)
from .mcucq import (
    NOT_MC_UCQ,
    McUcqIndex,
    build_mcucq,
    largest_at_most,
    mcucq_random_permutation,
)
from .oracle import OracleGuardError, brute_force_answers
from .queries import (
    CQ,
    UCQ,
    Atom,
    Const,
    FcResult,
    JoinTree,
    ParseError,
    QueryClass,
    Var,
    gyo_join_tree,
    is_free_connex,
    parse_query,
    running_intersection_holds,
)
from .reduction import (
    FullJoinInstance,
    full_reduction,
    normalize_atoms,
    project_to_full,
)
from .shuffle import LazyShuffle, Rng, count_by_probing, permuted_indices, random_permutation
from .union_enum import (
    DeletableAnswerSet,
    DeleteAbsentError,
    EmptySetError,
    UnionStats,
    union_random_permutation,
)
from .values import (
    Database,
    DataError,
    Relation,
    Value,
    infer_column_types,
    intersect_relations,
    load_csv,
    row_key,
    value_key,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "CQ",
    "CompiledCq",
    "CqIndex",
    "Atom",
    "Const",
    "Database",
    "DataError",
    "DeletableAnswerSet",
    "DeleteAbsentError",
    "EmptySetError",
    "FcResult",
    "FullJoinInstance",
    "JoinTree",
    "LazyShuffle",
    "McUcqIndex",
    "NOT_AN_ANSWER",
    "NOT_MC_UCQ",
    "OUT_OF_BOUND",
    "OracleGuardError",
    "ParseError",
    "QueryClass",
    "Relation",
    "Rng",
    "UCQ",
    "UnionStats",
    "UnsupportedQueryError",
    "Value",
    "Var",
    "baseline_sample_with_rejection",
    "bench_run",
    "brute_force_answers",
    "build_mcucq",
    "build_union_sets",
    "combine_index",
    "compile_cq",
    "count_by_probing",
    "full_reduction",
    "gyo_join_tree",
    "infer_column_types",
    "intersect_relations",
    "is_free_connex",
    "largest_at_most",
    "load_csv",
    "mcucq_random_permutation",
    "normalize_atoms",
    "parse_query",
    "permuted_indices",
    "project_to_full",
    "random_permutation",
    "row_key",
    "running_intersection_holds",
    "split_index",
    "union_random_permutation",
    "value_key",
]
