"""End-to-end compilation: classify, normalize, reduce, project, index."""

from __future__ import annotations

from dataclasses import dataclass

from .index import CqIndex
from .queries import CQ, UCQ, FcResult, QueryClass, is_free_connex
from .reduction import FullJoinInstance, full_reduction, normalize_atoms, project_to_full
from .union_enum import DeletableAnswerSet
from .values import Database


class UnsupportedQueryError(Exception):
    """The engine only evaluates free-connex CQs (and unions of them)."""

    def __init__(self, classification: QueryClass, message: str):
        super().__init__(message)
        self.classification = classification


@dataclass(frozen=True)
class CompiledCq:
    query: CQ
    instance: FullJoinInstance
    index: CqIndex


def compile_cq(cq: CQ, db: Database) -> CompiledCq:
    """Build the count/access/inverted-access index for one free-connex CQ."""
    result: FcResult = is_free_connex(cq)
    if result.kind is not QueryClass.FREE_CONNEX:
        raise UnsupportedQueryError(
            result.kind,
            f"query {cq.name} is {result.kind.value}; evaluation needs a free-connex query",
        )
    norm_q, norm_db = normalize_atoms(cq, db)
    reduced = full_reduction(norm_q, result.join_tree, norm_db)
    instance = project_to_full(norm_q, result.join_tree, reduced)
    return CompiledCq(cq, instance, CqIndex(instance))


def classify_disjuncts(ucq: UCQ) -> list[FcResult]:
    return [is_free_connex(d) for d in ucq.disjuncts]


def build_union_sets(ucq: UCQ, db: Database) -> list[DeletableAnswerSet]:
    """One deletion-capable answer set per disjunct, in union order."""
    return [DeletableAnswerSet(compile_cq(d, db).index) for d in ucq.disjuncts]
