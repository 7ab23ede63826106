"""Brute-force query evaluation, used as the independent test oracle.

Plain backtracking over atoms with incremental consistency checks: no
join trees, no reductions, no indexes.  It evaluates any CQ or UCQ
(cyclic ones included) so it strictly exceeds the engine's query class,
and it refuses to run past a step guard so a bad test instance fails
loudly instead of hanging.
"""

from __future__ import annotations

from .queries import CQ, UCQ, Const, Var
from .values import Database, row_key


class OracleGuardError(Exception):
    """The instance is too large for brute-force evaluation."""


def _answers_of_cq(cq: CQ, db: Database, budget: list[int]) -> set[tuple]:
    plans = []
    for atom in cq.atoms:
        rel = db.relations.get(atom.relation)
        if rel is None:
            raise KeyError(f"unknown relation {atom.relation}")
        if rel.arity != len(atom.terms):
            raise ValueError(
                f"atom {atom.relation} has {len(atom.terms)} terms, relation arity {rel.arity}"
            )
        plans.append((atom.terms, rel.tuples))

    answers: set[tuple] = set()

    def extend(i: int, binding: dict) -> None:
        if i == len(plans):
            answers.add(tuple(binding[v] for v in cq.head))
            return
        terms, rows = plans[i]
        for row in rows:
            local = {}
            ok = True
            for term, val in zip(terms, row):
                if isinstance(term, Const):
                    if term.value != val:
                        ok = False
                        break
                else:
                    bound = binding.get(term.name, local.get(term.name))
                    if bound is None:
                        local[term.name] = val
                    elif bound != val:
                        ok = False
                        break
            if not ok:
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise OracleGuardError("brute-force step guard exceeded")
            binding.update(local)
            extend(i + 1, binding)
            for v in local:
                del binding[v]

    extend(0, {})
    return answers


def brute_force_answers(query: CQ | UCQ, db: Database, max_steps: int = 1_000_000) -> list[tuple]:
    """All answers under set semantics, sorted in canonical tuple order."""
    disjuncts = query.disjuncts if isinstance(query, UCQ) else (query,)
    budget = [max_steps]
    answers: set[tuple] = set()
    for cq in disjuncts:
        answers |= _answers_of_cq(cq, db, budget)
    return sorted(answers, key=row_key)
