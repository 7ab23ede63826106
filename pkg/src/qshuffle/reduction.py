"""Rewriting free-connex queries into full acyclic joins.

The pipeline has three steps.  `normalize_atoms` gives every atom its
own relation copy and resolves constants and repeated variables by a
linear selection, so downstream code only ever sees self-join-free atoms
of distinct variables.  `full_reduction` runs the classic two semi-join
passes over a join tree, leaving every surviving tuple a participant in
some answer.  `project_to_full` then drops the existential columns:
each atom keeps its head variables only, and an atom whose head-variable
set is properly shrunk *and* covered by another atom is dropped entirely
(after the reduction its filter is implied).  The result is a full,
self-join-free, acyclic join instance with the same answers, over a
globally consistent database.
"""

from __future__ import annotations

from dataclasses import dataclass

from .queries import CQ, Atom, Const, JoinTree, Var, gyo_join_tree
from .values import Database, DataError, Relation


@dataclass(frozen=True)
class FullJoinInstance:
    """A full acyclic self-join-free query with a join tree and a database
    in which every tuple agrees with at least one answer."""

    query: CQ
    tree: JoinTree
    db: Database

    def relation_of(self, atom_id: int) -> Relation:
        return self.db[self.query.atoms[atom_id].relation]


def normalize_atoms(cq: CQ, db: Database) -> tuple[CQ, Database]:
    """One fresh relation copy per atom; constants and repeated variables
    are resolved by selection on the copy and dropped from the signature.

    The answer set is unchanged; output atoms carry distinct variables
    only and no two atoms share a relation symbol.
    """
    new_atoms = []
    new_rels = []
    for i, atom in enumerate(cq.atoms):
        rel = db.relations.get(atom.relation)
        if rel is None:
            raise DataError(f"unknown relation {atom.relation}")
        if rel.arity != len(atom.terms):
            raise DataError(
                f"atom {atom.relation} has {len(atom.terms)} terms, "
                f"but the relation has arity {rel.arity}"
            )
        keep: list[int] = []
        const_at: list[tuple[int, object]] = []
        same_as: list[tuple[int, int]] = []
        first_pos: dict[str, int] = {}
        for pos, term in enumerate(atom.terms):
            if isinstance(term, Const):
                const_at.append((pos, term.value))
            elif term.name in first_pos:
                same_as.append((pos, first_pos[term.name]))
            else:
                first_pos[term.name] = pos
                keep.append(pos)
        rows = []
        for t in rel.tuples:
            if all(t[p] == v for p, v in const_at) and all(t[p] == t[q] for p, q in same_as):
                rows.append(tuple(t[p] for p in keep))
        fresh = f"{atom.relation}#{i}"
        new_rels.append(Relation.make(fresh, len(keep), rows))
        new_atoms.append(Atom(fresh, tuple(Var(atom.terms[p].name) for p in keep)))
    return CQ(cq.name, cq.head, tuple(new_atoms)), Database.of(new_rels)


def _positions(atom: Atom) -> dict[str, int]:
    return {v: i for i, v in enumerate(atom.variables())}


def _shared_vars(child: Atom, parent: Atom) -> tuple[str, ...]:
    """Join-key variables, ordered as they appear in the child."""
    parent_vars = parent.var_set()
    return tuple(v for v in child.variables() if v in parent_vars)


def full_reduction(cq: CQ, tree: JoinTree, db: Database) -> Database:
    """Yannakakis two-pass semi-join reduction over the join tree.

    Removes every dangling tuple (leaf-to-root, then root-to-leaf) using
    hash semi-joins; canonical tuple order is preserved because both
    passes only filter.  Answers are unchanged; the output is globally
    consistent, possibly entirely empty.
    """
    atoms = cq.atoms
    work = {i: list(db[a.relation].tuples) for i, a in enumerate(atoms)}
    pos = {i: _positions(a) for i, a in enumerate(atoms)}
    order = tree.topological()

    def semi_join(target: int, source: int, shared: tuple[str, ...]) -> None:
        t_pos = [pos[target][v] for v in shared]
        s_pos = [pos[source][v] for v in shared]
        keys = {tuple(row[p] for p in s_pos) for row in work[source]}
        work[target] = [row for row in work[target] if tuple(row[p] for p in t_pos) in keys]

    for u in reversed(order):
        for c in tree.children[u]:
            semi_join(u, c, _shared_vars(atoms[c], atoms[u]))
    for u in order:
        for c in tree.children[u]:
            semi_join(c, u, _shared_vars(atoms[c], atoms[u]))

    rels = [
        Relation(atoms[i].relation, db[atoms[i].relation].arity, tuple(work[i]))
        for i in range(len(atoms))
    ]
    return Database.of(rels)


def _kept_atom_ids(cq: CQ) -> list[int]:
    """Atoms surviving head projection.

    An atom is dropped when its head-variable set is empty, or when the
    projection is proper and another atom's head-variable set covers it
    (which makes the projected filter redundant on a reduced database).
    Atoms already over head variables only are always kept, so full
    queries pass through unchanged.
    """
    head = set(cq.head)
    fvars = [tuple(v for v in a.variables() if v in head) for a in cq.atoms]
    fsets = [frozenset(f) for f in fvars]
    proper = [fsets[i] != cq.atoms[i].var_set() for i in range(len(cq.atoms))]

    def dominated(i: int) -> bool:
        if not proper[i]:
            return False
        for j in range(len(cq.atoms)):
            if j == i:
                continue
            if fsets[i] < fsets[j]:
                return True
            if fsets[i] == fsets[j] and (not proper[j] or j < i):
                return True
        return False

    return [i for i in range(len(cq.atoms)) if fsets[i] and not dominated(i)]


def project_to_full(cq: CQ, tree: JoinTree, db: Database) -> FullJoinInstance:
    """Drop existential columns from a reduced instance of a free-connex CQ.

    `cq` must be normalized (distinct-variable atoms) and `db` fully
    reduced over `tree`.  The remaining projected relations join to
    exactly the original answer set, stay globally consistent, and their
    hypergraph is acyclic; its GYO tree is returned with the instance.
    """
    kept = _kept_atom_ids(cq)
    if not kept:
        # Boolean query: all atoms are existential-only.  After a full
        # reduction the database is either entirely empty or satisfiable.
        satisfiable = all(len(db[a.relation]) > 0 for a in cq.atoms)
        rel = Relation("TRUE#0", 0, ((),) if satisfiable else ())
        atom = Atom(rel.name, ())
        out_tree = gyo_join_tree([frozenset()])
        return FullJoinInstance(CQ(cq.name, cq.head, (atom,)), out_tree, Database.of([rel]))

    head = set(cq.head)
    out_atoms = []
    out_rels = []
    for i in kept:
        atom = cq.atoms[i]
        cols = atom.variables()
        keep_pos = [p for p, v in enumerate(cols) if v in head]
        fresh = f"{atom.relation}~"
        rel = db[atom.relation]
        out_rels.append(
            Relation.make(fresh, len(keep_pos), (tuple(t[p] for p in keep_pos) for t in rel))
        )
        out_atoms.append(Atom(fresh, tuple(Var(cols[p]) for p in keep_pos)))

    out_tree = gyo_join_tree([a.var_set() for a in out_atoms])
    if out_tree is None:
        raise RuntimeError(
            "internal error: head-restricted hypergraph of a free-connex query must be acyclic"
        )
    out_q = CQ(cq.name, cq.head, tuple(out_atoms))
    return FullJoinInstance(out_q, out_tree, Database.of(out_rels))
