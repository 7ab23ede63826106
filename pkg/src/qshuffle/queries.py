"""Rule-text parsing, query hypergraphs, acyclicity and join trees.

Queries are written one per file in rule form::

    Q(x, y) :- R(x, y), S(y, z). UNION Q(x, y) :- T(x, y).

Identifiers starting with a letter are variables; integer literals and
double-quoted strings are constants.  Acyclicity is decided by GYO ear
removal, and free-connexity by rerunning GYO after adding a hyperedge
over the head variables.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .values import INT64_MAX, INT64_MIN, Value


class ParseError(Exception):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"at position {position}: {message}"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Value


Term = Var | Const


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]

    def variables(self) -> tuple[str, ...]:
        """Variable names in term order, first occurrence only."""
        seen = set()
        out = []
        for t in self.terms:
            if isinstance(t, Var) and t.name not in seen:
                seen.add(t.name)
                out.append(t.name)
        return tuple(out)

    def var_set(self) -> frozenset[str]:
        return frozenset(self.variables())


@dataclass(frozen=True)
class CQ:
    name: str
    head: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def is_full(self) -> bool:
        head = set(self.head)
        return all(v in head for a in self.atoms for v in a.variables())


@dataclass(frozen=True)
class UCQ:
    disjuncts: tuple[CQ, ...]

    @property
    def head_arity(self) -> int:
        return len(self.disjuncts[0].head)


class QueryClass(Enum):
    FREE_CONNEX = "free-connex"
    ACYCLIC_NOT_FREE_CONNEX = "acyclic-not-free-connex"
    CYCLIC = "cyclic"


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<ARROW>:-)
      | (?P<NAME>[A-Za-z][A-Za-z0-9_]*)
      | (?P<INT>-?\d+)
      | (?P<STRING>"[^"\n]*")
      | (?P<LPAREN>\()
      | (?P<RPAREN>\))
      | (?P<COMMA>,)
      | (?P<DOT>\.)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "WS":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self._tokens = _tokenize(text)
        self._at = 0

    def _peek(self):
        return self._tokens[self._at]

    def _next(self):
        tok = self._tokens[self._at]
        self._at += 1
        return tok

    def _expect(self, kind: str, what: str):
        tok = self._next()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse_ucq(self) -> UCQ:
        disjuncts = [self._parse_rule()]
        while True:
            kind, text, pos = self._peek()
            if kind == "EOF":
                break
            if kind == "NAME" and text == "UNION":
                self._next()
                disjuncts.append(self._parse_rule())
                continue
            raise ParseError(f"expected UNION or end of input, found {text!r}", pos)
        arities = {len(d.head) for d in disjuncts}
        if len(arities) > 1:
            raise ParseError("disjuncts have mismatched head arities")
        return UCQ(tuple(disjuncts))

    def _parse_rule(self) -> CQ:
        name = self._expect("NAME", "query name")[1]
        self._expect("LPAREN", "'('")
        head = self._parse_varlist()
        self._expect("ARROW", "':-'")
        atoms = [self._parse_atom()]
        while self._peek()[0] == "COMMA":
            self._next()
            atoms.append(self._parse_atom())
        self._expect("DOT", "'.'")
        cq = CQ(name, tuple(head), tuple(atoms))
        self._check_rule(cq)
        return cq

    def _parse_varlist(self) -> list[str]:
        out = []
        if self._peek()[0] == "RPAREN":
            self._next()
            return out
        while True:
            out.append(self._expect("NAME", "head variable")[1])
            kind, _, _ = self._next()
            if kind == "RPAREN":
                return out
            if kind != "COMMA":
                raise ParseError("expected ',' or ')' in head", self._tokens[self._at - 1][2])

    def _parse_atom(self) -> Atom:
        name = self._expect("NAME", "relation name")[1]
        self._expect("LPAREN", "'('")
        terms = [self._parse_term()]
        while True:
            kind, _, pos = self._next()
            if kind == "RPAREN":
                return Atom(name, tuple(terms))
            if kind != "COMMA":
                raise ParseError("expected ',' or ')' in atom", pos)
            terms.append(self._parse_term())

    def _parse_term(self) -> Term:
        kind, text, pos = self._next()
        if kind == "NAME":
            return Var(text)
        if kind == "INT":
            v = int(text)
            if not (INT64_MIN <= v <= INT64_MAX):
                raise ParseError(f"integer constant out of 64-bit range: {text}", pos)
            return Const(v)
        if kind == "STRING":
            return Const(text[1:-1])
        raise ParseError(f"expected a term, found {text or 'end of input'!r}", pos)

    @staticmethod
    def _check_rule(cq: CQ) -> None:
        body_vars = {v for a in cq.atoms for v in a.variables()}
        for v in cq.head:
            if v not in body_vars:
                raise ParseError(f"unsafe head variable {v!r} in {cq.name}")


def parse_query(text: str) -> UCQ:
    """Parse rule text into a UCQ (a single rule yields one disjunct).

    Raises ParseError for syntax errors (with position), unsafe head
    variables, inconsistent relation arities, or mismatched head arities
    across disjuncts.
    """
    ucq = _Parser(text).parse_ucq()
    arities: dict[str, int] = {}
    for d in ucq.disjuncts:
        for a in d.atoms:
            known = arities.setdefault(a.relation, len(a.terms))
            if known != len(a.terms):
                raise ParseError(
                    f"relation {a.relation} used with arities {known} and {len(a.terms)}"
                )
    return ucq


# ---------------------------------------------------------------------------
# hypergraph, GYO ear removal, join trees


@dataclass(frozen=True)
class Hypergraph:
    nodes: frozenset[str]
    edges: tuple[frozenset[str], ...]


def build_hypergraph(cq: CQ) -> Hypergraph:
    edges = tuple(a.var_set() for a in cq.atoms)
    nodes = frozenset(v for e in edges for v in e)
    return Hypergraph(nodes, edges)


@dataclass(frozen=True)
class JoinTree:
    """Rooted tree over atom ids with the running-intersection property."""

    root: int
    parent: dict
    children: dict

    def nodes(self) -> list[int]:
        return sorted(self.parent)

    def topological(self) -> list[int]:
        """Root first; every parent precedes its children."""
        order = [self.root]
        for u in order:
            order.extend(self.children[u])
        return order


def gyo_join_tree(edges: Sequence[Iterable[str]]) -> JoinTree | None:
    """GYO ear removal; returns a join tree iff the hypergraph is acyclic.

    Ears are searched in ascending edge id, witnesses take the lowest
    eligible id, and the tree is rooted at the ear removed last, so equal
    inputs always yield the same tree.
    """
    edges = [frozenset(e) for e in edges]
    n = len(edges)
    if n == 0:
        raise ValueError("empty hypergraph")
    alive = list(range(n))
    links = []
    removed = []
    while len(alive) > 1:
        found = None
        for e in alive:
            shared = edges[e] & frozenset().union(*(edges[f] for f in alive if f != e))
            witness = next((f for f in alive if f != e and shared <= edges[f]), None)
            if witness is not None:
                found = (e, witness)
                break
        if found is None:
            return None
        ear, witness = found
        links.append((ear, witness))
        alive.remove(ear)
        removed.append(ear)
    root = removed[-1] if removed else alive[0]

    adj = defaultdict(list)
    for a, b in links:
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[int, int | None] = {root: None}
    children: dict[int, tuple[int, ...]] = {}
    frontier = [root]
    while frontier:
        u = frontier.pop()
        kids = tuple(sorted(v for v in adj[u] if v not in parent))
        children[u] = kids
        for v in kids:
            parent[v] = u
        frontier.extend(reversed(kids))
    return JoinTree(root, parent, children)


def running_intersection_holds(edges: Sequence[Iterable[str]], tree: JoinTree) -> bool:
    """Direct check: nodes containing each variable form a connected subtree."""
    edges = [frozenset(e) for e in edges]
    if sorted(tree.parent) != list(range(len(edges))):
        return False
    for v in frozenset().union(*edges):
        members = {i for i, e in enumerate(edges) if v in e}
        start = next(iter(members))
        seen = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for w in (tree.parent[u], *tree.children[u]):
                if w is not None and w in members and w not in seen:
                    seen.add(w)
                    frontier.append(w)
        if seen != members:
            return False
    return True


@dataclass(frozen=True)
class FcResult:
    kind: QueryClass
    join_tree: JoinTree | None  # tree of the query's own hypergraph when acyclic


def is_free_connex(cq: CQ) -> FcResult:
    """Classify a CQ and, when acyclic, keep its join tree for downstream use."""
    edges = [a.var_set() for a in cq.atoms]
    base = gyo_join_tree(edges)
    if base is None:
        return FcResult(QueryClass.CYCLIC, None)
    extended = gyo_join_tree([*edges, frozenset(cq.head)])
    if extended is None:
        return FcResult(QueryClass.ACYCLIC_NOT_FREE_CONNEX, base)
    return FcResult(QueryClass.FREE_CONNEX, base)
