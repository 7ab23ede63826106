"""Deterministic random access for structurally aligned unions.

A union qualifies when its disjuncts share the head and the exact atom
patterns, differing only in relation symbols.  Then every disjunct
compiles to a full instance over the same tree, and each intersection of
disjuncts is the same pattern over per-atom intersections of those
derived relations, whose enumeration order is automatically a
subsequence of each member's order (buckets keep canonical tuple order,
and intersection only deletes tuples).

Access into the union follows the cascaded two-set scheme: the j-th
output of walking A while substituting the next B element whenever the A
element also lies in B.  The substitute's position is recovered by
inclusion-exclusion over intersection ranks, each rank found by a binary
search that pairs intersection access with base inverted access.
"""

from __future__ import annotations

from itertools import combinations

from .engine import compile_cq
from .index import NOT_AN_ANSWER, OUT_OF_BOUND, CqIndex
from .queries import CQ, UCQ, Atom
from .reduction import FullJoinInstance, full_reduction
from .shuffle import Rng, random_permutation
from .values import Database, intersect_relations


class _NotMcUcq:
    def __repr__(self):
        return "NotMcUcq"

    def __bool__(self):
        return False


NOT_MC_UCQ = _NotMcUcq()

MAX_MC_DISJUNCTS = 4  # intersection indexes grow as 2^m


def aligned_structure(ucq: UCQ) -> bool:
    """Conservative syntactic test: same head, same per-position atom
    patterns; only relation symbols may differ between disjuncts."""
    first = ucq.disjuncts[0]
    for d in ucq.disjuncts[1:]:
        if d.head != first.head or len(d.atoms) != len(first.atoms):
            return False
        for a, b in zip(d.atoms, first.atoms):
            if a.terms != b.terms:
                return False
    return True


def _intersection_instance(parts: list[FullJoinInstance], tag: str) -> FullJoinInstance:
    """Same pattern as the member instances, over per-atom intersected
    relations, re-reduced for global consistency."""
    template = parts[0]
    atoms = []
    rels = []
    for p, atom in enumerate(template.query.atoms):
        rel = template.relation_of(p)
        for other in parts[1:]:
            rel = intersect_relations(rel, other.relation_of(p))
        fresh = f"{tag}#{p}"
        rels.append(rel.rename(fresh))
        atoms.append(Atom(fresh, atom.terms))
    query = CQ(f"{template.query.name}{tag}", template.query.head, tuple(atoms))
    db = full_reduction(query, template.tree, Database.of(rels))
    return FullJoinInstance(query, template.tree, db)


def largest_at_most(t_index: CqIndex, s_index, answer) -> int:
    """1-based rank in T of the last T element not after `answer` in S's
    enumeration order; 0 when every T element comes later.

    T's order must be a subsequence of S's; `answer` must be in S.  Binary
    search over T ranks, comparing through S's inverted access, so each of
    the O(log |T|) steps costs one T access plus one S inverted access.
    """
    nt = t_index.count()
    if nt == 0:
        return 0
    j = s_index.inverted_access(answer)
    if j is NOT_AN_ANSWER:
        raise ValueError("largest_at_most needs an answer of the base set")
    first = s_index.inverted_access(t_index.access(0))
    if first == j:
        return 1
    if first > j:
        return 0
    last = s_index.inverted_access(t_index.access(nt - 1))
    if last <= j:
        return nt
    lo, hi = 1, nt  # T[lo] is before answer, T[hi] after (1-based ranks)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        at = s_index.inverted_access(t_index.access(mid - 1))
        if at == j:
            return mid
        if at < j:
            lo = mid
        else:
            hi = mid
    return lo


class McUcqIndex:
    """Count, random access and inverted access over a whole union.

    Immutable after build; enumeration order is the cascaded union order
    of the disjuncts' fixed orders.
    """

    def __init__(self, disjuncts: list[CqIndex], intersections: dict):
        self.disjuncts = disjuncts
        self.intersections = intersections  # (level, ids tuple) -> CqIndex
        m = len(disjuncts)
        self._m = m
        self._level_terms: list[list[tuple[int, CqIndex]]] = [[] for _ in range(m)]
        for (level, ids), idx in intersections.items():
            sign = 1 if len(ids) % 2 == 1 else -1
            self._level_terms[level].append((sign, idx))
        # |S_l  ∩  (S_{l+1} ∪ ... ∪ S_{m-1})| by inclusion-exclusion
        self.tail_overlap = [
            sum(sign * idx.count() for sign, idx in self._level_terms[level])
            for level in range(m)
        ]
        sizes = [0] * m
        sizes[m - 1] = disjuncts[m - 1].count()
        for level in range(m - 2, -1, -1):
            sizes[level] = disjuncts[level].count() + sizes[level + 1] - self.tail_overlap[level]
        self.union_sizes = sizes
        self.total = sizes[0]

    def count(self) -> int:
        return self.total

    def access(self, j: int):
        """The j-th union answer (cascaded order), else OUT_OF_BOUND."""
        if j < 0:
            raise ValueError("answer index must be nonnegative")
        if j >= self.total:
            return OUT_OF_BOUND
        return self._access_level(0, j)

    def _access_level(self, level: int, j: int):
        head = self.disjuncts[level]
        if level == self._m - 1:
            answer = head.access(j)
            assert answer is not OUT_OF_BOUND
            return answer
        n = head.count()
        if j < n:
            answer = head.access(j)
            if not self._in_tail(level, answer):
                return answer
            k = self.compute_k(level, answer)  # 1-based count, >= 1 here
            return self._access_level(level + 1, k - 1)
        return self._access_level(level + 1, j - n + self.tail_overlap[level])

    def _in_tail(self, level: int, answer) -> bool:
        return any(
            self.disjuncts[i].inverted_access(answer) is not NOT_AN_ANSWER
            for i in range(level + 1, self._m)
        )

    def compute_k(self, level: int, answer) -> int:
        """How many of the first answers of this level's set, up to and
        including `answer`, also lie in the union of the later sets."""
        base = self.disjuncts[level]
        return sum(
            sign * largest_at_most(t_idx, base, answer)
            for sign, t_idx in self._level_terms[level]
        )

    def inverted_access(self, answer):
        """The union index j with access(j) == answer, else NOT_AN_ANSWER."""
        return self._inverted_level(0, tuple(answer))

    def _inverted_level(self, level: int, answer):
        head = self.disjuncts[level]
        if level == self._m - 1:
            return head.inverted_access(answer)
        in_head = head.inverted_access(answer)
        in_tail = self._inverted_level(level + 1, answer)
        if in_tail is NOT_AN_ANSWER:
            return in_head  # own slot, or NOT_AN_ANSWER
        n = head.count()
        overlap = self.tail_overlap[level]
        rank = in_tail + 1  # 1-based rank in the tail union's order
        if rank > overlap:
            return n + in_tail - overlap
        # The answer is the rank-th tail element consumed while walking the
        # head set; its slot is the first head position covering that rank.
        lo, hi = 1, n
        while lo < hi:
            mid = (lo + hi) // 2
            if self.compute_k(level, head.access(mid - 1)) >= rank:
                hi = mid
            else:
                lo = mid + 1
        return lo - 1

    def random_permutation(self, rng: Rng):
        return random_permutation(self, rng)


def build_mcucq(ucq: UCQ, db: Database, max_disjuncts: int = MAX_MC_DISJUNCTS):
    """Build union random access, or NOT_MC_UCQ when the union does not
    pass the (conservative, syntactic) alignment check.

    Raises UnsupportedQueryError when some disjunct is not free-connex;
    that is a query-class problem, not an alignment one.
    """
    if len(ucq.disjuncts) > max_disjuncts or not aligned_structure(ucq):
        return NOT_MC_UCQ
    compiled = [compile_cq(d, db) for d in ucq.disjuncts]
    template = compiled[0].instance
    for c in compiled[1:]:
        assert c.instance.tree.parent == template.tree.parent, "aligned unions share trees"

    m = len(compiled)
    intersections = {}
    for level in range(m):
        for size in range(1, m - level):
            for ids in combinations(range(level + 1, m), size):
                tag = "i" + "_".join(str(x) for x in (level, *ids))
                members = [compiled[x].instance for x in (level, *ids)]
                intersections[(level, ids)] = CqIndex(_intersection_instance(members, tag))
    return McUcqIndex([c.index for c in compiled], intersections)


def mcucq_random_permutation(index: McUcqIndex, rng: Rng):
    """Uniform random-order stream over the union, one access per answer."""
    return random_permutation(index, rng)
