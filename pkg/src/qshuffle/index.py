"""Weighted bucketed join-tree index over a full acyclic join instance.

Build partitions every relation into buckets keyed by the values it
shares with its parent, then computes tuple weights leaf-to-root: a
tuple's weight is the number of answers it agrees with in its subtree,
so the single root bucket's weight is the answer count.  Indexed this
way, the structure answers `count` in O(1), `access` (answer by index)
with one binary search per tree node, and `inverted_access` (index by
answer) with hash lookups.

`OUT_OF_BOUND` and `NOT_AN_ANSWER` are results, not failures: callers
probe with out-of-range indexes on purpose and test membership through
inverted access.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .reduction import FullJoinInstance


class _Sentinel:
    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name


OUT_OF_BOUND = _Sentinel("OutOfBound")
NOT_AN_ANSWER = _Sentinel("NotAnAnswer")


def split_index(j: int, weights: list) -> list:
    """Mixed-radix split of a flat index; the last weight varies fastest.

    With weights (w1..wm), index j maps to digits (j1..jm) where jm is
    j mod wm and the remainder recurses on floor(j / wm).
    """
    total = 1
    for w in weights:
        if w < 1:
            raise ValueError(f"weights must be >= 1, got {w}")
        total *= w
    if not 0 <= j < total:
        raise ValueError(f"index {j} outside [0, {total})")
    out = [0] * len(weights)
    for i in range(len(weights) - 1, 0, -1):
        out[i] = j % weights[i]
        j //= weights[i]
    if weights:
        out[0] = j
    return out


def combine_index(pairs) -> int:
    """Exact inverse of split_index; pairs are (weight, digit) per child."""
    j = 0
    for w, i in pairs:
        if not 0 <= i < w:
            raise ValueError(f"digit {i} outside [0, {w})")
        j = j * w + i
    return j


@dataclass
class OpCounters:
    """Operation counts for complexity checks; advisory, not synchronized."""

    accesses: int = 0
    inverted_accesses: int = 0
    search_probes: int = 0
    build_touches: int = 0

    def reset(self) -> None:
        self.accesses = self.inverted_accesses = 0
        self.search_probes = self.build_touches = 0


@dataclass
class Bucket:
    rows: list
    weights: list
    starts: list  # prefix sums of weights, length len(rows) + 1

    @property
    def total(self):
        return self.starts[-1]


class BucketedRelation:
    """One join-tree node's relation, partitioned by parent-shared values."""

    __slots__ = ("key_positions", "buckets", "row_pos")

    def __init__(self, key_positions: tuple[int, ...]):
        self.key_positions = key_positions
        self.buckets: dict[tuple, Bucket] = {}
        self.row_pos: dict[tuple, tuple] = {}  # row -> (bucket key, position)


class CqIndex:
    """Immutable count/access/inverted-access structure for one instance.

    All query operations are read-only and safe for concurrent callers;
    `counters` is a best-effort diagnostic and the only unsynchronized
    state.  Weights are plain Python integers, so answer counts beyond
    64 bits are exact.
    """

    def __init__(self, instance: FullJoinInstance):
        self.instance = instance
        self.counters = OpCounters()
        q, tree = instance.query, instance.tree
        self.head = q.head
        self.root = tree.root
        self._children = tree.children
        self._vars = {i: a.variables() for i, a in enumerate(q.atoms)}
        colpos = {i: {v: p for p, v in enumerate(vs)} for i, vs in self._vars.items()}

        # Child c's bucket key: its variables shared with the parent, in
        # c's own column order; precompute positions on both sides.
        self._key_in_self: dict[int, tuple[int, ...]] = {}
        self._key_in_parent: dict[int, tuple[int, ...]] = {}
        for u in tree.nodes():
            p = tree.parent[u]
            if p is None:
                self._key_in_self[u] = ()
                continue
            shared = tuple(v for v in self._vars[u] if v in colpos[p])
            self._key_in_self[u] = tuple(colpos[u][v] for v in shared)
            self._key_in_parent[u] = tuple(colpos[p][v] for v in shared)

        self.bucketed: dict[int, BucketedRelation] = {}
        for u in reversed(tree.topological()):
            self._build_node(u, instance.relation_of(u))

        root_rel = self.bucketed[self.root]
        if len(root_rel.buckets) > 1:
            raise RuntimeError("internal error: root relation must have one bucket")
        self.total = root_rel.buckets[()].total if root_rel.buckets else 0

    def _build_node(self, u: int, relation) -> None:
        out = BucketedRelation(self._key_in_self[u])
        touches = 0
        for row in relation.tuples:
            key = tuple(row[p] for p in out.key_positions)
            bucket = out.buckets.get(key)
            if bucket is None:
                bucket = out.buckets[key] = Bucket([], [], [0])
            out.row_pos[row] = (key, len(bucket.rows))
            bucket.rows.append(row)
            touches += 1
        kids = self._children[u]
        for bucket in out.buckets.values():
            start = 0
            for row in bucket.rows:
                w = 1
                for c in kids:
                    ck = tuple(row[p] for p in self._key_in_parent[c])
                    child_bucket = self.bucketed[c].buckets.get(ck)
                    if child_bucket is None:
                        raise RuntimeError(
                            "internal error: missing child bucket; the instance "
                            "is not globally consistent"
                        )
                    w *= child_bucket.total
                    touches += 1
                bucket.weights.append(w)
                start += w
                bucket.starts.append(start)
        self.counters.build_touches += touches
        self.bucketed[u] = out

    # -- operations --------------------------------------------------------

    def count(self) -> int:
        return self.total

    def access(self, j: int):
        """The j-th answer of the fixed enumeration order, else OUT_OF_BOUND."""
        if j < 0:
            raise ValueError("answer index must be nonnegative")
        self.counters.accesses += 1
        if j >= self.total:
            return OUT_OF_BOUND
        assignment: dict[str, object] = {}
        self._descend(self.root, (), j, assignment)
        return tuple(assignment[v] for v in self.head)

    def _descend(self, u: int, key: tuple, j: int, assignment: dict) -> None:
        bucket = self.bucketed[u].buckets[key]
        pos = self._locate(bucket.starts, j)
        row = bucket.rows[pos]
        for v, val in zip(self._vars[u], row):
            assignment[v] = val
        kids = self._children[u]
        if not kids:
            return
        rest = j - bucket.starts[pos]
        keys = [tuple(row[p] for p in self._key_in_parent[c]) for c in kids]
        weights = [self.bucketed[c].buckets[k].total for c, k in zip(kids, keys)]
        for c, k, jc in zip(kids, keys, split_index(rest, weights)):
            self._descend(c, k, jc, assignment)

    def _locate(self, starts: list, j: int) -> int:
        """Rightmost position whose start index is <= j (counted probes)."""
        if len(starts) == 2:  # single tuple, nothing to search
            return 0
        lo, hi = 1, len(starts) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            self.counters.search_probes += 1
            if starts[mid] <= j:
                lo = mid + 1
            else:
                hi = mid
        return lo - 1

    def inverted_access(self, answer):
        """The index j with access(j) == answer, else NOT_AN_ANSWER."""
        answer = tuple(answer)
        if len(answer) != len(self.head):
            raise ValueError(f"answer arity {len(answer)}, expected {len(self.head)}")
        self.counters.inverted_accesses += 1
        assignment: dict[str, object] = {}
        for v, val in zip(self.head, answer):
            if assignment.setdefault(v, val) != val:
                return NOT_AN_ANSWER
        return self._index_of(self.root, assignment)

    def _index_of(self, u: int, assignment: dict):
        rel = self.bucketed[u]
        try:
            row = tuple(assignment[v] for v in self._vars[u])
        except (KeyError, TypeError):
            return NOT_AN_ANSWER
        hit = rel.row_pos.get(row)
        if hit is None:
            return NOT_AN_ANSWER
        key, pos = hit
        pairs = []
        for c in self._children[u]:
            jc = self._index_of(c, assignment)
            if jc is NOT_AN_ANSWER:
                return NOT_AN_ANSWER
            ck = tuple(row[p] for p in self._key_in_parent[c])
            pairs.append((self.bucketed[c].buckets[ck].total, jc))
        return rel.buckets[key].starts[pos] + combine_index(pairs)

    # -- diagnostics --------------------------------------------------------

    def probe_bound_per_access(self) -> int:
        """Upper bound on binary-search probes in one access call."""
        bound = 0
        for u, rel in self.bucketed.items():
            largest = max((len(b.rows) for b in rel.buckets.values()), default=1)
            bound += max(1, largest).bit_length() + 1
        return bound
