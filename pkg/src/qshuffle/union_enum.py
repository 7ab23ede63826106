"""Random-order enumeration of a union of answer sets, without repetition.

Each iteration samples a set (weighted by live size), samples an answer
from it, and finds the answer's providers.  The minimum-index provider
owns the answer: it is deleted from all other providers immediately, and
emitted only when the sampled set is the owner; otherwise the iteration
rejects.  A rejected answer has lost its other providers, so it can be
rejected at most once, which bounds total iterations by twice the union
size while every emission stays uniform over the not-yet-emitted union.

Deletions live in a lazy permutation overlay per set, never in the
underlying index, so one index can back any number of sessions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .index import NOT_AN_ANSWER
from .shuffle import Rng


class EmptySetError(Exception):
    """Sampling from a set with no live answers."""


class DeleteAbsentError(Exception):
    """Deleting an answer that is not live (absent or already deleted)."""


class DeletableAnswerSet:
    """Sample/test/delete/count view over an immutable answer index.

    Positions a[0..i-1] of the virtual permutation hold deleted answer
    indexes, the rest are live; b is the inverse of the written part of
    a.  Every operation costs O(1) index calls.
    """

    def __init__(self, index):
        self.index = index
        self.n = index.count()
        self._i = 0
        self._a: dict[int, int] = {}
        self._b: dict[int, int] = {}

    def count(self) -> int:
        return self.n - self._i

    def sample(self, rng: Rng):
        """A uniformly random live answer; does not mutate the set."""
        if self._i >= self.n:
            raise EmptySetError("no live answers to sample")
        k = self._i + rng.uniform_below(self.n - self._i)
        return self.index.access(self._a.get(k, k))

    def _live_slot(self, answer) -> int | None:
        j = self.index.inverted_access(answer)
        if j is NOT_AN_ANSWER:
            return None
        k = self._b.get(j, j)
        return k if k >= self._i else None

    def test(self, answer) -> bool:
        """True iff `answer` is in the original set and not deleted."""
        return self._live_slot(answer) is not None

    def delete(self, answer) -> None:
        """Remove a live answer (swap its slot with the deletion frontier)."""
        k = self._live_slot(answer)
        if k is None:
            raise DeleteAbsentError(f"not a live answer: {answer!r}")
        i = self._i
        vi = self._a.get(i, i)
        vk = self._a.get(k, k)
        self._a[i] = vk
        self._a[k] = vi
        self._b[vk] = i
        self._b[vi] = k
        self._i = i + 1


@dataclass
class UnionStats:
    """Counts of an enumeration session; emission_marks snapshots the
    cumulative (iterations, rejections) after each emission."""

    iterations: int = 0
    rejections: int = 0
    emissions: int = 0
    emission_marks: list = field(default_factory=list)
    rejections_per_answer: Counter = field(default_factory=Counter)


def union_random_permutation(sets: list[DeletableAnswerSet], rng: Rng):
    """Enumerate the union of the sets in uniformly random order.

    Returns (iterator, stats); stats fills in while the iterator runs.
    The sets are consumed: after exhaustion every one is empty.
    """
    if not sets:
        raise ValueError("need at least one answer set")

    stats = UnionStats()

    def run():
        while True:
            counts = [s.count() for s in sets]
            total = sum(counts)
            if total == 0:
                return
            u = rng.uniform_below(total)
            chosen = 0
            while u >= counts[chosen]:
                u -= counts[chosen]
                chosen += 1
            element = sets[chosen].sample(rng)
            providers = [j for j, s in enumerate(sets) if s.test(element)]
            owner = providers[0]
            stats.iterations += 1
            for j in providers[1:]:
                sets[j].delete(element)
            if owner == chosen:
                sets[owner].delete(element)
                stats.emissions += 1
                stats.emission_marks.append((stats.iterations, stats.rejections))
                yield element
            else:
                stats.rejections += 1
                stats.rejections_per_answer[element] += 1

    return run(), stats
