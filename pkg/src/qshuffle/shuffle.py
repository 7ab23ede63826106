"""Random sources and random-order enumeration drivers.

`LazyShuffle` emits 0..n-1 in uniformly random order with O(1) work per
emission: the classic draw-and-swap shuffle run on a virtual identity
array, where a sparse map holds only the cells actually written.
Combined with a random-access handle (and, when the answer count is not
known, `count_by_probing`), this turns index access into random-order
enumeration without repetition.
"""

from __future__ import annotations

import random

from .index import OUT_OF_BOUND


class Rng:
    """Deterministic seeded randomness (Mersenne Twister core).

    `uniform_below(n)` is exactly uniform on [0, n): CPython draws
    getrandbits and rejects out-of-range values, so there is no modulo
    bias, and arbitrarily large n (counts beyond 64 bits) is supported.
    Same seed, same stream; not cryptographic.
    """

    __slots__ = ("seed", "_r")

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._r = random.Random(seed)

    def uniform_below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("uniform_below needs n >= 1")
        return self._r.randrange(n)

    def spawn(self) -> "Rng":
        """Derive an independent child generator (per-session seeding)."""
        return Rng(self._r.getrandbits(64))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed})"


class LazyShuffle:
    """Uniformly random permutation of 0..n-1, one element per `next` call.

    An unwritten cell k of the virtual array reads as k, so emitting only
    part of the permutation touches memory proportional to the calls made
    (at most two map entries per call), never to n.
    """

    __slots__ = ("n", "_i", "_a")

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("domain size must be nonnegative")
        self.n = n
        self._i = 0
        self._a: dict[int, int] = {}

    def next(self, rng: Rng) -> int | None:
        """The next permutation element, or None once all n are emitted."""
        i = self._i
        if i >= self.n:
            return None
        j = i + rng.uniform_below(self.n - i)
        a = self._a
        ai = a.get(i, i)
        aj = a.get(j, j)
        a[i] = aj
        a[j] = ai
        self._i = i + 1
        return aj

    @property
    def emitted(self) -> int:
        return self._i

    @property
    def materialized(self) -> int:
        """Map cells currently written (laziness diagnostic)."""
        return len(self._a)


def permuted_indices(n: int, rng: Rng):
    """Generator over a fresh LazyShuffle of 0..n-1."""
    shuf = LazyShuffle(n)
    while (k := shuf.next(rng)) is not None:
        yield k


def count_by_probing(access) -> int:
    """Exact answer count of a random-access handle, via O(log n) probes.

    `access(j)` must return OUT_OF_BOUND exactly when j >= n.  Gallops to
    the first out-of-bound power of two, then binary-searches; no a
    priori bound on n is needed.
    """
    if access(0) is OUT_OF_BOUND:
        return 0
    hi = 1
    while access(hi) is not OUT_OF_BOUND:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if access(mid) is OUT_OF_BOUND:
            hi = mid
        else:
            lo = mid
    return hi


def random_permutation(index, rng: Rng, count: int | None = None):
    """Yield every answer of `index` exactly once, in uniformly random order.

    `index` needs `access(j)`; the answer count is taken from
    `index.count()` unless given (probe it with count_by_probing when the
    handle cannot count).  Each emission costs one shuffle step plus one
    access.
    """
    n = index.count() if count is None else count
    shuf = LazyShuffle(n)
    while (k := shuf.next(rng)) is not None:
        answer = index.access(k)
        if answer is OUT_OF_BOUND:
            raise RuntimeError("access handle returned out-of-bound below its count")
        yield answer
