"""Permutations in one-line notation and their unsortedness measures.

Conventions, used across the whole package:

* a permutation of size n holds each value 1..n exactly once;
* ``elems[i]`` (0-based index i) is the value at 1-based position i+1;
* the position of value v, written pos(v), is 1-based.

All measures are exact integers:

* ``inversions``: number of pairs appearing in decreasing order;
* ``weighted_inversions``: inversions weighted by the value gap of the
  pair, equivalently half the sum of squared displacements;
* ``total_dislocation``: sum over values of |value - position|
  (Spearman's footrule);
* ``min_swaps_to_sort``: fewest arbitrary transpositions that sort.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


class Permutation:
    """A validated permutation of {1..n} in one-line notation."""

    __slots__ = ("_elems",)

    def __init__(self, elems):
        arr = np.array(elems, dtype=np.int64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a permutation needs at least one element")
        n = arr.size
        seen = np.zeros(n, dtype=bool)
        if arr.min() < 1 or arr.max() > n:
            raise ValueError("one-line notation must use each value in 1..n")
        seen[arr - 1] = True
        if not seen.all():
            raise ValueError("one-line notation must use each value in 1..n")
        arr.setflags(write=False)
        self._elems = arr

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(1, n + 1))

    @classmethod
    def descending(cls, n: int) -> "Permutation":
        return cls(np.arange(n, 0, -1))

    @property
    def elems(self) -> np.ndarray:
        return self._elems

    @property
    def n(self) -> int:
        return self._elems.size

    @property
    def positions(self) -> np.ndarray:
        """positions[v-1] is the 1-based position of value v."""
        pos = np.empty(self.n, dtype=np.int64)
        pos[self._elems - 1] = np.arange(1, self.n + 1)
        return pos

    def position(self, value: int) -> int:
        return int(self.positions[value - 1])

    def as_tuple(self) -> tuple:
        return tuple(int(v) for v in self._elems)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if isinstance(other, Permutation):
            return np.array_equal(self._elems, other._elems)
        return NotImplemented

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"Permutation({list(map(int, self._elems))})"


@dataclass(frozen=True)
class Fitness:
    """All integer unsortedness measures of a single permutation."""

    inversions: int
    weighted: int
    dislocation: int
    min_swaps: int


@dataclass
class BinarySequence:
    """A 0-1 sequence; the two-valued projection of a permutation."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits, dtype=np.int64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a binary sequence needs at least one element")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("binary sequence entries must be 0 or 1")
        self.bits = arr

    @property
    def n(self) -> int:
        return self.bits.size

    @property
    def zeros(self) -> int:
        return int(self.n - self.bits.sum())

    def as_tuple(self) -> tuple:
        return tuple(int(b) for b in self.bits)

    def copy(self) -> "BinarySequence":
        return BinarySequence(self.bits.copy())


def one_line(perm) -> np.ndarray:
    """Coerce a Permutation or raw one-line sequence to an int64 array."""
    if isinstance(perm, Permutation):
        return perm.elems
    return Permutation(perm).elems


def inversions(perm) -> int:
    """Count pairs of positions holding values in decreasing order."""
    return int(_kernels.count_inversions(one_line(perm)))


def weighted_inversions(perm) -> int:
    """Sum the value gap over all inverted pairs.

    Computed directly from the pair definition (Fenwick sweep); the two
    displacement-based identities are checked in the test suite rather
    than assumed.
    """
    return int(_kernels.sum_inverted_gaps(one_line(perm)))


def total_dislocation(perm) -> int:
    """Sum over values of the distance to their sorted position."""
    elems = one_line(perm)
    pos = np.arange(1, elems.size + 1, dtype=np.int64)
    return int(np.abs(pos - elems).sum())


def max_dislocation(perm) -> int:
    """Largest distance of any value from its sorted position."""
    elems = one_line(perm)
    pos = np.arange(1, elems.size + 1, dtype=np.int64)
    return int(np.abs(pos - elems).max())


def min_swaps_to_sort(perm) -> int:
    """Fewest arbitrary transpositions that sort the permutation.

    Equals n minus the number of cycles; swapping inside a cycle splits
    it, so each cycle of length L needs exactly L - 1 swaps.
    """
    elems = one_line(perm)
    return int(elems.size - _kernels.count_cycles(elems))


def fitness(perm) -> Fitness:
    """All unsortedness measures in one pass-friendly bundle."""
    elems = one_line(perm)
    return Fitness(
        inversions=int(_kernels.count_inversions(elems)),
        weighted=int(_kernels.sum_inverted_gaps(elems)),
        dislocation=total_dislocation(elems),
        min_swaps=min_swaps_to_sort(elems),
    )


def threshold_sequence(perm, k: int) -> BinarySequence:
    """Project to 0-1: position i gets 1 when its value exceeds k."""
    elems = one_line(perm)
    if not 1 <= k <= elems.size - 1:
        raise ValueError(f"threshold k must be in 1..n-1, got {k}")
    return BinarySequence((elems > k).astype(np.int64))


def sequence_inversions(bits) -> int:
    """Inversions of a 0-1 sequence: pairs with a one before a zero."""
    if isinstance(bits, BinarySequence):
        bits = bits.bits
    b = np.asarray(bits, dtype=np.int64)
    ones_before = np.cumsum(b) - b
    return int((ones_before * (1 - b)).sum())


def threshold_inversion_sum(perm) -> int:
    """Sum of inversions over all n-1 threshold projections.

    Agrees with weighted_inversions: an inverted pair with value gap g
    straddles exactly g of the thresholds.
    """
    elems = one_line(perm)
    n = elems.size
    if n == 1:
        return 0
    ks = np.arange(1, n, dtype=np.int64)
    bits = (elems[None, :] > ks[:, None]).astype(np.int64)
    ones_before = np.cumsum(bits, axis=1) - bits
    return int((ones_before * (1 - bits)).sum())


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """Uniform random permutation from an unbiased swap-based shuffle."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Permutation(_kernels.shuffled_identity(n, rng))
