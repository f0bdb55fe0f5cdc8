import math
from itertools import permutations as iter_permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapsort import (
    Permutation,
    fitness,
    inversions,
    max_dislocation,
    min_swaps_to_sort,
    random_permutation,
    sequence_inversions,
    threshold_inversion_sum,
    threshold_sequence,
    total_dislocation,
    weighted_inversions,
)
from .conftest import (
    bfs_swap_distances,
    brute_binary_inversions,
    brute_dislocation,
    brute_inversions,
    brute_max_dislocation,
    brute_threshold_bits,
    brute_weighted,
)

perm_lists = st.integers(min_value=1, max_value=48).flatmap(
    lambda n: st.permutations(list(range(1, n + 1))))


class TestPermutationType:
    def test_validation(self):
        with pytest.raises(ValueError):
            Permutation([])
        with pytest.raises(ValueError):
            Permutation([1, 1])
        with pytest.raises(ValueError):
            Permutation([0, 1])
        with pytest.raises(ValueError):
            Permutation([1, 3])

    def test_inverse_relation(self):
        p = Permutation([3, 1, 4, 2])
        for i, v in enumerate(p.elems, start=1):
            assert p.position(int(v)) == i

    def test_constructors(self):
        assert Permutation.identity(4).as_tuple() == (1, 2, 3, 4)
        assert Permutation.descending(4).as_tuple() == (4, 3, 2, 1)

    def test_equality_and_hash(self):
        assert Permutation([2, 1]) == Permutation([2, 1])
        assert hash(Permutation([2, 1])) == hash(Permutation([2, 1]))
        assert Permutation([2, 1]) != Permutation([1, 2])

    def test_singleton(self):
        p = Permutation([1])
        assert fitness(p) == fitness(p.identity(1))
        assert inversions(p) == 0


class TestExamples:
    def test_inversions(self):
        assert inversions([1, 2, 3]) == 0
        assert inversions([3, 2, 1]) == 3  # C(3,2), attained by the reversal
        assert brute_inversions([4, 1, 2, 3]) == 3
        assert inversions([4, 1, 2, 3]) == 3

    def test_weighted(self):
        assert weighted_inversions([1, 2, 3]) == 0
        assert weighted_inversions([3, 2, 1]) == 4  # C(4,3), reversal maximum
        assert brute_weighted([2, 3, 1]) == 3
        assert weighted_inversions([2, 3, 1]) == 3

    def test_dislocation(self):
        assert total_dislocation([1, 2, 3, 4]) == 0
        assert total_dislocation([3, 2, 1]) == 4  # floor(9/2)
        assert brute_dislocation([2, 1, 3]) == 2
        assert total_dislocation([2, 1, 3]) == 2

    def test_min_swaps(self):
        assert min_swaps_to_sort([1, 2, 3]) == 0
        assert min_swaps_to_sort([2, 1, 3]) == 1
        assert min_swaps_to_sort([2, 3, 1]) == 2  # a 3-cycle needs two swaps

    def test_min_swaps_against_bfs(self):
        for n in range(2, 6):
            dist = bfs_swap_distances(n)
            for state, d in dist.items():
                assert min_swaps_to_sort(state) == d

    def test_max_dislocation(self):
        assert max_dislocation([1, 2, 3]) == 0
        assert max_dislocation([3, 2, 1]) == 2
        assert max_dislocation([2, 3, 4, 1]) == 3

    def test_threshold_sequence(self):
        assert threshold_sequence([2, 3, 1], 1).as_tuple() == (1, 1, 0)
        assert threshold_sequence([2, 3, 1], 2).as_tuple() == (0, 1, 0)
        for k in (1, 2, 3):
            bits = threshold_sequence([1, 2, 3, 4], k)
            assert bits.as_tuple() == tuple(sorted(bits.as_tuple()))
            assert bits.zeros == k
        with pytest.raises(ValueError):
            threshold_sequence([2, 1, 3], 0)
        with pytest.raises(ValueError):
            threshold_sequence([2, 1, 3], 3)

    def test_threshold_inversion_sum(self):
        # (2,3,1): thresholds (1,1,0) and (0,1,0) hold 2 and 1 inversions
        assert brute_binary_inversions((1, 1, 0)) == 2
        assert brute_binary_inversions((0, 1, 0)) == 1
        assert threshold_inversion_sum([2, 3, 1]) == 3
        assert threshold_inversion_sum([1, 2, 3, 4]) == 0
        assert threshold_inversion_sum([3, 2, 1]) == 4

    def test_sequence_inversions(self):
        assert sequence_inversions([0, 1, 0, 1]) == 1
        assert sequence_inversions((1, 1, 0)) == 2
        assert sequence_inversions([0] * 5) == 0


@settings(max_examples=150, deadline=None)
@given(perm_lists)
def test_measure_implementations_match_bruteforce(seq):
    assert inversions(seq) == brute_inversions(seq)
    assert weighted_inversions(seq) == brute_weighted(seq)
    assert total_dislocation(seq) == brute_dislocation(seq)
    assert max_dislocation(seq) == brute_max_dislocation(seq)
    for k in range(1, len(seq)):
        assert threshold_sequence(seq, k).as_tuple() == brute_threshold_bits(seq, k)


@settings(max_examples=150, deadline=None)
@given(perm_lists)
def test_relations_hold(seq):
    n = len(seq)
    i = inversions(seq)
    w = weighted_inversions(seq)
    d = total_dislocation(seq)
    ex = min_swaps_to_sort(seq)
    half = n // 2
    assert 0 <= i <= math.comb(n, 2)
    assert w <= math.comb(n + 1, 3)
    assert d <= n * n // 2
    assert 2 * i <= 2 * w <= n * i
    assert i * i <= 2 * n * w
    assert d <= 2 * w <= (n - 1) * d or n == 1
    assert i + ex <= d <= 2 * i
    assert d <= i + ex + half * (half - 1)


@settings(max_examples=150, deadline=None)
@given(perm_lists)
def test_weighted_identities(seq):
    n = len(seq)
    pos = [0] * (n + 1)
    for idx, v in enumerate(seq, start=1):
        pos[v] = idx
    w = weighted_inversions(seq)
    assert w == sum(i * (i - pos[i]) for i in range(1, n + 1))
    squares = sum((i - pos[i]) ** 2 for i in range(1, n + 1))
    assert squares % 2 == 0
    assert w == squares // 2
    assert w == threshold_inversion_sum(seq)


def test_relations_at_larger_sizes(rng):
    for n in (128, 512):
        for _ in range(20):
            seq = rng.permutation(np.arange(1, n + 1))
            i = inversions(seq)
            w = weighted_inversions(seq)
            d = total_dislocation(seq)
            ex = min_swaps_to_sort(seq)
            assert 2 * i <= 2 * w <= n * i
            assert i * i <= 2 * n * w
            assert d <= 2 * w <= (n - 1) * d
            assert i + ex <= d <= 2 * i
            assert w == threshold_inversion_sum(seq)


def test_fast_inversions_match_quadratic_reference(rng):
    # merge counting versus direct pair enumeration on 10^4 random inputs
    for _ in range(10_000):
        n = int(rng.integers(2, 128))
        seq = rng.permutation(np.arange(1, n + 1))
        gaps = seq[:, None] - seq[None, :]
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        inverted = upper & (gaps > 0)
        assert inversions(seq) == int(inverted.sum())
        assert weighted_inversions(seq) == int(gaps[inverted].sum())


def test_tightness_witnesses():
    for n in range(2, 9):
        rev = Permutation.descending(n)
        assert inversions(rev) == math.comb(n, 2)
        assert weighted_inversions(rev) == math.comb(n + 1, 3)
        assert total_dislocation(rev) == n * n // 2

        # largest element first: weighted count hits (n/2) * inversions
        cycled = [n] + list(range(1, n))
        assert 2 * weighted_inversions(cycled) == n * inversions(cycled)

        # swap first and last of the identity: weighted hits ((n-1)/2) * dislocation
        ends = [n] + list(range(2, n)) + [1]
        assert 2 * weighted_inversions(ends) == (n - 1) * total_dislocation(ends)


def test_uniform_averages_over_all_permutations():
    for n in range(2, 8):
        total_i = total_w = total_d = 0
        count = 0
        for seq in iter_permutations(range(1, n + 1)):
            total_i += inversions(seq)
            total_w += weighted_inversions(seq)
            total_d += total_dislocation(seq)
            count += 1
        assert count == math.factorial(n)
        assert 2 * total_i == count * math.comb(n, 2)
        assert 2 * total_w == count * math.comb(n + 1, 3)
        assert 3 * total_d == count * (n * n - 1)


class TestRandomPermutation:
    def test_trivial_and_deterministic(self):
        assert random_permutation(1, np.random.default_rng(0)).as_tuple() == (1,)
        a = random_permutation(50, np.random.default_rng(7))
        b = random_permutation(50, np.random.default_rng(7))
        assert a == b
        with pytest.raises(ValueError):
            random_permutation(0, np.random.default_rng(0))

    def test_uniformity_n3(self):
        draws = 60_000
        gen = np.random.default_rng(99)
        counts = {}
        for _ in range(draws):
            key = random_permutation(3, gen).as_tuple()
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 6
        expected = draws / 6
        sigma = math.sqrt(draws * (1 / 6) * (5 / 6))
        for key, c in counts.items():
            assert abs(c - expected) <= 4 * sigma, (key, c)
