"""Shared brute-force oracles, kept independent of the library internals."""

from collections import deque
from itertools import combinations

import numpy as np
import pytest


def brute_inversions(seq) -> int:
    seq = list(seq)
    return sum(1 for i, j in combinations(range(len(seq)), 2) if seq[i] > seq[j])


def brute_weighted(seq) -> int:
    seq = list(seq)
    return sum(seq[i] - seq[j] for i, j in combinations(range(len(seq)), 2)
               if seq[i] > seq[j])


def brute_dislocation(seq) -> int:
    seq = list(seq)
    return sum(abs(v - (seq.index(v) + 1)) for v in range(1, len(seq) + 1))


def brute_max_dislocation(seq) -> int:
    seq = list(seq)
    return max(abs(v - (seq.index(v) + 1)) for v in range(1, len(seq) + 1))


def brute_threshold_bits(seq, k) -> tuple:
    return tuple(1 if v > k else 0 for v in seq)


def brute_binary_inversions(bits) -> int:
    bits = list(bits)
    return sum(1 for i, j in combinations(range(len(bits)), 2) if bits[i] > bits[j])


def bfs_swap_distances(n) -> dict:
    """Exact distance of every permutation of 1..n from sorted, where one
    move swaps an arbitrary pair. Breadth-first search over the swap graph."""
    start = tuple(range(1, n + 1))
    dist = {start: 0}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        d = dist[state]
        for i, j in combinations(range(n), 2):
            succ = list(state)
            succ[i], succ[j] = succ[j], succ[i]
            succ = tuple(succ)
            if succ not in dist:
                dist[succ] = d + 1
                queue.append(succ)
    return dist


def binary_inversion_census(zeros: int, ones: int) -> list:
    """census[m] = number of 0-1 sequences with that many zeros/ones and
    exactly m pairs of a one before a zero. Exact integer dynamic program:
    appending a zero after o ones adds o inversions, appending a one adds
    none."""
    table = {(0, 0): [1]}
    for z in range(zeros + 1):
        for o in range(ones + 1):
            if (z, o) in table:
                continue
            poly = [0] * (z * o + 1)
            if z > 0:
                prev = table[(z - 1, o)]
                for m, c in enumerate(prev):
                    poly[m + o] += c
            if o > 0:
                prev = table[(z, o - 1)]
                for m, c in enumerate(prev):
                    poly[m] += c
            table[(z, o)] = poly
    return table[(zeros, ones)]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
