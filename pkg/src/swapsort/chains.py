"""Exact Markov-chain analysis of the swap process at small sizes.

Builds the full transition matrix over all permutations of {1..n} (or
all 0-1 sequences with a fixed number of zeros), solves for the
stationary distribution, and provides the standard diagnostics:
detailed balance, cycle-ratio reversibility checks, total variation and
mixing time, plus the exact one-step drift of the weighted inversion
count under all-pairs swapping.

State spaces grow factorially, so construction is capped at n = 8.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

MAX_EXACT_N = 8
MAX_MIXING_STATES = 2048


class StationarySolveError(RuntimeError):
    """Power iteration failed to converge; the chain is ergodic, so this
    signals a construction bug rather than a legitimate outcome."""


@dataclass
class ChainModel:
    """Enumerated state space with a sparse row-stochastic matrix."""

    states: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]
    matrix: sp.csr_matrix
    n: int
    r: int | None  # None for the 0-1 chain, which is adjacent-only
    p: float
    kind: str  # "permutation" or "binary"
    inversions: np.ndarray
    weighted: np.ndarray | None
    dislocation: np.ndarray | None

    @property
    def size(self) -> int:
        return len(self.states)


@dataclass
class StationaryResult:
    """Stationary vector with residual and fitness expectations."""

    q: np.ndarray
    residual: float | None
    iterations: int | None
    expected_inversions: float
    expected_weighted: float | None
    expected_dislocation: float | None
    normalizer: float | None = None


def _validate_p(p: float) -> None:
    if not 0.0 < p < 0.5:
        raise ValueError(f"p must satisfy 0 < p < 1/2, got {p}")


def _permutation_fitness(states: np.ndarray):
    """Vectorized I, W, D over a (count, n) matrix of one-line rows."""
    count, n = states.shape
    inv = np.zeros(count, np.int64)
    wgt = np.zeros(count, np.int64)
    for i in range(n - 1):
        for j in range(i + 1, n):
            gap = states[:, i] - states[:, j]
            inverted = gap > 0
            inv += inverted
            wgt += np.where(inverted, gap, 0)
    pos = np.arange(1, n + 1, dtype=np.int64)
    dis = np.abs(states - pos[None, :]).sum(axis=1)
    return inv, wgt, dis


def build_chain(n: int, r: int, p: float) -> ChainModel:
    """Exact transition matrix of the swap process on all of S_n.

    Every position pair at distance <= r is selected with equal
    probability; a selected pair moves to its descending arrangement
    with probability p and ascending otherwise, so the diagonal collects
    the complementary mass.
    """
    if not 2 <= n <= MAX_EXACT_N:
        raise ValueError(f"exact chains support 2 <= n <= {MAX_EXACT_N}, got n={n}")
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..n, got {r}")
    _validate_p(p)

    states = list(itertools.permutations(range(1, n + 1)))
    index = {s: i for i, s in enumerate(states)}
    rp = min(r, n - 1)
    pairs = [(i, i + d) for d in range(1, rp + 1) for i in range(n - d)]
    select = 1.0 / len(pairs)

    size = len(states)
    rows = []
    cols = []
    vals = []
    diag = np.zeros(size)
    for si, s in enumerate(states):
        for i, j in pairs:
            swap_prob = p if s[i] < s[j] else 1.0 - p
            succ = list(s)
            succ[i], succ[j] = succ[j], succ[i]
            rows.append(si)
            cols.append(index[tuple(succ)])
            vals.append(select * swap_prob)
            diag[si] += select * (1.0 - swap_prob)
    rows.extend(range(size))
    cols.extend(range(size))
    vals.extend(diag)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))

    arr = np.array(states, dtype=np.int64)
    inv, wgt, dis = _permutation_fitness(arr)
    return ChainModel(states=states, index=index, matrix=matrix, n=n, r=r, p=p,
                      kind="permutation", inversions=inv, weighted=wgt,
                      dislocation=dis)


def build_binary_chain(n: int, k: int, p: float) -> ChainModel:
    """Exact transition matrix of the adjacent-swap process on 0-1
    sequences with k zeros and n-k ones.

    Equal adjacent bits leave the state unchanged whatever the draw, so
    their full selection mass goes to the diagonal.
    """
    if n < 2 or n > 16:
        raise ValueError(f"binary chains support 2 <= n <= 16, got n={n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in 1..n-1, got {k}")
    _validate_p(p)

    states = [s for s in itertools.product((0, 1), repeat=n) if s.count(0) == k]
    index = {s: i for i, s in enumerate(states)}
    select = 1.0 / (n - 1)

    size = len(states)
    rows = []
    cols = []
    vals = []
    diag = np.zeros(size)
    for si, s in enumerate(states):
        for i in range(n - 1):
            if s[i] == s[i + 1]:
                diag[si] += select
                continue
            swap_prob = p if s[i] < s[i + 1] else 1.0 - p
            succ = list(s)
            succ[i], succ[i + 1] = succ[i + 1], succ[i]
            rows.append(si)
            cols.append(index[tuple(succ)])
            vals.append(select * swap_prob)
            diag[si] += select * (1.0 - swap_prob)
    rows.extend(range(size))
    cols.extend(range(size))
    vals.extend(diag)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))

    bits = np.array(states, dtype=np.int64)
    ones_before = np.cumsum(bits, axis=1) - bits
    inv = (ones_before * (1 - bits)).sum(axis=1)
    # for 0-1 values every inverted pair has value gap exactly one
    return ChainModel(states=states, index=index, matrix=matrix, n=n, r=None,
                      p=p, kind="binary", inversions=inv, weighted=inv.copy(),
                      dislocation=None)


def _expectations(chain: ChainModel, q: np.ndarray):
    e_inv = float(q @ chain.inversions)
    e_wgt = float(q @ chain.weighted) if chain.weighted is not None else None
    e_dis = float(q @ chain.dislocation) if chain.dislocation is not None else None
    return e_inv, e_wgt, e_dis


def stationary(chain: ChainModel, tol: float = 1e-14,
               max_iterations: int = 500_000) -> StationaryResult:
    """Solve q = qP by power iteration from the uniform vector.

    Stops when successive iterates differ by less than tol in max norm;
    the reported residual is max|qP - q| of the final vector.
    """
    pt = chain.matrix.transpose().tocsr()
    q = np.full(chain.size, 1.0 / chain.size)
    iterations = 0
    while iterations < max_iterations:
        nxt = pt @ q
        nxt /= nxt.sum()
        iterations += 1
        diff = np.abs(nxt - q).max()
        q = nxt
        if diff < tol:
            break
    else:
        raise StationarySolveError(
            f"no convergence after {max_iterations} iterations (last diff {diff:.3e})")
    residual = float(np.abs(pt @ q - q).max())
    e_inv, e_wgt, e_dis = _expectations(chain, q)
    return StationaryResult(q=q, residual=residual, iterations=iterations,
                            expected_inversions=e_inv, expected_weighted=e_wgt,
                            expected_dislocation=e_dis)


def closed_form_stationary(n: int, p: float) -> StationaryResult:
    """Stationary law of the adjacent-swap chain in closed form.

    Probabilities are proportional to (p/(1-p)) raised to the inversion
    count, over states in the same lexicographic order that build_chain
    uses. Holds for adjacent swaps only.
    """
    if not 2 <= n <= MAX_EXACT_N:
        raise ValueError(f"closed form supports 2 <= n <= {MAX_EXACT_N}, got n={n}")
    _validate_p(p)
    states = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)
    inv, wgt, dis = _permutation_fitness(states)
    c = p / (1.0 - p)
    weights = c ** inv.astype(np.float64)
    z = float(weights.sum())
    q = weights / z
    return StationaryResult(
        q=q, residual=None, iterations=None,
        expected_inversions=float(q @ inv),
        expected_weighted=float(q @ wgt),
        expected_dislocation=float(q @ dis),
        normalizer=z,
    )


def detailed_balance_violation(chain: ChainModel, q: np.ndarray) -> float:
    """Largest |q(s)P(s,s') - q(s')P(s',s)| over all state pairs."""
    flux = sp.diags(q) @ chain.matrix
    asym = (flux - flux.transpose()).tocoo()
    if asym.nnz == 0:
        return 0.0
    return float(np.abs(asym.data).max())


def kolmogorov_cycle_ratio(chain: ChainModel, cycle) -> float:
    """Probability of traversing a state cycle forwards over backwards.

    A ratio of one for every cycle is equivalent to reversibility; the
    constant pair-selection factors cancel, so the ratio isolates the
    good/bad swap asymmetry.
    """
    seq = [tuple(int(v) for v in s) for s in cycle]
    if len(seq) < 2:
        raise ValueError("a cycle needs at least two states")
    if seq[0] != seq[-1]:
        seq.append(seq[0])
    forward = 1.0
    backward = 1.0
    for a, b in zip(seq[:-1], seq[1:]):
        ia = chain.index[a]
        ib = chain.index[b]
        f = chain.matrix[ia, ib]
        g = chain.matrix[ib, ia]
        if f == 0.0 or g == 0.0:
            raise ValueError(f"cycle uses an impossible transition {a} -> {b}")
        forward *= f
        backward *= g
    return float(forward / backward)


def total_variation(u: np.ndarray, v: np.ndarray) -> float:
    """Half the L1 distance between two distributions."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return 0.5 * float(np.abs(u - v).sum())


def _worst_start_tv(power: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(power - q[None, :]).sum(axis=1).max())


def mixing_time(chain: ChainModel, eps: float, max_time: int = 2 ** 24) -> int:
    """Smallest t whose worst-start distribution is within eps of
    stationary in total variation.

    Uses repeated squaring of the dense matrix plus binary search, which
    is valid because the worst-start distance never increases with t.
    """
    if chain.size > MAX_MIXING_STATES:
        raise ValueError(
            f"mixing_time supports at most {MAX_MIXING_STATES} states, got {chain.size}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    q = stationary(chain).q
    dense = chain.matrix.toarray()
    identity = np.eye(chain.size)
    if _worst_start_tv(identity, q) <= eps:
        return 0

    powers = [dense]  # powers[i] = P^(2^i)
    t = 1
    while _worst_start_tv(powers[-1], q) > eps:
        t *= 2
        if t > max_time:
            raise RuntimeError(f"mixing time exceeds cap {max_time}")
        powers.append(powers[-1] @ powers[-1])

    if len(powers) == 1:
        return 1
    lo = t // 2  # d(lo) > eps
    hi = t       # d(hi) <= eps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        acc = identity
        m = mid
        bit = 0
        while m:
            if m & 1:
                acc = acc @ powers[bit]
            m >>= 1
            bit += 1
        if _worst_start_tv(acc, q) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def weighted_drift(perm, p: float) -> tuple[float, float]:
    """Expected one-step increase and decrease of the weighted inversion
    count under all-pairs swapping.

    Each correctly ordered value pair can be bad-swapped (probability p
    given selection) and each inverted pair good-swapped (probability
    1-p); either way the weighted count moves by value gap times
    position gap.
    """
    from .permutations import one_line

    elems = one_line(perm)
    n = elems.size
    _validate_p(p)
    pos = np.empty(n, dtype=np.int64)
    pos[elems - 1] = np.arange(1, n + 1)
    values = np.arange(1, n + 1, dtype=np.int64)
    value_gap = values[None, :] - values[:, None]      # v - u for pair (u, v)
    position_gap = pos[None, :] - pos[:, None]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)  # u < v
    ordered = upper & (position_gap > 0)
    inverted = upper & (position_gap < 0)
    pair_count = math.comb(n, 2)
    plus = p / pair_count * float((value_gap * position_gap)[ordered].sum())
    minus = (1.0 - p) / pair_count * float((value_gap * -position_gap)[inverted].sum())
    return plus, minus


def geometric_walk_expectation(p: float, i_max: int) -> float:
    """Mean of the truncated geometric stationary law with ratio 2p/(1-p).

    This dominates the inversion count of the 0-1 chain; as i_max grows
    it approaches 2p/(1-3p). Only defined for ratio < 1, i.e. p < 1/3.
    """
    if i_max < 1:
        raise ValueError("i_max must be at least 1")
    if not 0.0 < p:
        raise ValueError("p must be positive")
    c = 2.0 * p / (1.0 - p)
    if c >= 1.0:
        raise ValueError(f"ratio 2p/(1-p) = {c:.4g} >= 1; bound needs p < 1/3")
    z = (1.0 - c ** (i_max + 1)) / (1.0 - c)
    series = c * (1.0 + i_max * c ** (i_max + 1) - (i_max + 1) * c ** i_max) / (1.0 - c) ** 2
    return series / z
