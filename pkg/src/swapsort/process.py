"""The noisy swap process on permutations and on 0-1 sequences.

One transition: pick positions i < j uniformly among all pairs at
distance at most r, compare the two values with a comparison that errs
with probability p, and swap exactly when the (possibly wrong) verdict
says they are out of order. Equivalently: the selected pair ends up in
descending order with probability p and ascending order otherwise.

States carry their fitness measures incrementally so long runs never
rescan the permutation; `advance` drives the jitted kernel and is the
fast path, `step` is the plain-Python reference path with identical
semantics and random-draw order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .permutations import BinarySequence, Permutation

# substream tags so that simulation, detection and statistics runs never
# share random draws
RUN_STREAM = 0
DETECT_STREAM = 1
STATS_STREAM = 2


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator derived from a base seed and an index path."""
    return np.random.default_rng([int(seed)] + [int(x) for x in path])


@dataclass(frozen=True)
class ProcessParams:
    """Problem size n, swap range r, comparison error rate p, base seed."""

    n: int
    r: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 1 <= self.r <= self.n:
            raise ValueError(f"r must be in 1..n, got {self.r}")
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"p must satisfy 0 < p < 1/2, got {self.p}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    @property
    def effective_range(self) -> int:
        """Swap distances are capped at n-1; r >= n-1 means all pairs."""
        return min(self.r, self.n - 1)

    @property
    def pair_count(self) -> int:
        rp = self.effective_range
        return rp * self.n - rp * (rp + 1) // 2

    def distance_cumulative(self) -> np.ndarray:
        """dist_cum[d] = number of position pairs at distance <= d."""
        counts = self.n - np.arange(0, self.effective_range + 1, dtype=np.int64)
        counts[0] = 0
        return np.cumsum(counts)


@dataclass
class ProcessState:
    """Evolving permutation plus step counter, cached fitness and RNG."""

    elems: np.ndarray
    t: int
    inversions: int
    weighted: int
    dislocation: int
    rng: np.random.Generator

    def permutation(self) -> Permutation:
        return Permutation(self.elems.copy())


@dataclass
class Trajectory:
    """Fitness samples (step, I, W, D[, max dislocation]) of one run."""

    steps: np.ndarray
    inversions: np.ndarray
    weighted: np.ndarray
    dislocation: np.ndarray
    max_dislocation: np.ndarray | None = None

    def __len__(self):
        return self.steps.size


def recomputed_fitness(elems: np.ndarray) -> tuple[int, int, int]:
    """(inversions, weighted, dislocation) from scratch, for cross-checks."""
    pos = np.arange(1, elems.size + 1, dtype=np.int64)
    return (
        int(_kernels.count_inversions(elems)),
        int(_kernels.sum_inverted_gaps(elems)),
        int(np.abs(pos - elems).sum()),
    )


def new_state(params: ProcessParams, rng: np.random.Generator | None = None,
              elems: np.ndarray | None = None) -> ProcessState:
    """Fresh state from a uniform random permutation (or a given one)."""
    if rng is None:
        rng = substream(params.seed, RUN_STREAM, 0)
    if elems is None:
        elems = _kernels.shuffled_identity(params.n, rng)
    else:
        elems = Permutation(elems).elems.copy()
        if elems.size != params.n:
            raise ValueError("start permutation size does not match params.n")
    inv, wgt, dis = recomputed_fitness(elems)
    return ProcessState(elems=elems, t=0, inversions=inv, weighted=wgt,
                        dislocation=dis, rng=rng)


def is_fitter(a: int, b: int, p: float, rng: np.random.Generator) -> bool:
    """Noisy verdict on whether a belongs before b.

    True when a < b, except that with probability p the answer flips.
    """
    error = rng.random() < p
    return (a < b) != error


def step(state: ProcessState, params: ProcessParams) -> ProcessState:
    """One transition, plain-Python path. Mutates and returns the state."""
    dist_cum = params.distance_cumulative()
    k = int(state.rng.integers(0, params.pair_count))
    d = int(np.searchsorted(dist_cum, k, side="right"))
    i = k - int(dist_cum[d - 1])
    j = i + d
    a = int(state.elems[i])
    b = int(state.elems[j])
    if not is_fitter(a, b, params.p, state.rng):
        _apply_swap(state, i, j)
    state.t += 1
    return state


def _apply_swap(state: ProcessState, i: int, j: int) -> None:
    """Swap positions i < j (0-based) and update cached fitness."""
    elems = state.elems
    a = int(elems[i])
    b = int(elems[j])
    lo, hi = (a, b) if a < b else (b, a)
    between = int(np.count_nonzero((elems[i + 1:j] > lo) & (elems[i + 1:j] < hi)))
    sign = 1 if a < b else -1
    state.inversions += sign * (1 + 2 * between)
    state.weighted += sign * (j - i) * (hi - lo)
    pi, pj = i + 1, j + 1
    state.dislocation += (abs(pj - a) + abs(pi - b)) - (abs(pi - a) + abs(pj - b))
    elems[i], elems[j] = b, a


def advance(state: ProcessState, params: ProcessParams, steps: int,
            sample_every: int = 1, record_max_dislocation: bool = False) -> Trajectory:
    """Run `steps` transitions on the jitted path, sampling fitness.

    Samples land on global step numbers divisible by sample_every.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    n_samples = (state.t + steps) // sample_every - state.t // sample_every
    out_steps = np.empty(n_samples, np.int64)
    out_i = np.empty(n_samples, np.int64)
    out_w = np.empty(n_samples, np.int64)
    out_d = np.empty(n_samples, np.int64)
    out_maxd = np.empty(n_samples if record_max_dislocation else 1, np.int64)
    fit = np.array([state.inversions, state.weighted, state.dislocation], np.int64)
    written = _kernels.advance(
        state.elems, fit, state.t, steps, params.distance_cumulative(),
        params.p, state.rng, sample_every,
        out_steps, out_i, out_w, out_d, out_maxd, record_max_dislocation,
    )
    assert written == n_samples
    state.t += steps
    state.inversions = int(fit[0])
    state.weighted = int(fit[1])
    state.dislocation = int(fit[2])
    return Trajectory(
        steps=out_steps, inversions=out_i, weighted=out_w, dislocation=out_d,
        max_dislocation=out_maxd if record_max_dislocation else None,
    )


def run(params: ProcessParams, steps: int, sample_every: int = 1,
        record_max_dislocation: bool = False, run_index: int = 0) -> Trajectory:
    """Full run from a uniform random start; deterministic in (params, run_index).

    The trajectory always includes the step-0 sample.
    """
    rng = substream(params.seed, RUN_STREAM, run_index)
    state = new_state(params, rng)
    head = (state.inversions, state.weighted, state.dislocation)
    pos = np.arange(1, params.n + 1, dtype=np.int64)
    head_maxd = int(np.abs(pos - state.elems).max())
    tail = advance(state, params, steps, sample_every, record_max_dislocation)
    return Trajectory(
        steps=np.concatenate(([0], tail.steps)),
        inversions=np.concatenate(([head[0]], tail.inversions)),
        weighted=np.concatenate(([head[1]], tail.weighted)),
        dislocation=np.concatenate(([head[2]], tail.dislocation)),
        max_dislocation=(np.concatenate(([head_maxd], tail.max_dislocation))
                         if record_max_dislocation else None),
    )


def one_step_distribution(params: ProcessParams, start, trials: int,
                          rng: np.random.Generator) -> dict[tuple, int]:
    """Empirical counts of successor states after one transition.

    Exercises the same jitted step as `advance`, `trials` times from the
    fixed start state. Returns a map from successor one-line tuples
    (including the start itself for no-swap steps) to observed counts.
    """
    elems = Permutation(start).elems.copy()
    dist_cum = params.distance_cumulative()
    counts = np.zeros(params.pair_count + 1, np.int64)
    _kernels.one_step_counts(elems, dist_cum, params.p, rng, trials, counts)
    out: dict[tuple, int] = {}
    for k in range(params.pair_count):
        if counts[k] == 0:
            continue
        d = int(np.searchsorted(dist_cum, k, side="right"))
        i = k - int(dist_cum[d - 1])
        j = i + d
        succ = elems.copy()
        succ[i], succ[j] = succ[j], succ[i]
        out[tuple(int(v) for v in succ)] = int(counts[k])
    if counts[params.pair_count]:
        out[tuple(int(v) for v in elems)] = int(counts[params.pair_count])
    return out


def binary_step(seq: BinarySequence, p: float, rng: np.random.Generator) -> BinarySequence:
    """One adjacent-pair transition of the 0-1 process.

    The chosen pair ends up descending with probability p, ascending
    otherwise; equal bits make the draw a no-op either way.
    """
    bits = seq.bits.copy()
    i = int(rng.integers(0, bits.size - 1))
    descending = rng.random() < p
    lo = min(bits[i], bits[i + 1])
    hi = max(bits[i], bits[i + 1])
    if descending:
        bits[i], bits[i + 1] = hi, lo
    else:
        bits[i], bits[i + 1] = lo, hi
    return BinarySequence(bits)


def thresholds_of(elems: np.ndarray) -> np.ndarray:
    """Stacked threshold projections, row k-1 marking values above k."""
    n = elems.size
    ks = np.arange(1, n, dtype=np.int64)
    return (elems[None, :] > ks[:, None]).astype(np.int64)


def coupled_step(state: ProcessState, bin_states: list[BinarySequence], p: float,
                 rng: np.random.Generator, validate: bool = True):
    """Apply one shared adjacent-swap event to the permutation and all
    of its threshold projections.

    The event is (pair position, descending?) with the descending branch
    taken with probability p; applying it keeps every bin_states[k-1]
    equal to the k-th threshold projection of the permutation.
    """
    n = state.elems.size
    if len(bin_states) != n - 1:
        raise ValueError("need exactly n-1 coupled binary sequences")
    if validate:
        expect = thresholds_of(state.elems)
        actual = np.vstack([bs.bits for bs in bin_states])
        if not np.array_equal(expect, actual):
            raise ValueError("binary sequences are not the thresholds of the permutation")
    i = int(rng.integers(0, n - 1))
    descending = rng.random() < p
    a = int(state.elems[i])
    b = int(state.elems[i + 1])
    want_swap = (a > b) != descending  # target order differs from current
    if want_swap:
        _apply_swap(state, i, i + 1)
    for bs in bin_states:
        lo = min(bs.bits[i], bs.bits[i + 1])
        hi = max(bs.bits[i], bs.bits[i + 1])
        if descending:
            bs.bits[i], bs.bits[i + 1] = hi, lo
        else:
            bs.bits[i], bs.bits[i + 1] = lo, hi
    state.t += 1
    return state, bin_states


def count_up_down(seq: BinarySequence) -> tuple[int, int]:
    """Counts of ascents (0 then 1) and descents (1 then 0) of a 0-1 sequence."""
    d = np.diff(seq.bits)
    return int((d > 0).sum()), int((d < 0).sum())
