"""Jitted inner loops for the swap process and fitness counting.

Everything here works on raw int64 arrays holding one-line notation
(values 1..n at 0-based positions). The pure-Python mirrors of these
routines live in `process`; these exist so that multi-million-step
simulations stay cheap.
"""

import numpy as np
from numba import njit


@njit(inline="always")
def decode_pair(k, dist_cum):
    """Map a flat pair index k in [0, N) to 0-based positions (i, j), i < j.

    dist_cum[d] is the number of position pairs at distance <= d, so the
    distance is found by binary search and the offset inside that distance
    block gives the left position.
    """
    d = np.searchsorted(dist_cum, k, side="right")
    i = k - dist_cum[d - 1]
    return i, i + d


@njit(inline="always")
def step_once(elems, fit, dist_cum, p, gen):
    """One transition: pick a pair, compare with error rate p, maybe swap.

    Mutates elems and the cached fitness fit = [inversions, weighted,
    dislocation] in place. Returns the chosen flat pair index if a swap
    happened, -1 otherwise.
    """
    k = gen.integers(0, dist_cum[-1])
    i, j = decode_pair(k, dist_cum)
    a = elems[i]
    b = elems[j]
    error = gen.random() < p
    # comparison verdict is (a < b) XOR error; swap when judged unfit
    if (a < b) != error:
        return -1
    if a < b:
        lo, hi = a, b
        sign = 1
    else:
        lo, hi = b, a
        sign = -1
    between = 0
    for q in range(i + 1, j):
        v = elems[q]
        if lo < v < hi:
            between += 1
    fit[0] += sign * (1 + 2 * between)
    fit[1] += sign * (j - i) * (hi - lo)
    pi = i + 1
    pj = j + 1
    fit[2] += (abs(pj - a) + abs(pi - b)) - (abs(pi - a) + abs(pj - b))
    elems[i] = b
    elems[j] = a
    return k


@njit
def advance(elems, fit, t0, nsteps, dist_cum, p, gen, sample_every,
            out_steps, out_i, out_w, out_d, out_maxd, record_maxd):
    """Run nsteps transitions from global step t0, recording samples.

    Samples are taken at every global step divisible by sample_every.
    Output arrays must be pre-sized; the number of samples written is
    returned.
    """
    n = elems.shape[0]
    t = t0
    m = 0
    for _ in range(nsteps):
        step_once(elems, fit, dist_cum, p, gen)
        t += 1
        if t % sample_every == 0:
            out_steps[m] = t
            out_i[m] = fit[0]
            out_w[m] = fit[1]
            out_d[m] = fit[2]
            if record_maxd:
                md = 0
                for q in range(n):
                    dd = abs(q + 1 - elems[q])
                    if dd > md:
                        md = dd
                out_maxd[m] = md
            m += 1
    return m


@njit
def one_step_counts(elems, dist_cum, p, gen, trials, counts):
    """Histogram of single-step outcomes from a fixed state.

    counts must have dist_cum[-1] + 1 slots: one per swappable pair plus a
    final slot for "no swap". Each trial applies one step to a scratch
    copy and undoes it, so the same code path as `advance` is exercised.
    """
    scratch = elems.copy()
    fit = np.zeros(3, np.int64)
    stay = dist_cum[-1]
    for _ in range(trials):
        k = step_once(scratch, fit, dist_cum, p, gen)
        if k < 0:
            counts[stay] += 1
        else:
            counts[k] += 1
            i, j = decode_pair(k, dist_cum)
            tmp = scratch[i]
            scratch[i] = scratch[j]
            scratch[j] = tmp


@njit
def shuffled_identity(n, gen):
    """Uniform random one-line array via an unbiased swap-based shuffle."""
    elems = np.arange(1, n + 1, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = gen.integers(0, i + 1)
        tmp = elems[i]
        elems[i] = elems[j]
        elems[j] = tmp
    return elems


@njit
def count_inversions(values):
    """Number of out-of-order pairs, by bottom-up merge counting."""
    n = values.shape[0]
    src = values.copy()
    buf = np.empty(n, np.int64)
    total = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            a = lo
            b = mid
            out = lo
            while a < mid and b < hi:
                if src[a] <= src[b]:
                    buf[out] = src[a]
                    a += 1
                else:
                    buf[out] = src[b]
                    total += mid - a
                    b += 1
                out += 1
            while a < mid:
                buf[out] = src[a]
                a += 1
                out += 1
            while b < hi:
                buf[out] = src[b]
                b += 1
                out += 1
        tmp = src
        src = buf
        buf = tmp
        width *= 2
    return total


@njit
def sum_inverted_gaps(values):
    """Sum of value differences over inverted pairs.

    Left-to-right sweep with a Fenwick tree over values, accumulating for
    each new value the count and sum of larger values already seen.
    Assumes values are distinct integers in 1..n.
    """
    n = values.shape[0]
    cnt = np.zeros(n + 1, np.int64)
    tot = np.zeros(n + 1, np.int64)
    seen_sum = 0
    acc = 0
    for idx in range(n):
        v = values[idx]
        c_le = 0
        s_le = 0
        x = v
        while x > 0:
            c_le += cnt[x]
            s_le += tot[x]
            x -= x & (-x)
        c_gt = idx - c_le
        s_gt = seen_sum - s_le
        acc += s_gt - v * c_gt
        x = v
        while x <= n:
            cnt[x] += 1
            tot[x] += v
            x += x & (-x)
        seen_sum += v
    return acc


@njit
def count_cycles(values):
    """Number of cycles of the permutation given in one-line notation."""
    n = values.shape[0]
    seen = np.zeros(n, np.uint8)
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        q = start
        while not seen[q]:
            seen[q] = 1
            q = values[q] - 1
    return cycles
