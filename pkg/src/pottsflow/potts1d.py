"""Exact univariate Potts solver.

Minimizes  P(v) = gamma * J(v) + sum_i ||z_i - v_i||^2  over piecewise
constant signals v, where J(v) counts the positions where the value vector
changes (a jump is counted once even if only one channel changes).  Solved
exactly by dynamic programming over the start of the last segment, using
prefix sums so each interval cost is O(d).

Ties between equal-energy solutions are broken toward fewer segments, then
toward the lexicographically smallest sequence of segment ends.  An
optional pruning bound skips interval starts that provably cannot improve
the current best; it never changes the result (pruned candidates are
strictly worse, so they cannot participate in ties either).
"""

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

MAX_BRUTE_FORCE_LENGTH = 14


@njit(cache=True)
def _seg_cost(s1, s2, l, e):
    # squared deviation of samples l..e (inclusive) from their mean,
    # clamped at 0 against cancellation noise
    length = e - l + 1
    acc = 0.0
    for c in range(s1.shape[1]):
        s = s1[e + 1, c] - s1[l, c]
        acc += s * s
    dc = (s2[e + 1] - s2[l]) - acc / length
    return dc if dc > 0.0 else 0.0


@njit(cache=True)
def _line_dp(z, gamma, prune, ends):
    """DP over one signal z (n, d); fills `ends` with exclusive segment
    ends and returns (number of segments, optimal energy)."""
    n, d = z.shape
    s1 = np.zeros((n + 1, d))
    s2 = np.zeros(n + 1)
    for i in range(n):
        acc = 0.0
        for c in range(d):
            s1[i + 1, c] = s1[i, c] + z[i, c]
            acc += z[i, c] * z[i, c]
        s2[i + 1] = s2[i] + acc

    # bwd[l]: optimal energy of the suffix starting at l; nseg[l]: fewest
    # segments among energy-optimal suffix partitions
    bwd = np.zeros(n)
    nseg = np.zeros(n, np.int64)
    for l in range(n - 1, -1, -1):
        best = _seg_cost(s1, s2, l, n - 1)
        best_k = 1
        for e in range(l, n - 1):
            dc = _seg_cost(s1, s2, l, e)
            if prune and dc + gamma > best:
                # interval costs grow with e, so no later interior end
                # can reach the current best
                break
            cand = dc + gamma + bwd[e + 1]
            if cand < best:
                best = cand
                best_k = 1 + nseg[e + 1]
            elif cand == best:
                kk = 1 + nseg[e + 1]
                if kk < best_k:
                    best_k = kk
        bwd[l] = best
        nseg[l] = best_k

    # left-to-right reconstruction: the smallest end that still allows an
    # energy-optimal, minimum-segment-count completion is the
    # lexicographically smallest choice
    k = 0
    l = 0
    while l < n:
        target = bwd[l]
        target_k = nseg[l]
        chosen = n - 1
        for e in range(l, n - 1):
            dc = _seg_cost(s1, s2, l, e)
            if prune and dc + gamma > target:
                break
            if dc + gamma + bwd[e + 1] == target and 1 + nseg[e + 1] == target_k:
                chosen = e
                break
        ends[k] = chosen + 1
        k += 1
        l = chosen + 1
    return k, bwd[0]


@njit(cache=True)
def _line_fit(z, gamma, prune, out):
    """Solve one line and write the per-segment means into out (n, d)."""
    n, d = z.shape
    ends = np.empty(n, np.int64)
    k, _ = _line_dp(z, gamma, prune, ends)
    l = 0
    for s in range(k):
        e = ends[s]
        length = e - l
        for c in range(d):
            # a run of identical samples keeps its value exactly
            first = z[l, c]
            same = True
            acc = 0.0
            for i in range(l, e):
                acc += z[i, c]
                if z[i, c] != first:
                    same = False
            m = first if same else acc / length
            for i in range(l, e):
                out[i, c] = m
        l = e
    return k


@njit(cache=True, parallel=True)
def _fit_lines(lines, gamma, prune, out):
    for b in prange(lines.shape[0]):
        _line_fit(lines[b], gamma, prune, out[b])


@dataclass
class Segmentation1D:
    """A piecewise-constant fit: exclusive segment end indices (the last
    equals the signal length), one value vector per segment, and the
    achieved energy."""

    ends: np.ndarray
    values: np.ndarray
    energy: float

    @property
    def num_segments(self):
        return len(self.ends)

    def reconstruct(self):
        """Expand to a full-length signal."""
        reps = np.diff(np.concatenate([[0], self.ends]))
        return np.repeat(self.values, reps, axis=0)


def _as_signal(signal):
    z = np.asarray(signal, dtype=np.float64)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[:, None]
    if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] < 1:
        raise ValueError(f"expected signal of shape (n,) or (n, d), got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("signal contains non-finite values")
    return np.ascontiguousarray(z), squeeze


def solve_potts_1d(signal, gamma, prune=True):
    """Globally optimal univariate Potts segmentation of `signal`.

    signal: (n,) or (n, d) samples; gamma: nonnegative jump penalty.
    """
    z, squeeze = _as_signal(signal)
    gamma = float(gamma)
    if not (gamma >= 0.0 and np.isfinite(gamma)):
        raise ValueError(f"gamma must be a finite nonnegative real, got {gamma}")
    n = z.shape[0]
    ends = np.empty(n, np.int64)
    k, energy = _line_dp(z, gamma, bool(prune), ends)
    ends = ends[:k].copy()
    values = _segment_means(z, ends)
    if squeeze:
        values = values[:, 0]
    return Segmentation1D(ends=ends, values=values, energy=float(energy))


def _segment_means(z, ends):
    values = np.empty((len(ends), z.shape[1]))
    l = 0
    for s, e in enumerate(ends):
        seg = z[l:e]
        # a run of identical samples keeps its value exactly
        values[s] = np.where(np.all(seg == seg[0], axis=0), seg[0], seg.mean(axis=0))
        l = e
    return values


def potts_energy_1d(signal, values, gamma):
    """Energy gamma * (#jumps of values) + sum ||signal - values||^2,
    with jumps counted once per position regardless of channel count."""
    z, _ = _as_signal(signal)
    v, _ = _as_signal(values)
    if z.shape != v.shape:
        raise ValueError(f"signal and values differ in shape: {z.shape} vs {v.shape}")
    jumps = int(np.count_nonzero(np.any(v[1:] != v[:-1], axis=1)))
    return float(gamma) * jumps + float(np.sum((z - v) ** 2))


def brute_force_potts(signal, gamma):
    """Exhaustive reference solver: enumerates all 2^(n-1) interval
    partitions (n <= 14), with the same tie-break as solve_potts_1d."""
    z, squeeze = _as_signal(signal)
    gamma = float(gamma)
    n = z.shape[0]
    if n > MAX_BRUTE_FORCE_LENGTH:
        raise ValueError(f"brute force capped at n <= {MAX_BRUTE_FORCE_LENGTH}, got n = {n}")
    best = None
    for mask in range(1 << (n - 1)):
        ends = [t + 1 for t in range(n - 1) if mask >> t & 1]
        ends.append(n)
        energy = gamma * (len(ends) - 1)
        l = 0
        for e in ends:
            seg = z[l:e]
            energy += float(((seg - seg.mean(axis=0)) ** 2).sum())
            l = e
        key = (energy, len(ends), tuple(ends))
        if best is None or key < best:
            best = key
    energy, k, ends = best
    ends = np.asarray(ends, dtype=np.int64)
    values = _segment_means(z, ends)
    if squeeze:
        values = values[:, 0]
    return Segmentation1D(ends=ends, values=values, energy=energy)


def fit_potts_lines(field, gamma, axis, prune=True):
    """Potts-fit every grid line of a field, independently and in parallel.

    axis=0 solves each column as one signal (values varying down rows);
    axis=1 solves each row.  field: (M, N) or (M, N, d).
    """
    a = np.asarray(field, dtype=np.float64)
    flat = a.ndim == 2
    if flat:
        a = a[:, :, None]
    if axis == 0:
        lines = np.ascontiguousarray(a.transpose(1, 0, 2))
    elif axis == 1:
        lines = np.ascontiguousarray(a)
    else:
        raise ValueError("axis must be 0 or 1")
    out = np.empty_like(lines)
    _fit_lines(lines, float(gamma), bool(prune), out)
    if axis == 0:
        out = out.transpose(1, 0, 2)
    if flat:
        out = out[:, :, 0]
    return np.ascontiguousarray(out)
