"""Independent reference implementations used to cross-check the library.

Everything here is deliberately naive: high-precision mpmath evaluation
instead of integer kernels, dict loops instead of vectorized tables, full
partition enumeration instead of closures.  Slow but transparently correct
on small instances, which is the point.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath
import numpy as np

mpmath.mp.dps = 60


# -- high-precision orbit membership ----------------------------------------------


def mp_quadratic(a, b=0, d=0):
    """Value a + b*sqrt(d) as an mpmath float at 60 digits."""
    v = mpmath.mpf(Fraction(a).numerator) / Fraction(a).denominator
    if b:
        bb = mpmath.mpf(Fraction(b).numerator) / Fraction(b).denominator
        v += bb * mpmath.sqrt(d)
    return v


def mp_frac(x):
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    return x - mpmath.floor(x)


def in_arc(x, lo, hi) -> bool:
    """Open arc membership on the circle; endpoints as mpmath values in [0,1)."""
    x, lo, hi = mp_frac(x), mp_frac(lo), mp_frac(hi)
    if lo < hi:
        return lo < x < hi
    return x > lo or x < hi


def rotation_members(alpha, x0, contains, window) -> set:
    """Return times of n -> x0 + n*alpha (mpmath scalars), one coordinate."""
    lo, hi = window
    return {n for n in range(lo, hi + 1) if contains(mp_frac(x0 + n * alpha))}


def polynomial_members(alpha, poly_coeffs, x0, contains, window) -> set:
    """Return times of n -> x0 + P(n)*alpha with integer coefficients."""
    lo, hi = window

    def P(n: int) -> int:
        acc = 0
        for c in reversed(poly_coeffs):
            acc = acc * n + c
        return acc

    return {n for n in range(lo, hi + 1) if contains(mp_frac(x0 + P(n) * alpha))}


def skew_members(alpha, x0, y0, contains_xy, window) -> set:
    """Return times of the skew product, iterated step by step (no closed form)."""
    lo, hi = window
    out = set()
    # walk forward from 0 and backward from 0 so errors cannot accumulate
    # across the unused half of the window
    for direction in (1, -1):
        x, y = x0, y0
        n = 0
        while (direction > 0 and n <= hi) or (direction < 0 and n >= lo):
            if lo <= n <= hi and contains_xy(mp_frac(x), mp_frac(y)):
                out.add(n)
            if direction > 0:
                x, y = x + alpha, y + x
                n += 1
            else:
                x = x - alpha
                y = y - x
                n -= 1
    return out


def naive_cesaro(members, N: int, theta: float) -> complex:
    """Direct (1/N) sum over n in [1,N] of 1_R(n) e^{2 pi i n theta}."""
    total = 0j
    for n in members:
        if 1 <= n <= N:
            total += complex(mpmath.e ** (2j * mpmath.pi * theta * n))
    return complex(total / N)


def half_interval_magnitude(k: int) -> float:
    """|c_k| of the indicator of (0, 1/2): 1/2 at k=0, 1/(pi|k|) odd, 0 even."""
    if k == 0:
        return 0.5
    if k % 2 == 0:
        return 0.0
    return 1.0 / (np.pi * abs(k))


def interval_magnitude(k: int, length: float) -> float:
    """|c_k| of the indicator of (0, length): |sin(pi k L)| / (pi |k|)."""
    if k == 0:
        return length
    return abs(np.sin(np.pi * k * length)) / (np.pi * abs(k))


# -- naive finite group machinery --------------------------------------------------


def close_generators(gens) -> set:
    """BFS closure of permutation tuples under composition."""
    gens = [tuple(g) for g in gens]
    degree = len(gens[0])
    e = tuple(range(degree))
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(degree))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def naive_profile_partition(table: np.ndarray, subset_mask) -> list[frozenset]:
    """Group points by their full membership profile {g : g.x in U}."""
    order, degree = table.shape
    mask = np.asarray(subset_mask, dtype=bool)
    buckets: dict = {}
    for x in range(degree):
        profile = tuple(bool(mask[table[g, x]]) for g in range(order))
        buckets.setdefault(profile, set()).add(x)
    return sorted((frozenset(b) for b in buckets.values()), key=min)


def naive_setwise_stabilizer(table: np.ndarray, subset) -> set:
    chosen = frozenset(int(x) for x in subset)
    out = set()
    for g in range(table.shape[0]):
        if frozenset(int(table[g, x]) for x in chosen) == chosen:
            out.add(g)
    return out


def all_partitions(n: int):
    """Every set partition of {0..n-1} as a label array (restricted growth)."""
    labels = [0] * n

    def rec(i: int, k: int):
        if i == n:
            yield tuple(labels)
            return
        for v in range(k + 1):
            labels[i] = v
            yield from rec(i + 1, k + (v == k))

    yield from rec(0, 0) if n else iter(())


def partition_blocks(labels) -> list[frozenset]:
    blocks: dict = {}
    for i, v in enumerate(labels):
        blocks.setdefault(v, set()).add(i)
    return sorted((frozenset(b) for b in blocks.values()), key=min)


def invariant_partitions(table: np.ndarray) -> np.ndarray:
    """Label matrix of every G-invariant partition of the action's points.

    A partition is invariant when every group element maps blocks onto
    blocks; checked by counting distinct (label, translated label) pairs.
    """
    order, degree = table.shape
    lbls = np.array(list(all_partitions(degree)), dtype=np.int64)
    n_blocks = lbls.max(axis=1) + 1
    keep = np.ones(len(lbls), dtype=bool)
    for g in range(order):
        moved = lbls[:, table[g]]
        codes = np.sort(lbls * degree + moved, axis=1)
        distinct = (np.diff(codes, axis=1) != 0).sum(axis=1) + 1
        keep &= distinct == n_blocks
    return lbls[keep]


def subset_is_union(labels, subset_mask) -> bool:
    mask = np.asarray(subset_mask, dtype=bool)
    for b in partition_blocks(labels):
        hits = sum(mask[x] for x in b)
        if hits not in (0, len(b)):
            return False
    return True


def refines(fine_labels, coarse_labels) -> bool:
    """True when every fine block sits inside one coarse block."""
    seen: dict = {}
    for f, c in zip(fine_labels, coarse_labels):
        if f in seen and seen[f] != c:
            return False
        seen[f] = c
    return True


def coarsest_valid_partition(inv_lbls: np.ndarray, subset_mask) -> list[frozenset]:
    """Among precomputed invariant partitions: the coarsest with U a block union.

    Asserts the winner is unique and that every other valid partition
    refines it, which is what makes "coarsest" well defined.
    """
    valid = [l for l in inv_lbls if subset_is_union(l, subset_mask)]
    assert valid, "the discrete partition is always valid"
    best_blocks = min(int(l.max()) + 1 for l in valid)
    winners = [l for l in valid if int(l.max()) + 1 == best_blocks]
    assert len(winners) == 1, "coarsest valid partition is not unique"
    winner = winners[0]
    for l in valid:
        assert refines(l, winner)
    return partition_blocks(winner)
