"""Integer relations among observed frequencies, and lattice normal forms.

A relation is a vector k with k . theta within tolerance of an integer.
The lattice of all relations determines the group the frequencies generate:
its Smith normal form splits the quotient into free and cyclic parts.
Candidate relations come either from exhaustive small-height search or from
lattice reduction; every candidate is verified against the numbers
themselves before it is believed, so the reduction stage can use floating
point freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class RelationSearchError(ValueError):
    """Requested relation search is out of the supported range."""


DEFAULT_TOLERANCE = 1e-7


def relation_residual(k: Sequence[int], thetas: Sequence[float]) -> float:
    """Distance from k . theta to the nearest integer."""
    s = math.fsum(float(ki) * float(ti) for ki, ti in zip(k, thetas))
    return abs(s - round(s))


# -- Hermite normal form over rows ------------------------------------------


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice the rows generate.

    Output rows have strictly increasing pivot columns, positive pivots,
    and entries above each pivot reduced into [0, pivot).  The result is a
    canonical basis: two generating sets of the same lattice give the same
    matrix.
    """
    mat = [list(map(int, r)) for r in rows if any(r)]
    if not mat:
        return []
    m = len(mat[0])
    row = 0
    for col in range(m):
        pivots = [i for i in range(row, len(mat)) if mat[i][col] != 0]
        if not pivots:
            continue
        while len(pivots) > 1:
            pivots.sort(key=lambda i: abs(mat[i][col]))
            base = pivots[0]
            for i in pivots[1:]:
                q = mat[i][col] // mat[base][col]
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[base])]
            pivots = [i for i in pivots if mat[i][col] != 0]
        i = pivots[0]
        mat[row], mat[i] = mat[i], mat[row]
        if mat[row][col] < 0:
            mat[row] = [-a for a in mat[row]]
        p = mat[row][col]
        for i in range(row):
            q = mat[i][col] // p
            if q:
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[row])]
        row += 1
    mat = mat[:row]
    return [r for r in mat if any(r)]


def lattice_contains(basis_hnf: Sequence[Sequence[int]], vec: Sequence[int]) -> bool:
    """Membership test against an HNF basis by pivot-wise reduction."""
    v = list(map(int, vec))
    for row in basis_hnf:
        col = next(i for i, a in enumerate(row) if a)
        if v[col] % row[col] == 0:
            q = v[col] // row[col]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


# -- Smith normal form with transforms ----------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """U A V = D with U, V unimodular; inverses carried along."""

    U: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    Uinv: tuple[tuple[int, ...], ...]
    Vinv: tuple[tuple[int, ...], ...]

    @property
    def divisors(self) -> tuple[int, ...]:
        n = min(len(self.D), len(self.D[0]) if self.D else 0)
        ds = [self.D[i][i] for i in range(n)]
        return tuple(d for d in ds if d != 0)


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Diagonalize an integer matrix with tracked unimodular transforms.

    Returns U A V = D where D is diagonal with d_1 | d_2 | ... >= 0.  The
    inverses are maintained by applying the inverse elementary operation
    on the opposite side at each step, so no matrix inversion happens.
    """
    D = [list(map(int, row)) for row in A]
    n = len(D)
    m = len(D[0]) if n else 0
    U, Uinv = _identity(n), _identity(n)
    V, Vinv = _identity(m), _identity(m)

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]

    def row_add(i, j, c):  # row_i += c * row_j
        D[i] = [a + c * b for a, b in zip(D[i], D[j])]
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        for r in Uinv:
            r[j] -= c * r[i]

    def row_neg(i):
        D[i] = [-a for a in D[i]]
        U[i] = [-a for a in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def col_add(i, j, c):  # col_i += c * col_j
        for r in D:
            r[i] += c * r[j]
        for r in V:
            r[i] += c * r[j]
        Vinv[j] = [a - c * b for a, b in zip(Vinv[j], Vinv[i])]

    def col_neg(i):
        for r in D:
            r[i] = -r[i]
        for r in V:
            r[i] = -r[i]
        Vinv[i] = [-a for a in Vinv[i]]

    t = 0
    while True:
        entries = [
            (abs(D[i][j]), i, j)
            for i in range(t, n)
            for j in range(t, m)
            if D[i][j] != 0
        ]
        if not entries:
            break
        _, pi, pj = min(entries)
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, n):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    row_add(i, t, -q)
                    if D[i][t]:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, m):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    col_add(j, t, -q)
                    if D[t][j]:
                        col_swap(t, j)
                        dirty = True
            if not dirty:
                # pivot must divide the rest of the submatrix
                p = D[t][t]
                offender = next(
                    (
                        (i, j)
                        for i in range(t + 1, n)
                        for j in range(t + 1, m)
                        if D[i][j] % p
                    ),
                    None,
                )
                if offender is not None:
                    row_add(t, offender[0], 1)
                    dirty = True
        if D[t][t] < 0:
            row_neg(t)
        t += 1
        if t == min(n, m):
            break
    for i in range(min(n, m)):
        if D[i][i] < 0:
            row_neg(i)
    tup = lambda M: tuple(tuple(r) for r in M)
    return SmithDecomposition(tup(U), tup(D), tup(V), tup(Uinv), tup(Vinv))


# -- lattice reduction ---------------------------------------------------------


def lll_reduce(rows: Sequence[Sequence[int]], delta: float = 0.99) -> list[list[int]]:
    """Lenstra-Lenstra-Lovasz reduction with exact integer basis vectors.

    The Gram-Schmidt data is recomputed in floats each step; that is cheap
    at the dimensions used here and avoids incremental-update bugs.  The
    caller must verify anything it reads off the reduced basis, which the
    relation search does anyway.
    """
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n <= 1:
        return b

    def gso():
        M = np.array(b, dtype=np.float64)
        n_, m_ = M.shape
        mu = np.zeros((n_, n_))
        star = np.zeros_like(M)
        norms = np.zeros(n_)
        for i in range(n_):
            v = M[i].copy()
            for j in range(i):
                mu[i, j] = 0.0 if norms[j] == 0 else float(np.dot(M[i], star[j]) / norms[j])
                v -= mu[i, j] * star[j]
            star[i] = v
            norms[i] = float(np.dot(v, v))
        return mu, norms

    k = 1
    while k < n:
        mu, norms = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[k] = [a - q * c for a, c in zip(b[k], b[j])]
                mu, norms = gso()
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            k = max(k - 1, 1)
    return b


# -- relation detection ---------------------------------------------------------


@dataclass(frozen=True)
class RelationSet:
    """Verified relation lattice: canonical basis plus search parameters."""

    basis: tuple[tuple[int, ...], ...]
    mode: str
    height: int
    tolerance: float

    @property
    def rank(self) -> int:
        return len(self.basis)


def _canonical_sign(vec):
    for v in vec:
        if v > 0:
            return tuple(vec)
        if v < 0:
            return tuple(-x for x in vec)
    return tuple(vec)


def _exhaustive_relations(thetas, height, tolerance):
    m = len(thetas)
    th = np.asarray(thetas, dtype=np.float64)
    ks = np.arange(-height, height + 1, dtype=np.int64)
    basis: list[list[int]] = []
    if m == 1:
        grid = np.abs(ks[:, None] * th[None, :]).reshape(-1)
        res = np.abs(grid - np.round(grid))
        for idx in np.flatnonzero(res <= tolerance):
            k = int(ks[idx])
            if k > 0 and not lattice_contains(basis, (k,)):
                basis = hnf_rows(basis + [[k]])
        return basis
    # vectorize the last two axes; loop the leading ones
    tail = ks[:, None] * th[-2] + ks[None, :] * th[-1]
    lead_axes = m - 2
    lead_iter = np.ndindex(*([len(ks)] * lead_axes)) if lead_axes else [()]
    for lead in lead_iter:
        head = [int(ks[i]) for i in lead]
        base = math.fsum(h * t for h, t in zip(head, th[:lead_axes]))
        grid = base + tail
        res = np.abs(grid - np.round(grid))
        hits = np.argwhere(res <= tolerance)
        for i, j in hits:
            vec = head + [int(ks[i]), int(ks[j])]
            if not any(vec):
                continue
            vec = list(_canonical_sign(vec))
            if relation_residual(vec, thetas) <= tolerance and not lattice_contains(basis, vec):
                basis = hnf_rows(basis + [vec])
    return basis


def _lll_relations(thetas, height, tolerance, scales):
    m = len(thetas)
    basis: list[list[int]] = []
    for scale in scales:
        C = int(scale)
        rows = []
        for i in range(m):
            row = [0] * (m + 1)
            row[i] = 1
            row[m] = round(thetas[i] * C)
            rows.append(row)
        rows.append([0] * m + [C])
        reduced = lll_reduce(rows)
        for r in reduced:
            k = r[:m]
            if not any(k) or max(abs(x) for x in k) > height:
                continue
            if relation_residual(k, thetas) <= tolerance:
                vec = list(_canonical_sign(k))
                if not lattice_contains(basis, vec):
                    basis = hnf_rows(basis + [vec])
    return basis


def detect_relations(
    thetas: Sequence[float],
    mode: str = "auto",
    height: int = 20,
    tolerance: Optional[float] = None,
    resolution: Optional[float] = None,
    lll_scales: Sequence[float] = (1e8, 1e10, 1e12),
) -> RelationSet:
    """Find a verified basis of the relation lattice of the given numbers.

    mode 'exhaustive' tries every height-bounded vector and is limited to
    at most 4 numbers and height at most 100; beyond that it raises and
    points at mode 'lll', which reads candidates off a reduced lattice
    basis instead.  'auto' picks exhaustive while the grid stays small.
    Either way a vector only enters the basis after relation_residual
    confirms it, so reduction noise cannot fabricate relations.
    """
    thetas = [float(t) for t in thetas]
    m = len(thetas)
    if tolerance is None:
        tolerance = DEFAULT_TOLERANCE if resolution is None else max(
            DEFAULT_TOLERANCE, 10.0 * resolution
        )
    if m == 0:
        return RelationSet((), mode, height, tolerance)
    if mode == "auto":
        mode = "exhaustive" if m <= 4 and (2 * height + 1) ** m <= 2e7 else "lll"
    if mode == "exhaustive":
        if m > 4:
            raise RelationSearchError(
                f"exhaustive search supports at most 4 numbers, got {m}; use mode='lll'"
            )
        if height > 100:
            raise RelationSearchError(
                f"exhaustive search supports height <= 100, got {height}; use mode='lll'"
            )
        basis = _exhaustive_relations(thetas, height, tolerance)
    elif mode == "lll":
        basis = _lll_relations(thetas, height, tolerance, lll_scales)
    else:
        raise ValueError(f"unknown relation search mode: {mode}")
    return RelationSet(tuple(tuple(r) for r in basis), mode, height, tolerance)
