"""Rebuild the rotation factor from observed spectral lines.

Given peak locations theta_1..theta_m, the verified relation lattice
L = {k : k . theta in Z} determines everything: writing the columns of a
basis of L as an integer matrix B and diagonalizing U B V = D, the group
generated by the frequencies is T^(m-s) times the product of Z/d_i over
the nontrivial divisors, each peak j is the character given by column j
of U, and the rotation element is read off from Psi = U^{-T} theta: its
free entries are torus coordinates, its torsion entries must sit on the
grid of multiples of 1/d_i.  A spurious divisor would mean a relation the
search missed, so every divisor is challenged by testing whether its
would-be quotient vector is itself a relation before it is believed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .groups import Character, GroupDescriptor, GroupPoint, char_eval
from .relations import (
    RelationSet,
    detect_relations,
    hnf_rows,
    lattice_contains,
    relation_residual,
    smith_normal_form,
)
from .spectral import SpectrumPeak


class ReconstructionError(ValueError):
    """The spectral data does not admit a consistent reconstruction."""


@dataclass(frozen=True)
class ReconstructionResult:
    group: GroupDescriptor
    alpha_image: GroupPoint
    assignments: tuple[Character, ...]
    thetas: tuple[float, ...]
    relations: RelationSet
    max_phase_error: float
    verified: bool
    warnings: tuple[str, ...]

    def __repr__(self):
        return (
            f"ReconstructionResult(group={self.group}, verified={self.verified}, "
            f"max_phase_error={self.max_phase_error:.2e})"
        )


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _column(mat: Sequence[Sequence[int]], j: int) -> list[int]:
    return [row[j] for row in mat]


def _wrap_half(x: float) -> float:
    return (x + 0.5) % 1.0 - 0.5


def reconstruct_group(
    peaks: Sequence[Union[SpectrumPeak, float]],
    resolution: float = 1e-8,
    height: int = 20,
    mode: str = "auto",
    verify_tol: float = 1e-4,
    dc_tol: float = 1e-6,
) -> ReconstructionResult:
    """Identify the compact group and rotation behind a list of peaks.

    Accepts SpectrumPeak objects (their magnitudes weight the final
    phase fit) or bare frequencies.  The zero frequency carries only the
    density of the set and is dropped.  verify_tol bounds the allowed
    discrepancy |chi_j(alpha') - e^{2 pi i theta_j}| for the result to be
    marked verified; failures are reported, never silently absorbed.
    """
    thetas: list[float] = []
    weights: list[float] = []
    for p in peaks:
        if isinstance(p, SpectrumPeak):
            t, w = p.theta % 1.0, max(p.magnitude, 1e-12)
        else:
            t, w = float(p) % 1.0, 1.0
        if min(t, 1.0 - t) <= dc_tol:
            continue
        thetas.append(t)
        weights.append(w)
    m = len(thetas)
    if m == 0:
        return ReconstructionResult(
            group=GroupDescriptor(0),
            alpha_image=GroupDescriptor(0).identity(),
            assignments=(),
            thetas=(),
            relations=RelationSet((), mode, height, 0.0),
            max_phase_error=0.0,
            verified=True,
            warnings=("no nonzero frequencies: trivial group",),
        )

    rels = detect_relations(thetas, mode=mode, height=height, resolution=resolution)
    tolerance = rels.tolerance
    basis = [list(r) for r in rels.basis]
    warnings: list[str] = []

    # challenge every torsion divisor; a missed relation shows up as the
    # quotient vector (d/p) * Uinv[:,i] being a relation itself
    for _ in range(10 * m + 10):
        snf = _snf_of_columns(basis, m)
        divisors = snf.divisors if basis else ()
        grew = False
        for i, d in enumerate(divisors):
            if d <= 1:
                continue
            col = _column(snf.Uinv, i)
            for p in _prime_factors(d):
                cand = [(d // p) * c for c in col]
                if relation_residual(cand, thetas) <= tolerance and not lattice_contains(
                    basis, cand
                ):
                    basis = hnf_rows(basis + [cand])
                    grew = True
                    break
            if grew:
                break
        if not grew:
            break
    else:
        warnings.append("relation saturation did not stabilize; torsion may be overstated")

    snf = _snf_of_columns(basis, m)
    s = len(basis)
    divisors = snf.divisors if basis else ()
    rank = m - s
    torsion_rows = [i for i, d in enumerate(divisors) if d > 1]
    torsion_orders = tuple(divisors[i] for i in torsion_rows)
    free_rows = list(range(s, m))
    group = GroupDescriptor(rank, torsion_orders)

    U, Uinv = snf.U, snf.Uinv
    psi = [
        math.fsum(Uinv[j][i] * thetas[j] for j in range(m)) for i in range(m)
    ]

    torsion_coords = []
    for i in torsion_rows:
        d = divisors[i]
        scaled = d * psi[i]
        c = round(scaled) % d
        off = abs(scaled - round(scaled))
        if off > 0.01:
            warnings.append(
                f"torsion coordinate {len(torsion_coords)} sits {off:.2e} off the 1/{d} grid"
            )
        g = math.gcd(c, d)
        if g != 1:
            warnings.append(
                f"torsion phase {c}/{d} is not primitive; the element cannot generate Z/{d}"
            )
        torsion_coords.append(c)

    free_coords = [psi[i] % 1.0 for i in free_rows]
    if free_rows:
        free_coords = _polish_free_coords(
            thetas, weights, U, free_rows, free_coords, torsion_rows, divisors, torsion_coords
        )

    alpha_image = group.point(*free_coords, *torsion_coords)
    assignments = tuple(
        group.character(
            *(U[i][j] for i in free_rows),
            *(U[i][j] for i in torsion_rows),
        )
        for j in range(m)
    )

    max_err = 0.0
    for j, chi in enumerate(assignments):
        lhs = char_eval(group, chi, alpha_image)
        rhs = cmath.exp(2j * math.pi * thetas[j])
        max_err = max(max_err, abs(lhs - rhs))
    verified = max_err <= verify_tol
    if not verified:
        warnings.append(
            f"character phases disagree with observed frequencies by {max_err:.2e}"
        )
    if not basis and m > 0:
        warnings.append("no relations found: frequencies treated as independent")

    return ReconstructionResult(
        group=group,
        alpha_image=alpha_image,
        assignments=assignments,
        thetas=tuple(thetas),
        relations=RelationSet(tuple(tuple(r) for r in basis), rels.mode, height, tolerance),
        max_phase_error=max_err,
        verified=verified,
        warnings=tuple(warnings),
    )


def _snf_of_columns(basis_rows: list[list[int]], m: int):
    """Smith data of the m x s matrix whose columns are the basis rows."""
    if not basis_rows:
        ident = tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m))
        return _TrivialSnf(ident)
    cols = [[basis_rows[j][i] for j in range(len(basis_rows))] for i in range(m)]
    return smith_normal_form(cols)


@dataclass(frozen=True)
class _TrivialSnf:
    U: tuple
    divisors: tuple = ()

    @property
    def Uinv(self):
        return self.U


def _polish_free_coords(
    thetas, weights, U, free_rows, free_coords, torsion_rows, divisors, torsion_coords
):
    """Weighted least-squares touch-up of the torus coordinates.

    Psi mixes every observed frequency with integer coefficients, which
    amplifies measurement noise; redistributing the wrapped residuals
    over the free coordinates undoes that amplification.  Strong peaks
    are located more precisely, hence the magnitude weighting.
    """
    m = len(thetas)
    base = np.zeros(m)
    for idx, i in enumerate(torsion_rows):
        d = divisors[i]
        for j in range(m):
            base[j] += U[i][j] * torsion_coords[idx] / d
    A = np.array([[U[i][j] for i in free_rows] for j in range(m)], dtype=np.float64)
    pred = base + A @ np.asarray(free_coords)
    resid = np.array([_wrap_half(t - p) for t, p in zip(thetas, pred)])
    w = np.sqrt(np.asarray(weights, dtype=np.float64))
    try:
        delta, *_ = np.linalg.lstsq(A * w[:, None], resid * w, rcond=None)
    except np.linalg.LinAlgError:
        return free_coords
    return [(c + float(d)) % 1.0 for c, d in zip(free_coords, delta)]
