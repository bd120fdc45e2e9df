"""Box-union open subsets of T^r x prod Z/m: membership, closure, stabilizer.

A set is a finite union of boxes; each box is a product of one factor per
coordinate: an open arc (lo, hi) or the full circle on torus coordinates, a
residue subset or the full group on torsion coordinates.  Arc endpoints are
stored exactly, so closure comparisons, stabilizers and measures are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from .exactnum import QuadraticNumber
from .groups import GroupDescriptor, GroupPoint, ShapeMismatchError

EPS_MEM = 1e-9

Factor = Union[None, tuple, frozenset]


class Membership(Enum):
    IN = "in"
    OUT = "out"
    BOUNDARY = "boundary-ambiguous"


@dataclass(frozen=True)
class Arc:
    """Open arc (lo, hi) with exact endpoints, 0 <= lo < hi <= 1."""

    lo: QuadraticNumber
    hi: QuadraticNumber

    def __post_init__(self):
        if not (0 <= self.lo and self.lo < self.hi and self.hi <= 1):
            raise ValueError(f"arc needs 0 <= lo < hi <= 1, got ({self.lo}, {self.hi})")

    def length(self) -> QuadraticNumber:
        return self.hi - self.lo

    def contains_exact(self, x: QuadraticNumber) -> bool:
        return self.lo < x and x < self.hi

    def __str__(self):
        return f"({self.lo},{self.hi})"


def split_arc(lo, hi) -> tuple[Arc, ...]:
    """Normalize a possibly wrapping open interval into canonical arcs.

    (lo, hi) is read on the real line with hi - lo <= 1; a wrapping input
    like (-0.1, 0.1) becomes (0.9, 1) and (0, 0.1).  The single seam point
    at 0 is dropped; it is a boundary point of the pieces, so closures,
    measures and stabilizers are unaffected.
    """
    lo = QuadraticNumber.coerce(lo)
    hi = QuadraticNumber.coerce(hi)
    if not lo < hi:
        raise ValueError("arc needs lo < hi")
    if (hi - lo) > 1:
        raise ValueError("arc length may not exceed 1")
    lo_f, hi_f = lo.frac(), hi - lo.floor()
    if hi_f <= 1:
        return (Arc(lo_f, hi_f),)
    pieces = []
    if lo_f < 1:
        pieces.append(Arc(lo_f, QuadraticNumber(1)))
    pieces.append(Arc(QuadraticNumber(0), (hi_f - 1)))
    return tuple(pieces)


@dataclass(frozen=True)
class Box:
    """One product box; None factors mean the full circle / full Z_m."""

    torus: tuple[Optional[Arc], ...]
    torsion: tuple[Optional[frozenset], ...]


@dataclass(frozen=True)
class OpenSet:
    group: GroupDescriptor
    boxes: tuple[Box, ...]

    @classmethod
    def build(cls, K: GroupDescriptor, *box_specs) -> "OpenSet":
        """Build from per-coordinate factor specs.

        Each spec lists one factor per coordinate of K: a (lo, hi) pair
        (wrapping allowed) or None for torus coordinates; an iterable of
        residues or None for torsion coordinates.  A 1-D convenience: specs
        that are bare (lo, hi) pairs of scalars are treated as single-arc
        boxes when K = T^1.
        """
        boxes: list[Box] = []
        r, ms = K.torus_rank, K.torsion_orders
        for spec in box_specs:
            spec = _normalize_box_spec(spec, r, len(ms))
            torus_choices: list[tuple[Optional[Arc], ...]] = [()]
            for f in spec[:r]:
                alts = (None,) if f is None else split_arc(*f)
                if f is None:
                    torus_choices = [t + (None,) for t in torus_choices]
                else:
                    torus_choices = [t + (a,) for t in torus_choices for a in alts]
            torsion_factors = []
            for f, m in zip(spec[r:], ms):
                if f is None:
                    torsion_factors.append(None)
                else:
                    residues = frozenset(int(v) % m for v in f)
                    if not residues:
                        raise ValueError("empty torsion factor makes an empty box")
                    torsion_factors.append(residues if len(residues) < m else None)
            for t in torus_choices:
                boxes.append(Box(t, tuple(torsion_factors)))
        return cls(K, tuple(boxes))

    def is_empty(self) -> bool:
        return not self.boxes

    def translate(self, shift: GroupPoint) -> "OpenSet":
        """The set U + shift; exactness is kept (floats are lifted exactly)."""
        _check_point_shape(self.group, shift)
        specs = []
        for box in self.boxes:
            spec = []
            for arc, s in zip(box.torus, shift.torus):
                s = QuadraticNumber.coerce(s)
                spec.append(None if arc is None else (arc.lo + s, arc.hi + s))
            for residues, s, m in zip(box.torsion, shift.torsion, self.group.torsion_orders):
                spec.append(None if residues is None else {(v + s) % m for v in residues})
            specs.append(tuple(spec))
        return OpenSet.build(self.group, *specs)

    def __str__(self):
        if not self.boxes:
            return "{}"
        parts = []
        for box in self.boxes:
            fs = [("T" if a is None else str(a)) for a in box.torus]
            fs += [
                ("*" if t is None else "{" + ",".join(map(str, sorted(t))) + "}")
                for t in box.torsion
            ]
            parts.append(" x ".join(fs))
        return " + ".join(parts)


def _normalize_box_spec(spec, r: int, k: int):
    if r == 1 and k == 0 and isinstance(spec, (tuple, list)) and len(spec) == 2:
        a, b = spec
        if not isinstance(a, (tuple, list, set, frozenset, type(None))):
            return ((a, b),)
    if r + k == 1 and isinstance(spec, (set, frozenset)):
        return (frozenset(spec),)
    spec = tuple(spec)
    if len(spec) != r + k:
        raise ShapeMismatchError(f"box spec needs {r + k} factors, got {len(spec)}")
    return spec


def _check_point_shape(K: GroupDescriptor, x: GroupPoint):
    if len(x.torus) != K.torus_rank or len(x.torsion) != len(K.torsion_orders):
        raise ShapeMismatchError("point does not fit the set's group")


# -- membership --------------------------------------------------------------


def membership(U: OpenSet, x: GroupPoint, eps: float = EPS_MEM) -> Membership:
    """Tri-state membership; exact-tagged points are decided exactly.

    On the float path a point whose verdict could flip when every arc is
    enlarged/shrunk by eps is reported boundary-ambiguous.
    """
    _check_point_shape(U.group, x)
    if x.is_exact:
        return Membership.IN if _contains_exact(U, x) else Membership.OUT
    strict = any(_box_contains_float(b, x, 0.0) for b in U.boxes)
    loose = any(_box_contains_float(b, x, +eps) for b in U.boxes)
    shrunk = any(_box_contains_float(b, x, -eps) for b in U.boxes)
    if loose != shrunk:
        return Membership.BOUNDARY
    return Membership.IN if strict else Membership.OUT


def _contains_exact(U: OpenSet, x: GroupPoint) -> bool:
    for box in U.boxes:
        ok = True
        for arc, c in zip(box.torus, x.torus):
            if arc is not None and not arc.contains_exact(c):
                ok = False
                break
        if ok:
            for residues, c in zip(box.torsion, x.torsion):
                if residues is not None and c not in residues:
                    ok = False
                    break
        if ok:
            return True
    return False


def _box_contains_float(box: Box, x: GroupPoint, pad: float) -> bool:
    for arc, c in zip(box.torus, x.torus):
        if arc is None:
            continue
        v = float(c) % 1.0
        if not (float(arc.lo) - pad < v < float(arc.hi) + pad):
            return False
    for residues, c in zip(box.torsion, x.torsion):
        if residues is not None and c not in residues:
            return False
    return True


# -- closure cells ------------------------------------------------------------


def _closure_contains(U: OpenSet, coords: Sequence) -> bool:
    """Closed-set membership at exact coordinates (torus scalars + residues)."""
    r = U.group.torus_rank
    for box in U.boxes:
        ok = True
        for arc, c in zip(box.torus, coords[:r]):
            if arc is None:
                continue
            t = (c - arc.lo).frac()
            if not t <= arc.length():
                ok = False
                break
        if ok:
            for residues, c in zip(box.torsion, coords[r:]):
                if residues is not None and c not in residues:
                    ok = False
                    break
        if ok:
            return True
    return False


def _torus_breakpoints(U: OpenSet, i: int) -> list:
    pts = set()
    for box in U.boxes:
        arc = box.torus[i]
        if arc is not None:
            pts.add(arc.lo.frac())
            pts.add(arc.hi.frac())
    return sorted(pts, key=float)


def _cells_from_breakpoints(pts: list) -> list:
    """Representative coordinates of the cell decomposition of the circle.

    Returns exact scalars: each breakpoint itself plus a midpoint of every
    open interval between consecutive breakpoints (wrapping at the seam).
    If there are no breakpoints the whole circle is one cell.
    """
    if not pts:
        return [QuadraticNumber(0)]
    reps = []
    n = len(pts)
    for j, p in enumerate(pts):
        reps.append(p)
        nxt = pts[(j + 1) % n] + (1 if j == n - 1 else 0)
        reps.append(((p + nxt) / 2).frac())
    return reps


def _cell_grid(U: OpenSet, extra: Optional[Sequence[set]] = None) -> list[list]:
    """Per-coordinate exact cell representatives for U's closure structure."""
    K = U.group
    grids = []
    for i in range(K.torus_rank):
        pts = set(_torus_breakpoints(U, i))
        if extra is not None:
            pts |= extra[i]
        grids.append(_cells_from_breakpoints(sorted(pts, key=float)))
    for m in K.torsion_orders:
        grids.append(list(range(m)))
    return grids


# -- jordan measure ------------------------------------------------------------


def jordan_measure(U: OpenSet) -> float:
    """Haar measure of the box union, by exact cell decomposition."""
    K = U.group
    r = K.torus_rank
    interval_cells: list[list] = []  # per torus coord: (rep, length) pairs
    for i in range(r):
        pts = _torus_breakpoints(U, i)
        cells = []
        if not pts:
            cells.append((QuadraticNumber(0), QuadraticNumber(1)))
        else:
            n = len(pts)
            for j, p in enumerate(pts):
                nxt = pts[(j + 1) % n] + (1 if j == n - 1 else 0)
                cells.append((((p + nxt) / 2).frac(), nxt - p))
        interval_cells.append(cells)
    torsion_cells = [list(range(m)) for m in K.torsion_orders]

    # Accumulate exactly per radical bucket, then convert once.
    buckets: dict[int, Fraction] = {}
    total_rational = Fraction(0)
    for combo in product(*interval_cells, *[[(c, None) for c in cells] for cells in torsion_cells]):
        coords = [c[0] for c in combo]
        if not _open_cell_in(U, coords):
            continue
        weight = QuadraticNumber(1)
        for (_, length) in combo[:r]:
            weight = weight * length
        frac_weight = Fraction(1, math.prod(K.torsion_orders)) if K.torsion_orders else Fraction(1)
        weight = weight * frac_weight
        total_rational += weight.a
        if weight.d:
            buckets[weight.d] = buckets.get(weight.d, Fraction(0)) + weight.b
    value = float(total_rational) + math.fsum(
        float(b) * math.sqrt(d) for d, b in buckets.items()
    )
    return value


def _open_cell_in(U: OpenSet, coords: Sequence) -> bool:
    """Open-set membership of an interval-cell representative (exact)."""
    r = U.group.torus_rank
    for box in U.boxes:
        ok = True
        for arc, c in zip(box.torus, coords[:r]):
            if arc is not None and not arc.contains_exact(c):
                ok = False
                break
        if ok:
            for residues, c in zip(box.torsion, coords[r:]):
                if residues is not None and c not in residues:
                    ok = False
                    break
        if ok:
            return True
    return False


# -- stabilizer ----------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerReport:
    """Stabilizer of closure(U): finite shifts plus full-cylinder directions.

    The stabilizer subgroup is {shifts} x (full circles / full Z_m on the
    flagged coordinates).  Shifts put coordinate 0 on flagged coordinates.
    """

    group: GroupDescriptor
    shifts: tuple[GroupPoint, ...]
    full_torus: tuple[int, ...]
    full_torsion: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return not self.full_torus and not self.full_torsion and len(self.shifts) == 1

    def shift_values(self) -> list[tuple]:
        """Shift coordinates as exact scalars, sorted; handy in tests."""
        vals = []
        for s in self.shifts:
            vals.append(tuple(list(s.torus) + list(s.torsion)))
        return sorted(vals, key=lambda t: tuple(float(v) for v in t))

    def __str__(self):
        parts = [f"shifts={{{', '.join(str(s) for s in self.shifts)}}}"]
        if self.full_torus:
            parts.append(f"full torus coords {list(self.full_torus)}")
        if self.full_torsion:
            parts.append(f"full torsion coords {list(self.full_torsion)}")
        return "; ".join(parts)


def closure_stabilizer(U: OpenSet) -> StabilizerReport:
    """All group shifts s with closure(U) + s = closure(U), exactly.

    Candidates on each non-full coordinate are differences of arc endpoints
    (the slice map's discontinuities must be permuted); each candidate
    vector is then verified by exact cell comparison.  Raises on the empty
    set.
    """
    if U.is_empty():
        raise ValueError("stabilizer of the empty set is undefined")
    K = U.group
    r = K.torus_rank
    k = len(K.torsion_orders)
    grids = _cell_grid(U)
    memb = {}
    for combo in product(*grids):
        memb[combo] = _closure_contains(U, combo)

    full_torus, full_torsion = [], []
    for i in range(r + k):
        if _independent_of(memb, grids, i):
            (full_torus if i < r else full_torsion).append(i if i < r else i - r)

    # Candidate shifts per coordinate.
    cand: list[list] = []
    for i in range(r):
        if i in full_torus:
            cand.append([QuadraticNumber(0)])
            continue
        pts = _torus_breakpoints(U, i)
        diffs = {QuadraticNumber(0)}
        for a in pts:
            for b in pts:
                diffs.add((a - b).frac())
        cand.append(sorted(diffs, key=float))
    for j, m in enumerate(K.torsion_orders):
        cand.append([0] if j in full_torsion else list(range(m)))

    shifts = []
    for vec in product(*cand):
        if _shift_stabilizes(U, vec):
            shifts.append(
                GroupPoint(tuple(vec[:r]), tuple(int(v) for v in vec[r:]))
            )
    shifts.sort(key=lambda s: tuple(float(c) for c in list(s.torus) + list(s.torsion)))
    return StabilizerReport(K, tuple(shifts), tuple(full_torus), tuple(full_torsion))


def _independent_of(memb, grids, i) -> bool:
    """True if closure membership does not depend on coordinate i's cell."""
    others = [g for j, g in enumerate(grids) if j != i]
    for rest in product(*others):
        vals = set()
        for c in grids[i]:
            combo = rest[:i] + (c,) + rest[i:]
            vals.add(memb[combo])
            if len(vals) > 1:
                return False
    return True


def _shift_stabilizes(U: OpenSet, vec) -> bool:
    """Exact test of closure(U) + vec = closure(U) on the refined cell grid."""
    K = U.group
    r = K.torus_rank
    extra = []
    for i in range(r):
        pts = _torus_breakpoints(U, i)
        extra.append({(p + vec[i]).frac() for p in pts})
    grids = _cell_grid(U, extra)
    for combo in product(*grids):
        here = _closure_contains(U, combo)
        shifted_back = tuple(
            (c - vec[i]).frac() if i < r else (c - vec[i]) % K.torsion_orders[i - r]
            for i, c in enumerate(combo)
        )
        if here != _closure_contains(U, shifted_back):
            return False
    return True
