"""Finite group actions and reconstruction from return subsets.

The finite analog of a return-time set: a group G acts on a set X, a
subset U of X and base point x0 give S = {g : g.x0 in U} inside G.  The
profile of a point x is {h : h.x in U}; grouping points by profile yields
the coarsest G-invariant partition of X in which U is a union of blocks.
U is called simple when that partition is discrete, and stable when its
setwise stabilizer {g : gU = U} is trivial.  For simple U the pointed
action (X, x0) can be rebuilt from S alone: profiles of the left-regular
action of G on itself, taken with respect to S, have the original points
as their classes.

Whether stable implies simple is open; search_counterexamples gathers
evidence over a catalog of small groups and certifies any violation it
finds, asserting only certificate validity, never the general answer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

OPEN_QUESTION_BANNER = (
    "open question evidence: records certify tested instances only and do not "
    "answer whether stability implies simplicity in general"
)


class GSetError(ValueError):
    """Malformed permutation, action, or subset data."""


class CapExceededError(RuntimeError):
    """A group or table grew beyond the configured cap."""


def _compose(p: tuple, q: tuple) -> tuple:
    """(p . q)(x) = p(q(x))."""
    return tuple(p[i] for i in q)


def _validate_perm(p, degree: int) -> tuple:
    t = tuple(int(v) for v in p)
    if len(t) != degree or sorted(t) != list(range(degree)):
        raise GSetError(f"not a permutation of 0..{degree - 1}: {p}")
    return t


@dataclass(eq=False)
class PermGroup:
    """A finite permutation group, fully enumerated and indexed.

    Elements are stored sorted, so indices are deterministic; the
    multiplication table is built lazily and memoized.
    """

    elements: tuple[tuple[int, ...], ...]
    name: str = ""

    @classmethod
    def generate(
        cls, generators: Iterable[Sequence[int]], name: str = "", cap: int = 5040
    ) -> "PermGroup":
        gens = [tuple(int(v) for v in g) for g in generators]
        if not gens:
            raise GSetError("need at least one generator")
        degree = len(gens[0])
        gens = [_validate_perm(g, degree) for g in gens]
        identity = tuple(range(degree))
        seen = {identity}
        frontier = [identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = _compose(x, g)
                if y not in seen:
                    if len(seen) >= cap:
                        raise CapExceededError(
                            f"group closure exceeded cap={cap} elements"
                        )
                    seen.add(y)
                    frontier.append(y)
        return cls(tuple(sorted(seen)), name=name)

    @property
    def degree(self) -> int:
        return len(self.elements[0])

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.elements)}

    @cached_property
    def identity_index(self) -> int:
        return self._index[tuple(range(self.degree))]

    def index(self, perm) -> int:
        return self._index[tuple(perm)]

    @cached_property
    def mul(self) -> np.ndarray:
        """mul[i, j] = index of elements[i] composed with elements[j]."""
        n = self.order
        if n > 4096:
            raise CapExceededError(f"multiplication table for order {n} exceeds cap 4096")
        idx = self._index
        table = np.empty((n, n), dtype=np.int32)
        for i, p in enumerate(self.elements):
            for j, q in enumerate(self.elements):
                table[i, j] = idx[_compose(p, q)]
        return table

    @cached_property
    def inv(self) -> np.ndarray:
        e = self.identity_index
        n = self.order
        out = np.empty(n, dtype=np.int32)
        mul = self.mul
        for i in range(n):
            out[i] = int(np.flatnonzero(mul[i] == e)[0])
        return out

    # -- subgroup lattice ---------------------------------------------------

    def _close(self, seed: Iterable[int]) -> frozenset:
        mul = self.mul
        cur = {self.identity_index} | set(int(s) for s in seed)
        frontier = list(cur)
        while frontier:
            x = frontier.pop()
            for y in list(cur):
                for z in (int(mul[x, y]), int(mul[y, x])):
                    if z not in cur:
                        cur.add(z)
                        frontier.append(z)
        return frozenset(cur)

    @cached_property
    def subgroups(self) -> tuple[frozenset, ...]:
        """Every subgroup, found by closing one extra generator at a time."""
        trivial = self._close(())
        found = {trivial}
        queue = [trivial]
        while queue:
            H = queue.pop()
            for g in range(self.order):
                if g in H:
                    continue
                K = self._close(H | {g})
                if K not in found:
                    found.add(K)
                    queue.append(K)
        return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))

    def conjugate_subgroup(self, H: frozenset, g: int) -> frozenset:
        mul, inv = self.mul, self.inv
        gi = int(inv[g])
        return frozenset(int(mul[int(mul[g, h]), gi]) for h in H)

    @cached_property
    def subgroup_classes(self) -> tuple[tuple[frozenset, ...], ...]:
        """Subgroups grouped by conjugacy, classes sorted by size then rep."""
        remaining = set(self.subgroups)
        classes = []
        while remaining:
            H = min(remaining, key=lambda s: (len(s), sorted(s)))
            orbit = {self.conjugate_subgroup(H, g) for g in range(self.order)}
            classes.append(tuple(sorted(orbit, key=lambda s: sorted(s))))
            remaining -= orbit
        return tuple(classes)

    def __repr__(self):
        label = self.name or f"degree {self.degree}"
        return f"PermGroup({label}, order={self.order})"


@dataclass(eq=False)
class Action:
    """A left action of a PermGroup on {0..n-1} as a lookup table."""

    group: PermGroup
    table: np.ndarray  # shape (order, n): table[g, x] = g.x
    name: str = ""

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int32)
        if t.shape[0] != self.group.order:
            raise GSetError("action table must have one row per group element")
        e = self.group.identity_index
        if not np.array_equal(t[e], np.arange(t.shape[1])):
            raise GSetError("identity row of an action must be the identity map")
        t.setflags(write=False)
        self.table = t

    @classmethod
    def natural(cls, G: PermGroup) -> "Action":
        return cls(G, np.array(G.elements, dtype=np.int32), name=f"{G.name or 'G'} natural")

    @classmethod
    def regular(cls, G: PermGroup) -> "Action":
        return cls(G, G.mul.copy(), name=f"{G.name or 'G'} regular")

    @classmethod
    def on_cosets(cls, G: PermGroup, H: frozenset) -> "Action":
        """Left multiplication on left cosets gH; the stabilizer of coset H is H."""
        mul = G.mul
        coset_of = {}
        reps = []
        for g in range(G.order):
            if g in coset_of:
                continue
            members = sorted(int(mul[g, h]) for h in H)
            cid = len(reps)
            reps.append(members[0])
            for mmb in members:
                coset_of[mmb] = cid
        n = len(reps)
        table = np.empty((G.order, n), dtype=np.int32)
        for a in range(G.order):
            for c, rep in enumerate(reps):
                table[a, c] = coset_of[int(mul[a, rep])]
        return cls(G, table, name=f"{G.name or 'G'}/H{len(H)}.{reps[0] if reps else 0}")

    @property
    def degree(self) -> int:
        return int(self.table.shape[1])

    def apply(self, g: int, x: int) -> int:
        return int(self.table[g, x])

    def orbits(self) -> list[frozenset]:
        seen: set[int] = set()
        out = []
        for x in range(self.degree):
            if x in seen:
                continue
            orb = set(int(v) for v in self.table[:, x])
            seen |= orb
            out.append(frozenset(orb))
        return out

    def is_transitive(self) -> bool:
        return len(set(int(v) for v in self.table[:, 0])) == self.degree

    def stabilizer(self, x: int) -> frozenset:
        return frozenset(int(g) for g in np.flatnonzero(self.table[:, x] == x))

    def __repr__(self):
        return f"Action({self.name or 'unnamed'}, degree={self.degree}, order={self.group.order})"


def enumerate_group(generators: Iterable[Sequence[int]], cap: int = 5040) -> Action:
    """Close a generator list into a full group and return its natural action."""
    G = PermGroup.generate(generators, cap=cap)
    return Action.natural(G)


def transitive_actions(G: PermGroup, up_to_conjugacy: bool = True) -> list[Action]:
    """Coset actions for each (class of) subgroup, by descending subgroup size.

    Every transitive G-set is isomorphic to one of these; conjugate
    subgroups give isomorphic actions, so one representative per class
    covers everything when up_to_conjugacy is set.
    """
    if up_to_conjugacy:
        subs = [cls_[0] for cls_ in G.subgroup_classes]
    else:
        subs = list(G.subgroups)
    subs.sort(key=lambda H: (-len(H), sorted(H)))
    return [Action.on_cosets(G, H) for H in subs]


def setwise_stabilizer(action: Action, subset: Iterable[int]) -> frozenset:
    """{g : g U = U} for a subset U of the acted-on set."""
    want = frozenset(int(x) for x in subset)
    out = []
    for g in range(action.group.order):
        if frozenset(int(action.table[g, x]) for x in want) == want:
            out.append(g)
    return frozenset(out)


def _subset_mask(degree: int, subset) -> np.ndarray:
    if isinstance(subset, np.ndarray) and subset.dtype == bool:
        if subset.shape != (degree,):
            raise GSetError("subset mask has the wrong length")
        return subset
    mask = np.zeros(degree, dtype=bool)
    for x in subset:
        if not 0 <= int(x) < degree:
            raise GSetError(f"subset point {x} outside 0..{degree - 1}")
        mask[int(x)] = True
    return mask


def profile_codes(action: Action, subset) -> np.ndarray:
    """Integer labels for the profile classes {h : h.x in U} of each point.

    Labels are first-occurrence ranks, so they are stable under any
    relabeling of the raw profile encodings.
    """
    mask = _subset_mask(action.degree, subset)
    B = mask[action.table]  # B[h, x] = (h.x in U)
    order = action.group.order
    if order <= 63:
        weights = np.uint64(1) << np.arange(order, dtype=np.uint64)
        codes = weights @ B.astype(np.uint64)
    else:
        packed = np.packbits(B.T, axis=1)
        _, codes = np.unique(packed, axis=0, return_inverse=True)
    _, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inverse].astype(np.int32)


@dataclass(frozen=True)
class BlockSystem:
    """A partition of the acted-on set, canonically ordered by smallest member."""

    blocks: tuple[frozenset, ...]

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "BlockSystem":
        groups: dict[int, set] = {}
        for x, b in enumerate(labels):
            groups.setdefault(int(b), set()).add(x)
        return cls(tuple(sorted((frozenset(s) for s in groups.values()), key=min)))

    @property
    def size(self) -> int:
        return len(self.blocks)

    def is_discrete(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def block_of(self, x: int) -> frozenset:
        for b in self.blocks:
            if x in b:
                return b
        raise GSetError(f"point {x} not covered by the partition")

    def is_invariant(self, action: Action) -> bool:
        """Slow direct check: every translate of every block is a block."""
        family = set(self.blocks)
        pts = sorted(x for b in self.blocks for x in b)
        if pts != list(range(action.degree)) or any(len(b) == 0 for b in self.blocks):
            return False
        for g in range(action.group.order):
            for b in self.blocks:
                if frozenset(int(action.table[g, x]) for x in b) not in family:
                    return False
        return True


def block_system_generated(action: Action, subset) -> BlockSystem:
    """Coarsest G-invariant partition in which the subset is a block union."""
    return BlockSystem.from_labels(profile_codes(action, subset))


def is_simple(action: Action, subset) -> bool:
    """True when the generated block system separates every point."""
    codes = profile_codes(action, subset)
    return len(np.unique(codes)) == action.degree


def return_subset(action: Action, x0: int, subset) -> np.ndarray:
    """S = {g : g.x0 in U} as a boolean mask over group element indices."""
    mask = _subset_mask(action.degree, subset)
    return mask[action.table[:, int(x0)]]


@dataclass(eq=False)
class ReconstructedAction:
    """Result of rebuilding a pointed action from a return subset."""

    action: Action
    base_point: int
    subset: frozenset  # block indices whose points lie in the rebuilt U


def reconstruct_from_return_subset(
    G: PermGroup, s_mask: Union[np.ndarray, Iterable[int]]
) -> ReconstructedAction:
    """Rebuild (X, x0, U) from S inside G via regular-action profiles.

    Points of the rebuilt set are profile classes of G acting on itself
    on the left; g and g' share a class when hg in S iff hg' in S for
    every h.  The class of the identity is the base point, and S itself
    is a union of classes, giving the subset on the quotient.
    """
    if not isinstance(s_mask, np.ndarray) or s_mask.dtype != bool:
        s_mask = _subset_mask(G.order, s_mask)
    if s_mask.shape != (G.order,):
        raise GSetError("return subset mask must cover the group")
    mul = G.mul
    labels = profile_codes(Action.regular(G), s_mask)
    n_blocks = int(labels.max()) + 1
    reps = np.empty(n_blocks, dtype=np.int32)
    for g in range(G.order - 1, -1, -1):
        reps[labels[g]] = g
    table = labels[mul[:, reps]]
    action = Action(G, table, name=f"rebuilt from S in {G.name or 'G'}")
    base = int(labels[G.identity_index])
    subset = frozenset(int(b) for b in np.unique(labels[s_mask]))
    return ReconstructedAction(action, base, subset)


def actions_isomorphic(
    a1: Action, x1: int, a2: Action, x2: Optional[int] = None
) -> Optional[np.ndarray]:
    """Equivariant bijection between transitive actions of one group, or None.

    With both base points given this is the pointed test: the candidate
    map g.x1 -> g.x2 either extends to a bijection or nothing does.  With
    x2 omitted, every base point on the other side is tried.
    """
    if a1.group.elements != a2.group.elements:
        raise GSetError("actions of different groups cannot be compared")
    if a1.degree != a2.degree:
        return None
    if x2 is None:
        for y in range(a2.degree):
            phi = actions_isomorphic(a1, x1, a2, y)
            if phi is not None:
                return phi
        return None
    d = a1.degree
    col1 = a1.table[:, int(x1)]
    col2 = a2.table[:, int(x2)]
    phi = np.full(d, -1, dtype=np.int32)
    for g in range(a1.group.order):
        y1, y2 = int(col1[g]), int(col2[g])
        if phi[y1] < 0:
            phi[y1] = y2
        elif phi[y1] != y2:
            return None
    if (phi < 0).any() or np.unique(phi).size != d:
        return None
    return phi


# -- catalog -------------------------------------------------------------------


def _cyclic(n: int) -> PermGroup:
    cyc = tuple((i + 1) % n for i in range(n))
    return PermGroup.generate([cyc], name=f"C{n}")


def _dihedral(n: int) -> PermGroup:
    if n < 3:
        raise GSetError("dihedral groups here start at D3")
    rot = tuple((i + 1) % n for i in range(n))
    flip = tuple((-i) % n for i in range(n))
    return PermGroup.generate([rot, flip], name=f"D{n}")


def _symmetric(n: int) -> PermGroup:
    if n == 1:
        return PermGroup.generate([(0,)], name="S1")
    cyc = tuple((i + 1) % n for i in range(n))
    swap = tuple([1, 0] + list(range(2, n)))
    return PermGroup.generate([swap, cyc], name=f"S{n}")


def _alternating(n: int) -> PermGroup:
    gens = []
    for i in range(n - 2):
        g = list(range(n))
        g[i], g[i + 1], g[i + 2] = g[i + 1], g[i + 2], g[i]
        gens.append(tuple(g))
    return PermGroup.generate(gens, name=f"A{n}")


def _quaternion() -> PermGroup:
    # elements 0..7 = +1, -1, +i, -i, +j, -j, +k, -k; left multiplication
    # by i and j generates the regular representation
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    base = {"1": 0, "i": 2, "j": 4, "k": 6}

    def code(s, axis):
        return base[axis] + (0 if s > 0 else 1)

    def qmul(x, y):
        sx, ax = 1 - 2 * (x % 2), names[x - (x % 2)]
        sy, ay = 1 - 2 * (y % 2), names[y - (y % 2)]
        table = {
            ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
            ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
            ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
            ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
        }
        s, axis = table[(ax, ay)]
        return code(sx * sy * s, axis)

    left_i = tuple(qmul(2, y) for y in range(8))
    left_j = tuple(qmul(4, y) for y in range(8))
    return PermGroup.generate([left_i, left_j], name="Q8")


def expand_catalog_names(spec: Union[str, Sequence[str]]) -> list[str]:
    """Expand a catalog request like 'C2..C12, D3..D6, S3, A4, Q8'."""
    if isinstance(spec, str):
        parts = [p.strip() for p in spec.split(",") if p.strip()]
    else:
        parts = [str(p).strip() for p in spec]
    out = []
    for p in parts:
        if ".." in p:
            lo, hi = p.split("..")
            lo, hi = lo.strip(), hi.strip()
            if not lo or not hi or lo[0] != hi[0]:
                raise GSetError(f"bad catalog range: {p}")
            letter = lo[0]
            a, b = int(lo[1:]), int(hi[1:])
            if b < a:
                raise GSetError(f"empty catalog range: {p}")
            out.extend(f"{letter}{k}" for k in range(a, b + 1))
        else:
            out.append(p)
    return out


def catalog(spec: Union[str, Sequence[str]] = "C2..C12, D3..D6, S3, S4, A4, Q8") -> dict:
    """Build the named groups; returns an ordered name -> PermGroup dict."""
    out = {}
    for name in expand_catalog_names(spec):
        if name in out:
            continue
        kind, num = name[0], name[1:]
        if name == "Q8":
            out[name] = _quaternion()
        elif kind == "C" and num.isdigit() and int(num) >= 1:
            out[name] = _cyclic(int(num))
        elif kind == "D" and num.isdigit():
            out[name] = _dihedral(int(num))
        elif kind == "S" and num.isdigit() and int(num) >= 1:
            out[name] = _symmetric(int(num))
        elif kind == "A" and num.isdigit() and int(num) >= 3:
            out[name] = _alternating(int(num))
        else:
            raise GSetError(f"unknown catalog group: {name}")
    return out


# -- subset enumeration up to the group action ---------------------------------


def _orbit_representatives(
    action: Action, exhaustive_degree: int, samples: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, str, Optional[int]]:
    """Subset orbit representatives with stabilizer orders and orbit sizes.

    Exhaustive while 2^degree is manageable, seeded sampling beyond; in
    both regimes each returned mask is the minimum of its G-orbit under
    the little-endian integer encoding, so reruns and overlapping samples
    agree on representatives.
    """
    d, order = action.degree, action.group.order
    if d <= exhaustive_degree:
        n = 1 << d
        ids = np.arange(n, dtype=np.uint64)
        masks = ((ids[:, None] >> np.arange(d, dtype=np.uint64)) & 1).astype(bool)
        mode, used_seed = "exhaustive", None
    else:
        rng = random.Random(f"{seed}:{action.name}:{d}")
        picks = sorted({rng.getrandbits(d) for _ in range(samples)})
        masks = (
            (np.asarray(picks, dtype=np.uint64)[:, None] >> np.arange(d, dtype=np.uint64)) & 1
        ).astype(bool)
        mode, used_seed = "sampled", seed
    pow2 = np.uint64(1) << np.arange(d, dtype=np.uint64)
    own = masks.astype(np.uint64) @ pow2
    canon = own.copy()
    stab = np.zeros(len(masks), dtype=np.int64)
    inv = action.group.inv
    for g in range(order):
        translated = masks[:, action.table[int(inv[g])]].astype(np.uint64) @ pow2
        np.minimum(canon, translated, out=canon)
        stab += translated == own
    if mode == "exhaustive":
        keep = np.flatnonzero(own == canon)
    else:
        _, first = np.unique(canon, return_index=True)
        keep = np.sort(first)
    orbit_sizes = order // stab[keep]
    return masks[keep], stab[keep], orbit_sizes, mode, used_seed


# -- reconstruction sweep -------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    """Round-trip outcomes for one action, over subset orbit representatives."""

    group: str
    action: str
    degree: int
    mode: str  # exhaustive | sampled
    subsets_tested: int
    simple_count: int
    failures: int
    witness_subset: tuple[int, ...]
    witness_ok: bool
    seed: Optional[int] = None


def _batched_simplicity(action: Action, masks: np.ndarray) -> np.ndarray:
    """Row-wise simplicity of many subsets at once."""
    order, degree = action.group.order, action.degree
    if order > 63:
        return np.array([is_simple(action, m) for m in masks])
    codes = np.zeros(masks.shape, dtype=np.uint64)
    for h in range(order):
        codes += masks[:, action.table[h]].astype(np.uint64) << np.uint64(h)
    s = np.sort(codes, axis=1)
    distinct = (np.diff(s, axis=1) != 0).sum(axis=1) + 1
    return distinct == degree


def check_reconstruction(action: Action, x0: int, mask: np.ndarray) -> bool:
    """One full round trip: return subset, rebuild, pointed-bijection check.

    Besides the equivariant bijection this also confirms the rebuilt
    subset maps back onto the original one under the canonical
    correspondence (class of g) -> g.x0.
    """
    G = action.group
    s = return_subset(action, x0, mask)
    rec = reconstruct_from_return_subset(G, s)
    if actions_isomorphic(action, x0, rec.action, rec.base_point) is None:
        return False
    labels = profile_codes(Action.regular(G), s)
    for g in range(G.order):
        if (int(labels[g]) in rec.subset) != bool(mask[action.table[g, x0]]):
            return False
    return True


def sweep_reconstruction(
    groups: Optional[dict] = None,
    exhaustive_degree: int = 16,
    samples: int = 1024,
    seed: int = 0,
) -> list[SweepRecord]:
    """Round-trip every simple subset of every transitive action.

    Subsets run over G-orbit representatives: translating U translates
    the return subset but leaves the profile classes of the regular
    action, hence the rebuilt pointed action, unchanged.  A failure would
    be a simple subset whose rebuilt action is not pointed-isomorphic to
    the original; each record carries a witness subset so the verdict can
    be re-derived from scratch.
    """
    if groups is None:
        groups = catalog()
    records = []
    for gname, G in groups.items():
        for act in transitive_actions(G):
            masks, _, _, mode, used_seed = _orbit_representatives(
                act, exhaustive_degree, samples, seed
            )
            simple_rows = _batched_simplicity(act, masks)
            failures = 0
            witness_idx = None
            for i in np.flatnonzero(simple_rows):
                if witness_idx is None:
                    witness_idx = int(i)
                if not check_reconstruction(act, 0, masks[int(i)]):
                    failures += 1
            if witness_idx is None:
                witness, wok = (), True
            else:
                wmask = masks[witness_idx]
                witness = tuple(int(x) for x in np.flatnonzero(wmask))
                wok = check_reconstruction(act, 0, wmask)
            records.append(
                SweepRecord(
                    group=gname,
                    action=act.name,
                    degree=act.degree,
                    mode=mode,
                    subsets_tested=int(masks.shape[0]),
                    simple_count=int(simple_rows.sum()),
                    failures=failures,
                    witness_subset=witness,
                    witness_ok=wok,
                    seed=used_seed,
                )
            )
    return records


def verify_sweep_record(groups: dict, record: SweepRecord) -> bool:
    """Re-derive a sweep record's witness verdict without the vectorized paths.

    Profiles, simplicity, reconstruction, and the bijection test are all
    recomputed with plain loops, so every cited witness has been checked
    twice by different code.
    """
    G = groups[record.group]
    act = next(
        (a for a in transitive_actions(G) if a.name == record.action and a.degree == record.degree),
        None,
    )
    if act is None:
        return False
    if not record.witness_subset and record.degree > 0 and record.simple_count == 0:
        return record.witness_ok
    mask = np.zeros(act.degree, dtype=bool)
    for x in record.witness_subset:
        mask[x] = True
    profiles: dict[tuple, list] = {}
    for x in range(act.degree):
        profiles.setdefault(
            tuple(bool(mask[act.apply(h, x)]) for h in range(G.order)), []
        ).append(x)
    if not all(len(v) == 1 for v in profiles.values()):
        return False  # witness must be simple
    s = [bool(mask[act.apply(g, 0)]) for g in range(G.order)]
    gprofiles: dict[tuple, list] = {}
    for g in range(G.order):
        key = tuple(s[int(G.mul[h, g])] for h in range(G.order))
        gprofiles.setdefault(key, []).append(g)
    blocks = sorted(gprofiles.values(), key=lambda v: v[0])
    block_of = {}
    for bi, b in enumerate(blocks):
        for g in b:
            block_of[g] = bi
    stab_rebuilt = {
        a for a in range(G.order) if block_of[int(G.mul[a, G.identity_index])] == block_of[G.identity_index]
    }
    stab_orig = {g for g in range(G.order) if act.apply(g, 0) == 0}
    ok = len(blocks) == act.degree and stab_rebuilt == stab_orig
    return ok == record.witness_ok


# -- open-question search -------------------------------------------------------


@dataclass(frozen=True)
class SearchRecord:
    """One tested (action, subset-orbit) instance of the stability question."""

    group: str
    action: str
    degree: int
    mode: str  # exhaustive | sampled
    subset: tuple[int, ...]
    orbit_size: int
    stabilizer_order: int
    stable: bool
    simple: bool
    certificate: Optional[tuple[tuple[int, ...], ...]] = None
    certificate_verified: Optional[bool] = None
    seed: Optional[int] = None

    @property
    def is_counterexample(self) -> bool:
        return self.stable and not self.simple


def verify_certificate(
    action: Action, subset: Iterable[int], blocks: Sequence[Sequence[int]]
) -> bool:
    """Plain-loop recheck of a counterexample certificate.

    Confirms the cited partition is a G-invariant partition that is not
    all singletons, that the subset is a union of its blocks, and that
    the subset's setwise stabilizer is trivial.
    """
    system = BlockSystem(tuple(frozenset(int(x) for x in b) for b in blocks))
    if not system.is_invariant(action):
        return False
    if system.is_discrete():
        return False
    chosen = frozenset(int(x) for x in subset)
    covered: set[int] = set()
    for b in system.blocks:
        if b & chosen:
            if not b <= chosen:
                return False
            covered |= b
    if covered != chosen:
        return False
    return setwise_stabilizer(action, chosen) == frozenset({action.group.identity_index})


def search_counterexamples(
    groups: Optional[dict] = None,
    exhaustive_degree: int = 16,
    samples: int = 1024,
    seed: int = 0,
) -> list[SearchRecord]:
    """Test whether a trivial setwise stabilizer forces simplicity.

    Every transitive action of every group is swept over subset orbit
    representatives (exhaustive while 2^degree <= 2^exhaustive_degree,
    seeded sampling beyond).  Each instance records stability and
    simplicity; a stable non-simple instance gets a certificate (its
    nontrivial generated block system) which is immediately re-verified
    by the independent invariant checker.  Finding none answers nothing
    beyond the searched range; see OPEN_QUESTION_BANNER.
    """
    if groups is None:
        groups = catalog()
    records = []
    for gname, G in groups.items():
        for act in transitive_actions(G):
            masks, stabs, orbit_sizes, mode, used_seed = _orbit_representatives(
                act, exhaustive_degree, samples, seed
            )
            simple_rows = _batched_simplicity(act, masks)
            for i in range(masks.shape[0]):
                mask = masks[i]
                stable = int(stabs[i]) == 1
                simple = bool(simple_rows[i])
                subset = tuple(int(x) for x in np.flatnonzero(mask))
                cert = None
                cert_ok = None
                if stable and not simple:
                    system = block_system_generated(act, mask)
                    cert = tuple(tuple(sorted(b)) for b in system.blocks)
                    cert_ok = verify_certificate(act, subset, cert)
                records.append(
                    SearchRecord(
                        group=gname,
                        action=act.name,
                        degree=act.degree,
                        mode=mode,
                        subset=subset,
                        orbit_size=int(orbit_sizes[i]),
                        stabilizer_order=int(stabs[i]),
                        stable=stable,
                        simple=simple,
                        certificate=cert,
                        certificate_verified=cert_ok,
                        seed=used_seed,
                    )
                )
    return records
