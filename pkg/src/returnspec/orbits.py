"""Return-time sets of rotation, polynomial and skew-product orbits.

The set R = {n in window : T^n x0 in U} is stored as a bitmask over an
integer window.  Exact-tagged coordinates run through integer kernels, so
membership over million-step windows is drift-free; a vectorized
long-double screening pass decides the easy points and falls back to the
integer kernel near boundaries, which keeps the exact path fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .exactnum import ExactArithmeticError, QuadraticNumber, _floor_sqrt_term, _sign_pair
from .groups import GroupDescriptor, GroupPoint, Character, ShapeMismatchError
from .opensets import Arc, Box, EPS_MEM, OpenSet

_LD = np.longdouble
_LD_EPS = float(np.finfo(_LD).eps)

Window = Union[int, tuple]


class WindowError(ValueError):
    """Malformed or unsupported sampling window."""


@dataclass(frozen=True, eq=False)
class ReturnSet:
    """Bitmask of return times over the closed window [n_lo, n_hi]."""

    n_lo: int
    n_hi: int
    mask: np.ndarray
    ambiguous_count: int = 0
    provenance: str = ""

    def __post_init__(self):
        if self.n_lo > self.n_hi:
            raise WindowError("window is empty")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (self.n_hi - self.n_lo + 1,):
            raise WindowError("mask length does not match window")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    # -- queries ---------------------------------------------------------

    @cached_property
    def members(self) -> np.ndarray:
        """The return times themselves, ascending int64 array."""
        return np.flatnonzero(self.mask).astype(np.int64) + self.n_lo

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def contains(self, n: int) -> bool:
        return self.n_lo <= n <= self.n_hi and bool(self.mask[n - self.n_lo])

    def members_in(self, lo: int, hi: int) -> np.ndarray:
        """Members n with lo <= n <= hi (requires [lo,hi] inside the window)."""
        if lo < self.n_lo or hi > self.n_hi:
            raise WindowError(f"[{lo},{hi}] is not inside [{self.n_lo},{self.n_hi}]")
        m = self.members
        return m[(m >= lo) & (m <= hi)]

    def density(self) -> float:
        return self.count / (self.n_hi - self.n_lo + 1)

    def __eq__(self, other):
        if not isinstance(other, ReturnSet):
            return NotImplemented
        return (
            self.n_lo == other.n_lo
            and self.n_hi == other.n_hi
            and np.array_equal(self.mask, other.mask)
        )

    def __repr__(self):
        return (
            f"ReturnSet([{self.n_lo},{self.n_hi}], count={self.count}, "
            f"ambiguous={self.ambiguous_count})"
        )

    # -- construction ------------------------------------------------------

    @classmethod
    def from_integers(
        cls, values: Iterable[int], window: tuple, provenance: str = "imported"
    ) -> "ReturnSet":
        n_lo, n_hi = window
        mask = np.zeros(n_hi - n_lo + 1, dtype=bool)
        for v in values:
            if n_lo <= v <= n_hi:
                mask[v - n_lo] = True
        return cls(n_lo, n_hi, mask, 0, provenance)

    # -- RTS v1 file format --------------------------------------------------

    def to_text(self) -> str:
        """Serialize: header line, then the run-length encoded mask in hex.

        Runs alternate starting with a zeros-run (possibly of length 0).
        """
        runs = []
        current, run = False, 0
        for bit in self.mask:
            if bool(bit) == current:
                run += 1
            else:
                runs.append(run)
                current, run = not current, 1
        runs.append(run)
        body = " ".join(format(r, "x") for r in runs)
        return f"RTS v1 {self.n_lo} {self.n_hi} {self.count}\n{body}\n"

    @classmethod
    def from_text(cls, text: str, provenance: str = "rts-file") -> "ReturnSet":
        lines = text.splitlines()
        if len(lines) < 2:
            raise ValueError("truncated RTS data")
        head = lines[0].split()
        if head[:2] != ["RTS", "v1"] or len(head) != 5:
            raise ValueError(f"bad RTS header: {lines[0]!r}")
        n_lo, n_hi, count = int(head[2]), int(head[3]), int(head[4])
        runs = [int(tok, 16) for tok in lines[1].split()]
        mask = np.zeros(n_hi - n_lo + 1, dtype=bool)
        pos, bit = 0, False
        for run in runs:
            if bit:
                mask[pos : pos + run] = True
            pos += run
            bit = not bit
        if pos != mask.size:
            raise ValueError("RTS run lengths do not cover the window")
        rs = cls(n_lo, n_hi, mask, 0, provenance)
        if rs.count != count:
            raise ValueError("RTS header count does not match the mask")
        return rs

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "ReturnSet":
        with open(path) as fh:
            return cls.from_text(fh.read(), provenance=f"rts-file:{path}")

    @classmethod
    def load_plain(cls, path, window: Optional[tuple] = None) -> "ReturnSet":
        """Import a plain text file with one integer per line."""
        values = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    values.append(int(line))
        if not values and window is None:
            raise ValueError("empty plain-text import needs an explicit window")
        if window is None:
            window = (min(values), max(values))
        return cls.from_integers(values, window, provenance=f"plain-file:{path}")


@dataclass(frozen=True)
class IntegerPolynomial:
    """P(n) = sum coeffs[i] * n^i with integer coefficients.

    In theorem mode (the default) the constant term must vanish, matching
    the hypotheses under which polynomial return times see the rotation.
    """

    coeffs: tuple[int, ...]
    theorem_mode: bool = True

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)
        if self.theorem_mode and coeffs and coeffs[0] != 0:
            raise ValueError("theorem mode requires P(0) = 0")

    @classmethod
    def identity(cls) -> "IntegerPolynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, n: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def values(self, ns: np.ndarray) -> list[int]:
        return [self(int(n)) for n in ns]

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c:+d}")
            else:
                head = "+" if c > 0 else "-"
                mag = "" if abs(c) == 1 else str(abs(c)) + "*"
                terms.append(f"{head}{mag}n" + (f"^{i}" if i > 1 else ""))
        if not terms:
            return "0"
        out = "".join(terms)
        return out[1:] if out.startswith("+") else out


@dataclass(frozen=True)
class SkewSystem:
    """The skew product (x, y) -> (x + alpha, y + x) on T^2."""

    alpha: Union[float, QuadraticNumber]

    @property
    def group(self) -> GroupDescriptor:
        return GroupDescriptor(2)

    def orbit_point(self, x0: GroupPoint, n: int) -> GroupPoint:
        """Closed form of the n-th iterate: (x + n a, y + n x + C(n,2) a)."""
        tri = n * (n - 1) // 2
        x, y = x0.torus
        if isinstance(x, QuadraticNumber) and isinstance(y, QuadraticNumber) and isinstance(self.alpha, QuadraticNumber):
            new_x = (x + self.alpha * n).frac()
            new_y = (y + x * n + self.alpha * tri).frac()
        else:
            a = float(self.alpha)
            new_x = (float(x) + n * a) % 1.0
            new_y = (float(y) + n * float(x) + tri * a) % 1.0
        return GroupPoint((new_x, new_y), ())


# -- coordinate orbit engines -------------------------------------------------


def _as_window(window: Window) -> tuple[int, int]:
    if isinstance(window, int):
        if window < 1:
            raise WindowError("window length must be >= 1")
        return (1, window)
    n_lo, n_hi = window
    if n_lo > n_hi:
        raise WindowError("window is empty")
    return (int(n_lo), int(n_hi))


def _int_reps(scalars: Sequence[QuadraticNumber]):
    """Common (Q, d) integer representation for a list of exact scalars."""
    d = 0
    for s in scalars:
        if s.d:
            if d and s.d != d:
                raise ExactArithmeticError("coordinates mix distinct radicals")
            d = s.d
    reps = [s.int_rep() for s in scalars]
    Q = 1
    for (_, _, q, _) in reps:
        Q = Q * q // math.gcd(Q, q)
    pairs = [(p * (Q // q), r * (Q // q)) for (p, r, q, _) in reps]
    return Q, d, pairs


class _ExactTorusOrbit:
    """Exact orbit of one torus coordinate: value_n = const + sum c_j[n]*t_j."""

    def __init__(self, const: QuadraticNumber, terms: Sequence[tuple]):
        self.coeff_seqs = [np.asarray(c) if not isinstance(c, list) else c for c, _ in terms]
        scalars = [const] + [t for _, t in terms]
        self.Q, self.d, pairs = _int_reps(scalars)
        self.const_pair = pairs[0]
        self.term_pairs = pairs[1:]
        self.n = len(self.coeff_seqs[0]) if self.coeff_seqs else 0
        self._u = None  # lazy long-double fractional parts
        self._max_abs = None

    def _coeff(self, j: int, idx: int) -> int:
        seq = self.coeff_seqs[j]
        return int(seq[idx])

    def _value_ints(self, idx: int) -> tuple[int, int]:
        X, Y = self.const_pair
        for j, (p, r) in enumerate(self.term_pairs):
            c = self._coeff(j, idx)
            X += c * p
            Y += c * r
        return X, Y

    def exact_in_arc(self, idx: int, arc: Arc) -> bool:
        X, Y = self._value_ints(idx)
        Q, d = self.Q, self.d
        m = (X + _floor_sqrt_term(Y, d)) // Q
        Xf = X - m * Q
        pl, rl, ql, dl = arc.lo.int_rep()
        ph, rh, qh, dh = arc.hi.int_rep()
        if (dl and d and dl != d) or (dh and d and dh != d):
            raise ExactArithmeticError("arc endpoint mixes a different radical")
        above = _sign_pair(Xf * ql - pl * Q, Y * ql - rl * Q, d or dl) > 0
        if not above:
            return False
        return _sign_pair(Xf * qh - ph * Q, Y * qh - rh * Q, d or dh) < 0

    def _long_double_u(self):
        if self._u is not None:
            return self._u
        X0, Y0 = self.const_pair
        v = _LD(X0) / self.Q + (_LD(Y0) * np.sqrt(_LD(self.d)) / self.Q if Y0 else _LD(0))
        total = np.full(self.n, v, dtype=_LD)
        bound = abs(float(v))
        for j, (p, r) in enumerate(self.term_pairs):
            seq = self.coeff_seqs[j]
            t = _LD(p) / self.Q + (_LD(r) * np.sqrt(_LD(self.d)) / self.Q if r else _LD(0))
            arr = np.asarray(seq, dtype=_LD) if isinstance(seq, list) else seq.astype(_LD)
            total = total + arr * t
            bound += float(np.max(np.abs(arr))) * abs(float(t)) if len(seq) else 0.0
        self._u = total - np.floor(total)
        self._max_abs = bound
        return self._u

    def arc_bits(self, arc: Optional[Arc]) -> np.ndarray:
        """Exact membership bits of the orbit against one open arc."""
        if arc is None:
            return np.ones(self.n, dtype=bool)
        if self.d == 0:
            return self._rational_bits(arc)
        big = any(isinstance(seq, list) for seq in self.coeff_seqs)
        if big:
            return np.fromiter(
                (self.exact_in_arc(i, arc) for i in range(self.n)), dtype=bool, count=self.n
            )
        u = self._long_double_u()
        margin = max(1e-11, 64.0 * (len(self.term_pairs) + 1) * self._max_abs * _LD_EPS)
        lo, hi = float(arc.lo), float(arc.hi)
        if margin > 0.1 or margin > 0.25 * (hi - lo):
            return np.fromiter(
                (self.exact_in_arc(i, arc) for i in range(self.n)), dtype=bool, count=self.n
            )
        bits = (u > lo + margin) & (u < hi - margin)
        decided_out = (u < lo - margin) | (u > hi + margin)
        pending = np.flatnonzero(~(bits | decided_out))
        for idx in pending:
            bits[idx] = self.exact_in_arc(int(idx), arc)
        return bits

    def _rational_bits(self, arc: Arc) -> np.ndarray:
        """value = X_n / Q: compare residues against exact integer thresholds."""
        Q = self.Q
        pc = self.const_pair[0]
        residues = None
        if all(not isinstance(seq, list) for seq in self.coeff_seqs) and Q <= (1 << 31):
            acc = np.full(self.n, pc % Q, dtype=np.int64)
            for j, (p, _) in enumerate(self.term_pairs):
                acc = (acc + (self.coeff_seqs[j] % Q) * (p % Q)) % Q
            residues = acc
        else:
            vals = []
            for i in range(self.n):
                X = pc
                for j, (p, _) in enumerate(self.term_pairs):
                    X += self._coeff(j, i) * p
                vals.append(X % Q)
            residues = np.asarray(vals, dtype=object if Q > (1 << 62) else np.int64)
        r_lo = (arc.lo * Q).floor() + 1
        r_hi = -((-(arc.hi * Q)).floor()) - 1  # ceil - 1
        return (residues >= r_lo) & (residues <= r_hi)

    def frac_floats(self) -> np.ndarray:
        """Fractional parts as float64 (long-double accuracy where possible)."""
        if self.d == 0:
            Q = self.Q
            pc = self.const_pair[0]
            vals = np.empty(self.n, dtype=np.float64)
            if all(not isinstance(seq, list) for seq in self.coeff_seqs) and Q <= (1 << 31):
                acc = np.full(self.n, pc % Q, dtype=np.int64)
                for j, (p, _) in enumerate(self.term_pairs):
                    acc = (acc + (self.coeff_seqs[j] % Q) * (p % Q)) % Q
                return acc.astype(np.float64) / Q
            for i in range(self.n):
                X = pc
                for j, (p, _) in enumerate(self.term_pairs):
                    X += self._coeff(j, i) * p
                vals[i] = (X % Q) / Q
            return vals
        big = any(isinstance(seq, list) for seq in self.coeff_seqs)
        if big:
            out = np.empty(self.n, dtype=np.float64)
            Q, d = self.Q, self.d
            for i in range(self.n):
                X, Y = self._value_ints(i)
                m = (X + _floor_sqrt_term(Y, d)) // Q
                Xf = X - m * Q
                out[i] = (Xf + math.sqrt(d) * Y) / Q if abs(Y) < (1 << 50) else float(
                    (QuadraticNumber(Fraction(Xf, Q), Fraction(Y, Q), d)).frac()
                )
            return out
        return self._long_double_u().astype(np.float64)


class _FloatTorusOrbit:
    """Float-path orbit of one torus coordinate, with guard-band padding."""

    def __init__(self, const: float, terms: Sequence[tuple]):
        self.n = len(terms[0][0]) if terms else 0
        total = np.full(self.n, _LD(const), dtype=_LD)
        for coeffs, scalar in terms:
            total = total + np.asarray(coeffs, dtype=_LD) * _LD(scalar)
        self.u = (total - np.floor(total)).astype(np.float64) % 1.0

    def arc_bits3(self, arc: Optional[Arc], eps: float):
        if arc is None:
            ones = np.ones(self.n, dtype=bool)
            return ones, ones, ones
        lo, hi = float(arc.lo), float(arc.hi)
        strict = (self.u > lo) & (self.u < hi)
        loose = (self.u > lo - eps) & (self.u < hi + eps)
        shrunk = (self.u > lo + eps) & (self.u < hi - eps)
        return strict, loose, shrunk

    def frac_floats(self) -> np.ndarray:
        return self.u


class _TorsionOrbit:
    """Residue orbit of one torsion coordinate mod m."""

    def __init__(self, m: int, const: int, terms: Sequence[tuple]):
        self.m = m
        n = len(terms[0][0]) if terms else 0
        acc = np.full(n, const % m, dtype=np.int64)
        for coeffs, c in terms:
            if isinstance(coeffs, list):
                add = np.fromiter(((v * c) % m for v in coeffs), dtype=np.int64, count=n)
            else:
                add = (coeffs % m) * (c % m)
            acc = (acc + add) % m
        self.residues = acc

    def factor_bits(self, residues: Optional[frozenset]) -> np.ndarray:
        if residues is None:
            return np.ones(len(self.residues), dtype=bool)
        table = np.zeros(self.m, dtype=bool)
        table[list(residues)] = True
        return table[self.residues]


# -- drivers -------------------------------------------------------------------


def _check_set(K: GroupDescriptor, U: OpenSet):
    if U.group != K:
        raise ShapeMismatchError("open set group does not match")


def _combine_exact(U: OpenSet, torus_orbits, torsion_orbits, n: int) -> np.ndarray:
    hit = np.zeros(n, dtype=bool)
    for box in U.boxes:
        bits = np.ones(n, dtype=bool)
        for orbit, arc in zip(torus_orbits, box.torus):
            bits &= orbit.arc_bits(arc)
            if not bits.any():
                break
        else:
            for orbit, residues in zip(torsion_orbits, box.torsion):
                bits &= orbit.factor_bits(residues)
        hit |= bits
    return hit


def _combine_float(U: OpenSet, torus_orbits, torsion_orbits, n: int, eps: float):
    strict = np.zeros(n, dtype=bool)
    loose = np.zeros(n, dtype=bool)
    shrunk = np.zeros(n, dtype=bool)
    for box in U.boxes:
        s = np.ones(n, dtype=bool)
        l = np.ones(n, dtype=bool)
        sh = np.ones(n, dtype=bool)
        for orbit, arc in zip(torus_orbits, box.torus):
            a, b, c = orbit.arc_bits3(arc, eps)
            s &= a
            l &= b
            sh &= c
        for orbit, residues in zip(torsion_orbits, box.torsion):
            bits = orbit.factor_bits(residues)
            s &= bits
            l &= bits
            sh &= bits
        strict |= s
        loose |= l
        shrunk |= sh
    return strict, loose, shrunk


def _return_set_from_orbits(
    K, U, torus_orbits, torsion_orbits, window, exact: bool, provenance: str,
    eps: float = EPS_MEM,
) -> ReturnSet:
    n_lo, n_hi = window
    n = n_hi - n_lo + 1
    if exact:
        mask = _combine_exact(U, torus_orbits, torsion_orbits, n)
        return ReturnSet(n_lo, n_hi, mask, 0, provenance)
    strict, loose, shrunk = _combine_float(U, torus_orbits, torsion_orbits, n, eps)
    ambiguous = int((loose != shrunk).sum())
    return ReturnSet(n_lo, n_hi, strict, ambiguous, provenance)


def _point_or_identity(K: GroupDescriptor, x0: Optional[GroupPoint]) -> GroupPoint:
    return K.identity() if x0 is None else x0


def return_set_linear(
    K: GroupDescriptor,
    alpha: GroupPoint,
    U: OpenSet,
    window: Window,
    x0: Optional[GroupPoint] = None,
    eps: float = EPS_MEM,
) -> ReturnSet:
    """R = {n : x0 + n*alpha in U} over the window (default start [1, N])."""
    _check_set(K, U)
    window = _as_window(window)
    x0 = _point_or_identity(K, x0)
    n_lo, n_hi = window
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    exact = alpha.is_exact and x0.is_exact
    torus_orbits = []
    for i in range(K.torus_rank):
        if exact:
            torus_orbits.append(
                _ExactTorusOrbit(x0.torus[i], [(ns, QuadraticNumber.coerce(alpha.torus[i]))])
            )
        else:
            torus_orbits.append(_FloatTorusOrbit(float(x0.torus[i]), [(ns, float(alpha.torus[i]))]))
    torsion_orbits = [
        _TorsionOrbit(m, x0.torsion[j], [(ns, alpha.torsion[j])])
        for j, m in enumerate(K.torsion_orders)
    ]
    prov = f"linear|K={K}|alpha={alpha}|x0={x0}|U={U}|window={n_lo}..{n_hi}"
    return _return_set_from_orbits(K, U, torus_orbits, torsion_orbits, window, exact, prov, eps)


def return_set_polynomial(
    K: GroupDescriptor,
    alpha: GroupPoint,
    P: IntegerPolynomial,
    U: OpenSet,
    window: Window,
    x0: Optional[GroupPoint] = None,
    eps: float = EPS_MEM,
) -> ReturnSet:
    """R = {n : x0 + P(n)*alpha in U}; exact for exact-tagged alpha.

    Float torus coordinates are lifted to their exact binary rational
    values first: P(n) is astronomically large even for short windows, so
    multiply-then-reduce in floats would be meaningless there.
    """
    _check_set(K, U)
    window = _as_window(window)
    x0 = _point_or_identity(K, x0)
    n_lo, n_hi = window
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    values = P.values(ns)
    small = max((abs(v) for v in values), default=0) < (1 << 62)
    coeffs = np.asarray(values, dtype=np.int64) if small else values
    torus_orbits = []
    for i in range(K.torus_rank):
        a = QuadraticNumber.coerce(alpha.torus[i])
        c0 = QuadraticNumber.coerce(x0.torus[i])
        torus_orbits.append(_ExactTorusOrbit(c0, [(coeffs, a)]))
    torsion_orbits = [
        _TorsionOrbit(m, x0.torsion[j], [(coeffs, alpha.torsion[j])])
        for j, m in enumerate(K.torsion_orders)
    ]
    prov = f"poly|K={K}|alpha={alpha}|x0={x0}|P={P}|U={U}|window={n_lo}..{n_hi}"
    return _return_set_from_orbits(K, U, torus_orbits, torsion_orbits, window, True, prov, eps)


def return_set_skew(
    S: SkewSystem,
    x0: GroupPoint,
    U: OpenSet,
    window: Window,
    eps: float = EPS_MEM,
) -> ReturnSet:
    """Return times of the skew product via its closed-form orbit."""
    K = S.group
    _check_set(K, U)
    window = _as_window(window)
    n_lo, n_hi = window
    ns = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    if max(abs(n_lo), abs(n_hi)) >= (1 << 31):
        tri = [int(n) * (int(n) - 1) // 2 for n in ns]
    else:
        tri = ns * (ns - 1) // 2
    exact = x0.is_exact and isinstance(S.alpha, QuadraticNumber)
    x, y = x0.torus
    if exact:
        a = S.alpha
        orbit_x = _ExactTorusOrbit(x, [(ns, a)])
        orbit_y = _ExactTorusOrbit(y, [(ns, x), (tri, a)])
    else:
        a = float(S.alpha)
        orbit_x = _FloatTorusOrbit(float(x), [(ns, a)])
        orbit_y = _FloatTorusOrbit(float(y), [(ns, float(x)), (tri, a)])
    prov = f"skew|alpha={S.alpha}|x0={x0}|U={U}|window={n_lo}..{n_hi}"
    return _return_set_from_orbits(K, U, [orbit_x, orbit_y], [], window, exact, prov, eps)


def weyl_discrepancy(
    K: GroupDescriptor,
    alpha: GroupPoint,
    P: IntegerPolynomial,
    chi: Character,
    N: int,
) -> float:
    """|1/N sum_{n=1..N} chi(P(n) alpha)|, the equidistribution test sum."""
    window = _as_window(N)
    ns = np.arange(window[0], window[1] + 1, dtype=np.int64)
    values = P.values(ns)
    small = max((abs(v) for v in values), default=0) < (1 << 62)
    coeffs = np.asarray(values, dtype=np.int64) if small else values
    phase = np.zeros(len(ns), dtype=np.float64)
    for i, k in enumerate(chi.torus):
        if k == 0:
            continue
        c = alpha.torus[i]
        if isinstance(c, QuadraticNumber):
            orbit = _ExactTorusOrbit(QuadraticNumber(0), [(coeffs, c)])
            phase += k * orbit.frac_floats()
        else:
            if not small:
                orbit = _ExactTorusOrbit(QuadraticNumber(0), [(coeffs, QuadraticNumber.coerce(c))])
                phase += k * orbit.frac_floats()
            else:
                phase += k * _FloatTorusOrbit(0.0, [(coeffs, float(c))]).frac_floats()
    for j, a in enumerate(chi.torsion):
        if a == 0:
            continue
        m = K.torsion_orders[j]
        orbit = _TorsionOrbit(m, 0, [(coeffs, alpha.torsion[j])])
        phase += (a * orbit.residues % m) / m
    return float(abs(np.exp(2j * np.pi * phase).mean()))
