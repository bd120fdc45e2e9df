"""Compact abelian groups T^r x Z/m_1 x ... x Z/m_k: points, characters, ops.

Torus coordinates live in [0,1) and are either plain floats or exact
QuadraticNumber scalars; torsion coordinates are residues.  Everything here
is immutable and pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Union

from .exactnum import QuadraticNumber

TorusCoord = Union[float, QuadraticNumber]

TWO_PI = 2.0 * math.pi


class ShapeMismatchError(ValueError):
    """A point or character does not fit the group descriptor."""


@dataclass(frozen=True)
class GroupDescriptor:
    """Shape of a group T^torus_rank x prod Z/m for m in torsion_orders."""

    torus_rank: int
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.torus_rank < 0:
            raise ValueError("torus rank must be >= 0")
        orders = tuple(int(m) for m in self.torsion_orders)
        if any(m < 2 for m in orders):
            raise ValueError("torsion orders must be >= 2")
        if list(orders) != sorted(orders):
            raise ValueError("torsion orders must be sorted ascending (canonical form)")
        object.__setattr__(self, "torsion_orders", orders)

    def point(self, *coords) -> "GroupPoint":
        """Build a point; exact tags via Fraction/str/QuadraticNumber coords."""
        coords = _unpack(coords, self.torus_rank + len(self.torsion_orders))
        if len(coords) != self.torus_rank + len(self.torsion_orders):
            raise ShapeMismatchError(f"expected {self.torus_rank + len(self.torsion_orders)} coordinates for {self}")
        torus = tuple(_norm_torus(c) for c in coords[: self.torus_rank])
        torsion = tuple(
            int(c) % m for c, m in zip(coords[self.torus_rank :], self.torsion_orders)
        )
        return GroupPoint(torus, torsion)

    def identity(self) -> "GroupPoint":
        return GroupPoint(
            tuple(QuadraticNumber(0) for _ in range(self.torus_rank)),
            tuple(0 for _ in self.torsion_orders),
        )

    def character(self, *freqs) -> "Character":
        freqs = _unpack(freqs, self.torus_rank + len(self.torsion_orders))
        if len(freqs) != self.torus_rank + len(self.torsion_orders):
            raise ShapeMismatchError(f"expected {self.torus_rank + len(self.torsion_orders)} frequencies for {self}")
        torus = tuple(int(k) for k in freqs[: self.torus_rank])
        torsion = tuple(
            int(a) % m for a, m in zip(freqs[self.torus_rank :], self.torsion_orders)
        )
        return Character(torus, torsion)

    def __str__(self):
        parts = []
        if self.torus_rank:
            parts.append(f"T^{self.torus_rank}")
        parts.extend(f"Z/{m}" for m in self.torsion_orders)
        return " x ".join(parts) if parts else "1"


def _unpack(values, expected):
    if len(values) == 1 and isinstance(values[0], (tuple, list)) and expected != 1:
        return tuple(values[0])
    return tuple(values)


def _norm_torus(c) -> TorusCoord:
    """Reduce a torus coordinate into [0,1), keeping exactness when given."""
    if isinstance(c, float):
        return c % 1.0
    return QuadraticNumber.coerce(c).frac()


@dataclass(frozen=True)
class GroupPoint:
    """Coordinates of a group element; build via GroupDescriptor.point."""

    torus: tuple[TorusCoord, ...]
    torsion: tuple[int, ...]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, QuadraticNumber) for c in self.torus)

    def torus_floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.torus)

    def __str__(self):
        vals = [str(c) for c in self.torus] + [str(c) for c in self.torsion]
        return "(" + ", ".join(vals) + ")"


@dataclass(frozen=True)
class Character:
    """Dual-group element: integer torus frequencies plus torsion residues."""

    torus: tuple[int, ...]
    torsion: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return not any(self.torus) and not any(self.torsion)

    def height(self) -> int:
        return max((abs(k) for k in self.torus), default=0)

    def __str__(self):
        vals = [str(k) for k in self.torus] + [str(a) for a in self.torsion]
        return "chi(" + ", ".join(vals) + ")"


def _check_point(K: GroupDescriptor, x: GroupPoint):
    if len(x.torus) != K.torus_rank or len(x.torsion) != len(K.torsion_orders):
        raise ShapeMismatchError(f"point {x} does not fit {K}")


def _check_char(K: GroupDescriptor, chi: Character):
    if len(chi.torus) != K.torus_rank or len(chi.torsion) != len(K.torsion_orders):
        raise ShapeMismatchError(f"character {chi} does not fit {K}")


def _coord_add(a: TorusCoord, b: TorusCoord) -> TorusCoord:
    if isinstance(a, QuadraticNumber) and isinstance(b, QuadraticNumber):
        return (a + b).frac()
    return (float(a) + float(b)) % 1.0


def add(K: GroupDescriptor, x: GroupPoint, y: GroupPoint) -> GroupPoint:
    """Componentwise group law; exact when both operands carry exact tags."""
    _check_point(K, x)
    _check_point(K, y)
    torus = tuple(_coord_add(a, b) for a, b in zip(x.torus, y.torus))
    torsion = tuple((a + b) % m for a, b, m in zip(x.torsion, y.torsion, K.torsion_orders))
    return GroupPoint(torus, torsion)


def neg(K: GroupDescriptor, x: GroupPoint) -> GroupPoint:
    _check_point(K, x)
    torus = tuple(
        (-c).frac() if isinstance(c, QuadraticNumber) else (-c) % 1.0 for c in x.torus
    )
    torsion = tuple((-a) % m for a, m in zip(x.torsion, K.torsion_orders))
    return GroupPoint(torus, torsion)


def scalar_mul(K: GroupDescriptor, n: int, x: GroupPoint) -> GroupPoint:
    """n-fold sum of x.

    Exact-tagged coordinates are reduced exactly (7 * 3/10 -> 1/10); plain
    floats use multiply-then-reduce, whose error grows like n ulps.
    """
    _check_point(K, x)
    torus = []
    for c in x.torus:
        if isinstance(c, QuadraticNumber):
            torus.append((c * n).frac())
        else:
            torus.append((n * c) % 1.0)
    torsion = tuple((n * a) % m for a, m in zip(x.torsion, K.torsion_orders))
    return GroupPoint(tuple(torus), torsion)


def char_phase(K: GroupDescriptor, chi: Character, x: GroupPoint) -> float:
    """Phase in [0,1) with char_eval = e^{2 pi i phase}."""
    _check_char(K, chi)
    _check_point(K, x)
    terms = []
    for k, c in zip(chi.torus, x.torus):
        if k == 0:
            continue
        if isinstance(c, QuadraticNumber):
            terms.append(float((c * k).frac()))
        else:
            terms.append((k * c) % 1.0)
    for a, c, m in zip(chi.torsion, x.torsion, K.torsion_orders):
        terms.append((a * c % m) / m)
    return math.fsum(terms) % 1.0


def char_eval(K: GroupDescriptor, chi: Character, x: GroupPoint) -> complex:
    """Value of the character at x, a point on the unit circle."""
    return cmath.exp(TWO_PI * 1j * char_phase(K, chi, x))


def invariant_metric(K: GroupDescriptor, x: GroupPoint, y: GroupPoint) -> float:
    """Translation-invariant metric: sum_i 2^-i ||x_i - y_i||.

    Torus coordinate i (1-based) has weight 2^-i and uses the circle
    distance; the j-th torsion coordinate has weight 2^-(r+j) and uses the
    cyclic distance normalized by the order.
    """
    _check_point(K, x)
    _check_point(K, y)
    total, weight = 0.0, 1.0
    for a, b in zip(x.torus, y.torus):
        weight *= 0.5
        if isinstance(a, QuadraticNumber) and isinstance(b, QuadraticNumber):
            delta = float((a - b).frac())
        else:
            delta = (float(a) - float(b)) % 1.0
        total += weight * min(delta, 1.0 - delta)
    for a, b, m in zip(x.torsion, y.torsion, K.torsion_orders):
        weight *= 0.5
        delta = (a - b) % m
        total += weight * min(delta, m - delta) / m
    return total


@dataclass(frozen=True)
class GeneratorReport:
    """Outcome of is_generator: verdict, height searched, witness if false."""

    value: bool
    height: int
    exact: bool
    witness: Optional[Character] = None

    def __bool__(self):
        return self.value


def _char_kills_alpha_exact(
    K: GroupDescriptor, chi: Character, alpha: GroupPoint
) -> bool:
    """Exact test of chi(alpha) == 1 for exact-tagged alpha.

    The phase is sum k_i alpha_i + sum a_j c_j / m_j; it is an integer iff
    the coefficient of each distinct radical vanishes and the rational part
    is an integer (1, sqrt(d), sqrt(d') are Q-linearly independent).
    """
    rational = Fraction(0)
    radicals: dict[int, Fraction] = {}
    for k, c in zip(chi.torus, alpha.torus):
        q = c if isinstance(c, QuadraticNumber) else QuadraticNumber.coerce(c)
        rational += q.a * k
        if q.d:
            radicals[q.d] = radicals.get(q.d, Fraction(0)) + q.b * k
    for a, c, m in zip(chi.torsion, alpha.torsion, K.torsion_orders):
        rational += Fraction(a * c, m)
    return all(v == 0 for v in radicals.values()) and rational.denominator == 1


def is_generator(
    K: GroupDescriptor,
    alpha: GroupPoint,
    height_bound: int = 50,
    tol: float = 1e-9,
) -> GeneratorReport:
    """Decide whether alpha topologically generates K, up to character height.

    No nontrivial character chi with max |torus frequency| <= height_bound
    may satisfy chi(alpha) = 1.  Torsion frequencies are always enumerated
    fully, so the answer is unconditional on fully finite groups.  The test
    is exact for exact-tagged alpha; float coordinates use a tolerance and
    the report is marked inexact.
    """
    _check_point(K, alpha)
    exact = alpha.is_exact
    r = K.torus_rank
    torsion_ranges = [range(m) for m in K.torsion_orders]
    for h in range(0, height_bound + 1):
        if r == 0 and h > 0:
            break
        for torus in _freq_shell(r, h):
            for torsion in product(*torsion_ranges):
                chi = Character(torus, torsion)
                if chi.is_trivial:
                    continue
                if exact:
                    killed = _char_kills_alpha_exact(K, chi, alpha)
                else:
                    phase = char_phase(K, chi, alpha)
                    killed = min(phase, 1.0 - phase) < tol
                if killed:
                    return GeneratorReport(False, height_bound, exact, chi)
    return GeneratorReport(True, height_bound, exact, None)


def _freq_shell(r: int, h: int) -> Iterable[tuple[int, ...]]:
    """Integer vectors in Z^r with max-norm exactly h (all of Z^0 at h=0).

    Ordered so that witnesses come out with positive leading entries.
    """
    if r == 0:
        yield ()
        return
    shell = [
        vec
        for vec in product(range(-h, h + 1), repeat=r)
        if max((abs(v) for v in vec), default=0) == h
    ]
    shell.sort(key=lambda vec: tuple((abs(v), v < 0) for v in vec))
    yield from shell
