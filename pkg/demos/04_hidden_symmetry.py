"""When two different rotations produce the same return times.

A window that is invariant under a shift cannot tell that shift apart
from nothing: translating the angle by it changes the orbit but not the
hit pattern.  The symmetric two-arc set below is invariant under x + 1/2,
so rotating by sqrt2 and by sqrt2 + 1/2 gives bit-identical return sets
even though the rotations are genuinely non-isomorphic.  The closure
stabilizer computation detects the symmetry and flags the comparison.
"""

from fractions import Fraction

import numpy as np

from returnspec import (
    GroupDescriptor,
    QuadraticNumber,
    closure_stabilizer,
    compare_systems,
    parse_open_set,
    return_set_linear,
)


def main() -> None:
    T1 = GroupDescriptor(1, ())
    U = parse_open_set("(-0.1, 0.1) + (0.4, 0.6)", T1)
    a1 = QuadraticNumber.sqrt(2)
    a2 = QuadraticNumber.sqrt(2) + Fraction(1, 2)

    N = 2**14
    rs1 = return_set_linear(T1, T1.point(a1), U, (1, N))
    rs2 = return_set_linear(T1, T1.point(a2), U, (1, N))
    print(f"alpha = sqrt2       : {rs1.count} returns in {N} steps")
    print(f"alpha = sqrt2 + 1/2 : {rs2.count} returns in {N} steps")
    print(f"masks identical: {np.array_equal(rs1.mask, rs2.mask)}\n")

    rep = compare_systems(rs1, rs2)
    print(f"comparison verdict: {rep.verdict} ({rep.detail})\n")

    stab = closure_stabilizer(U)
    shifts = [str(T1.point(*sv)) for sv in stab.shift_values()]
    print(f"closure stabilizer of the window: shifts {shifts}, trivial = {stab.is_trivial}")
    print("a nontrivial stabilizer means equal return sets do not imply isomorphic")
    print("systems; the cli surfaces exactly this as a warning on compare runs\n")

    # a generic window has no such symmetry and does separate the two angles
    V = parse_open_set("(0.05, 0.4)", T1)
    rs1 = return_set_linear(T1, T1.point(a1), V, (1, N))
    rs2 = return_set_linear(T1, T1.point(a2), V, (1, N))
    rep = compare_systems(rs1, rs2)
    print(f"same angles through an asymmetric window: {rep.verdict}")
    if rep.theta is not None:
        print(f"first distinguishing line at theta = {rep.theta:.6f}, gap {rep.mismatch:.4f}")


if __name__ == "__main__":
    main()
