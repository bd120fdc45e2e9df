"""The pure line spectrum of a rotation return set.

Averages of e^(-2 pi i theta n) over the return times of an irrational
rotation converge to zero except on a countable set of frequencies: the
multiples of the angle.  For the half interval U = (0, 1/2) the surviving
lines are the odd multiples, with magnitude 1/(pi k), so the whole
spectrum is predictable in closed form.  This script scans, refines, and
prints the comparison.
"""

import math

from returnspec import (
    GroupDescriptor,
    QuadraticNumber,
    cesaro_average,
    find_peaks,
    parse_open_set,
    return_set_linear,
)


def main() -> None:
    T1 = GroupDescriptor(1, ())
    alpha = QuadraticNumber.sqrt(2) - 1
    N = 2**16
    rs = return_set_linear(T1, T1.point(alpha), parse_open_set("(0, 1/2)", T1), (1, N))

    # a single Cesaro average: theta = alpha sits on a line, 0.123 does not
    on = cesaro_average(rs, float(alpha), N)
    off = cesaro_average(rs, 0.123, N)
    print(f"A_N(alpha)  = {abs(on):.6f}   (a spectral line)")
    print(f"A_N(0.123)  = {abs(off):.6f}   (generic frequency, decays like 1/N)\n")

    peaks = find_peaks(rs, N=N)
    a = float(alpha)
    print(f"{len(peaks)} peaks above the default threshold at N = 2^16:")
    print(f"{'k':>4} {'theta':>12} {'magnitude':>11} {'predicted':>11}")
    for p in peaks:
        k = min(range(-25, 26), key=lambda j: abs((j * a - p.theta + 0.5) % 1.0 - 0.5))
        predicted = 0.5 if k == 0 else 1.0 / (math.pi * abs(k))
        print(f"{k:>4} {p.theta:>12.8f} {p.magnitude:>11.6f} {predicted:>11.6f}")
    print("\nevery line is an odd multiple of alpha (plus the density at k = 0);")
    print("even multiples vanish because the half interval is balanced under x + 1/2")


if __name__ == "__main__":
    main()
