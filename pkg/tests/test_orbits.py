"""Return-time sets of rotations, polynomial orbits, and the skew product."""

import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from returnspec import GroupDescriptor, QuadraticNumber
from returnspec.config import parse_open_set
from returnspec.orbits import (
    IntegerPolynomial,
    ReturnSet,
    SkewSystem,
    WindowError,
    return_set_linear,
    return_set_polynomial,
    return_set_skew,
    weyl_discrepancy,
)

from oracles import (
    in_arc,
    mp_frac,
    mp_quadratic,
    polynomial_members,
    rotation_members,
    skew_members,
)

T1 = GroupDescriptor(1, ())


def test_rational_rotation_example():
    U = parse_open_set("(0.25, 0.55)", T1)
    rs = return_set_linear(T1, T1.point(Fraction(3, 10)), U, (0, 19))
    assert rs.members.tolist() == [1, 5, 8, 11, 15, 18]
    assert rs.count == 6
    assert rs.density() == 0.3
    assert rs.ambiguous_count == 0
    assert rs.contains(5) and not rs.contains(6)
    assert not rs.contains(99)  # outside the window is simply not a member


def test_integer_window_means_one_to_n():
    U = parse_open_set("(0.25, 0.55)", T1)
    rs = return_set_linear(T1, T1.point(Fraction(3, 10)), U, 16)
    assert (rs.n_lo, rs.n_hi) == (1, 16)
    assert rs.members.tolist() == [1, 5, 8, 11, 15]


def test_members_in_requires_subwindow():
    rs = ReturnSet.from_integers([1, 5, 8], (0, 19))
    assert rs.members_in(2, 10).tolist() == [5, 8]
    with pytest.raises(WindowError):
        rs.members_in(-5, 10)


def test_rotation_matches_oracle_exact_coordinates():
    rng = random.Random(101)
    for _ in range(12):
        d = rng.choice([2, 3, 5])
        alpha = QuadraticNumber(Fraction(rng.randint(-3, 3), rng.randint(1, 7)),
                                Fraction(1, rng.randint(1, 9)), d)
        x0 = QuadraticNumber(Fraction(rng.randint(0, 9), 10))
        lo = Fraction(rng.randint(0, 700), 1000)
        hi = lo + Fraction(rng.randint(50, 280), 1000)
        U = parse_open_set(f"({lo}, {hi})", T1)
        window = (-250, 250)
        rs = return_set_linear(T1, T1.point(alpha), U, window, x0=T1.point(x0))
        assert rs.ambiguous_count == 0
        a_mp = mp_quadratic(alpha.a, alpha.b, alpha.d)
        want = rotation_members(a_mp, mp_quadratic(x0.as_fraction()),
                                lambda v: in_arc(v, lo, hi), window)
        assert rs.members.tolist() == sorted(want)


def test_rotation_wrapping_arc_and_x0_offset():
    alpha = QuadraticNumber.sqrt(2) - 1
    U = parse_open_set("(-0.1,0.1)+(0.4,0.6)", T1)
    x0 = QuadraticNumber(Fraction(7, 13))
    rs = return_set_linear(T1, T1.point(alpha), U, (-400, 400), x0=T1.point(x0))
    a_mp = mp_quadratic(-1, 1, 2)

    def hit(v):
        return in_arc(v, Fraction(-1, 10), Fraction(1, 10)) or in_arc(
            v, Fraction(2, 5), Fraction(3, 5))

    want = rotation_members(a_mp, mp_quadratic(Fraction(7, 13)), hit, (-400, 400))
    assert rs.members.tolist() == sorted(want)
    assert rs.ambiguous_count == 0


def test_rotation_float_alpha_flags_ambiguity_conservatively():
    rng = random.Random(55)
    for _ in range(6):
        alpha = rng.random()
        lo, hi = 0.2, 0.7
        U = parse_open_set("(0.2, 0.7)", T1)
        eps = 1e-9
        rs = return_set_linear(T1, T1.point(alpha), U, (1, 2000), eps=eps)
        a_mp = mpmath.mpf(alpha)  # exact binary value of the float
        want = set(rotation_members(a_mp, mpmath.mpf(0),
                                    lambda v: lo < v < hi, (1, 2000)))
        got = set(rs.members.tolist())
        wrong = got.symmetric_difference(want)
        # disagreements can only happen inside the eps guard band
        for n in wrong:
            u = float(mp_frac(a_mp * n))
            assert min(abs(u - lo), abs(u - hi)) <= 2 * eps
        assert len(wrong) <= rs.ambiguous_count


def test_torus2_with_torsion_coordinates():
    K = GroupDescriptor(1, (2,))
    alpha = K.point(QuadraticNumber.sqrt(2) - 1, 1)
    U = parse_open_set("(0, 0.4) x {0}", K)
    rs = return_set_linear(K, alpha, U, (1, 500))
    a_mp = mp_quadratic(-1, 1, 2)
    want = [n for n in rotation_members(a_mp, mpmath.mpf(0),
                                        lambda v: in_arc(v, 0, Fraction(2, 5)), (1, 500))
            if n % 2 == 0]
    assert rs.members.tolist() == sorted(want)
    assert rs.ambiguous_count == 0


def test_rank_two_torus_box():
    K = GroupDescriptor(2, ())
    alpha = K.point(QuadraticNumber.sqrt(2) - 1, QuadraticNumber.sqrt(3) - 1)
    U = parse_open_set("(0, 0.5) x (0.25, 0.75)", K)
    rs = return_set_linear(K, alpha, U, (1, 400))
    a1, a2 = mp_quadratic(-1, 1, 2), mp_quadratic(-1, 1, 3)
    want = [n for n in range(1, 401)
            if in_arc(a1 * n, 0, Fraction(1, 2)) and in_arc(a2 * n, Fraction(1, 4), Fraction(3, 4))]
    assert rs.members.tolist() == sorted(want)


def test_polynomial_orbit_matches_oracle():
    rng = random.Random(77)
    for _ in range(8):
        coeffs = [0] + [rng.randint(-3, 3) for _ in range(rng.randint(1, 4))]
        if all(c == 0 for c in coeffs):
            coeffs[1] = 1
        P = IntegerPolynomial(tuple(coeffs))
        alpha = QuadraticNumber(Fraction(rng.randint(-2, 2), rng.randint(1, 5)),
                                Fraction(1, rng.randint(1, 6)), rng.choice([2, 3, 5]))
        lo, hi = Fraction(1, 10), Fraction(2, 5)
        U = parse_open_set("(0.1, 0.4)", T1)
        window = (-150, 150)
        rs = return_set_polynomial(T1, T1.point(alpha), P, U, window)
        a_mp = mp_quadratic(alpha.a, alpha.b, alpha.d)
        want = polynomial_members(a_mp, coeffs, mpmath.mpf(0),
                                  lambda v: in_arc(v, lo, hi), window)
        assert rs.members.tolist() == sorted(want)
        assert rs.ambiguous_count == 0


def test_polynomial_identity_reduces_to_rotation():
    alpha = QuadraticNumber.sqrt(2) - 1
    U = parse_open_set("(0.1, 0.4)", T1)
    rs_lin = return_set_linear(T1, T1.point(alpha), U, (-200, 200))
    rs_poly = return_set_polynomial(T1, T1.point(alpha), IntegerPolynomial.identity(),
                                    U, (-200, 200))
    assert rs_lin == rs_poly


def test_polynomial_divisible_by_five_gives_equal_sets():
    # P(n) = n^5 - n is divisible by 5 for every n, so alpha and alpha + 1/5
    # drive identical orbits: P(n) * (1/5) is an integer shift on the circle.
    P = IntegerPolynomial((0, -1, 0, 0, 0, 1))
    a1 = QuadraticNumber.sqrt(2)
    a2 = QuadraticNumber.sqrt(2) + Fraction(1, 5)
    U = parse_open_set("(0.1, 0.4)", T1)
    r1 = return_set_polynomial(T1, T1.point(a1), P, U, (-500, 500))
    r2 = return_set_polynomial(T1, T1.point(a2), P, U, (-500, 500))
    assert r1 == r2
    assert np.array_equal(r1.mask, r2.mask)


def test_polynomial_values_and_theorem_mode():
    P = IntegerPolynomial((0, -1, 0, 0, 0, 1))
    assert P.degree == 5
    assert P(2) == 30
    assert P(-2) == -30
    assert P.values(np.array([0, 1, 2, 3])) == [0, 0, 30, 240]
    with pytest.raises(ValueError):
        IntegerPolynomial((1, 2))  # nonzero constant term breaks P(0) = 0
    Q = IntegerPolynomial((1, 2), theorem_mode=False)
    assert Q(0) == 1


def test_skew_orbit_point_closed_form():
    S = SkewSystem(QuadraticNumber.sqrt(2) - 1)
    x0 = S.group.point(QuadraticNumber(0), QuadraticNumber(0))
    # closed form must agree with stepping (x, y) -> (x + a, y + x)
    x, y = mpmath.mpf(0), mpmath.mpf(0)
    a = mp_quadratic(-1, 1, 2)
    for n in range(1, 60):
        x, y = x + a, y + x
        p = S.orbit_point(x0, n)
        fx, fy = p.torus_floats()
        assert abs(fx - float(mp_frac(x))) < 1e-12
        assert abs(fy - float(mp_frac(y))) < 1e-12


def test_skew_return_set_matches_oracle_both_directions():
    S = SkewSystem(QuadraticNumber.sqrt(2) - 1)
    K = S.group
    x0 = K.point(QuadraticNumber(0), QuadraticNumber(Fraction(1, 3)))
    U = parse_open_set("(0, 0.37) x (0, 0.5)", K)
    rs = return_set_skew(S, x0, U, (-300, 300))
    a = mp_quadratic(-1, 1, 2)

    def hit(x, y):
        return in_arc(x, 0, Fraction(37, 100)) and in_arc(y, 0, Fraction(1, 2))

    want = skew_members(a, mpmath.mpf(0), mp_quadratic(Fraction(1, 3)), hit, (-300, 300))
    assert rs.members.tolist() == sorted(want)
    assert rs.ambiguous_count == 0


def test_skew_cylinder_equals_rotation_set():
    S = SkewSystem(QuadraticNumber.sqrt(2) - 1)
    K = S.group
    rs_skew = return_set_skew(S, K.identity(), parse_open_set("(0, 0.37) x T", K),
                              (1, 4096))
    rs_rot = return_set_linear(T1, T1.point(QuadraticNumber.sqrt(2) - 1),
                               parse_open_set("(0, 0.37)", T1), (1, 4096))
    assert np.array_equal(rs_skew.mask, rs_rot.mask)


def test_text_round_trip_and_errors():
    rng = random.Random(5)
    vals = sorted(rng.sample(range(-50, 200), 40))
    rs = ReturnSet.from_integers(vals, (-50, 200))
    rt = ReturnSet.from_text(rs.to_text())
    assert rt == rs
    assert rt.members.tolist() == vals
    for bad in (
        "",
        "RTS v2 0 19 6\n1 1\n",
        "RTS v1 0 19\n1 1\n",
        "RTS v1 0 19 2\n1 1 1 1\n",      # count disagrees with runs
        "RTS v1 0 19 6\n1 x\n",
        "RTS v1 19 0 0\n\n",
    ):
        with pytest.raises(ValueError):
            ReturnSet.from_text(bad)


def test_save_load_round_trip(tmp_path):
    U = parse_open_set("(0.25, 0.55)", T1)
    rs = return_set_linear(T1, T1.point(Fraction(3, 10)), U, (0, 19))
    path = tmp_path / "set.rts"
    rs.save(path)
    back = ReturnSet.load(path)
    assert back == rs
    assert back.members.tolist() == [1, 5, 8, 11, 15, 18]


def test_window_validation():
    with pytest.raises(WindowError):
        ReturnSet(5, 4, np.zeros(0, dtype=bool))
    with pytest.raises(WindowError):
        ReturnSet(0, 3, np.zeros(3, dtype=bool))  # mask length mismatch
    with pytest.raises(WindowError):
        return_set_linear(T1, T1.point(Fraction(1, 3)),
                          parse_open_set("(0.1, 0.2)", T1), 0)


def test_mask_is_read_only():
    rs = ReturnSet.from_integers([1], (0, 3))
    with pytest.raises(ValueError):
        rs.mask[0] = True


def test_weyl_discrepancy_decays_for_generic_alpha():
    K = T1
    P = IntegerPolynomial((0, 0, 1), theorem_mode=True)  # n^2
    chi = K.character(1)
    alpha = K.point(QuadraticNumber.sqrt(2))
    d_small = weyl_discrepancy(K, alpha, P, chi, 256)
    d_big = weyl_discrepancy(K, alpha, P, chi, 8192)
    assert d_big < d_small < 1.0
    assert d_big < 0.1
    # rational alpha with resonant character has no decay at all
    d_res = weyl_discrepancy(K, K.point(Fraction(1, 2)), P, K.character(2), 4096)
    assert d_res > 0.9
