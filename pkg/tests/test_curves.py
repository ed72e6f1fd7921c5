import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eccensus.arith import primes_in_interval
from eccensus.curves import (
    GroupShape,
    PrimeFieldCurve,
    curve_order,
    curve_order_bsgs,
    exponent_by_scan,
    group_shape,
    order_from_multiple,
    point_count_exhaustive,
    shape_table,
    shape_table_naive,
    weighted_count_with_group,
    weighted_count_with_torsion,
)


def curves_over(p):
    for a in range(p):
        for b in range(p):
            if (4 * a**3 + 27 * b * b) % p:
                yield PrimeFieldCurve(p, a, b)


def test_group_shape_parse_and_str():
    g = GroupShape.parse("3x9")
    assert (g.N1, g.N2, g.order, g.exponent, str(g)) == (3, 3, 27, 9, "3x9")
    assert GroupShape.parse("7") == GroupShape(1, 7)
    with pytest.raises(ValueError):
        GroupShape.parse("2x9")
    with pytest.raises(ValueError):
        GroupShape(0, 1)


def test_curve_rejects_small_p_and_singular():
    with pytest.raises(ValueError):
        PrimeFieldCurve(3, 1, 1)
    with pytest.raises(ValueError):
        PrimeFieldCurve(9, 1, 1)
    with pytest.raises(ValueError):
        PrimeFieldCurve(5, 0, 0)


@pytest.mark.parametrize("p, a, b, n", [(5, 0, 1, 6), (5, 1, 0, 4), (7, 0, 2, 9)])
def test_curve_order_examples(p, a, b, n):
    c = PrimeFieldCurve(p, a, b)
    assert curve_order(c) == n == point_count_exhaustive(c)


def test_group_shape_examples():
    assert group_shape(PrimeFieldCurve(5, 0, 1)) == GroupShape(1, 6)
    c = PrimeFieldCurve(7, 3, 0)
    g = group_shape(c)
    assert g.order == curve_order(c) and g.N1 * g.N2 == exponent_by_scan(c)
    # y^2 = x^3 + 2 over F_7 has all nine 3-torsion points rational
    assert group_shape(PrimeFieldCurve(7, 0, 2)) == GroupShape(3, 1)


def test_prime_order_is_cyclic():
    for c in curves_over(23):
        n = curve_order(c)
        if n in (17, 19, 23, 29, 31):
            assert group_shape(c) == GroupShape(1, n)


def test_curve_order_matches_exhaustive_all_p_le_199():
    rng = random.Random(3)
    for p in primes_in_interval(4, 200):
        pairs = [(a, b) for a in range(p) for b in range(p)]
        for a, b in pairs if p < 30 else rng.sample(pairs, 40):
            if (4 * a**3 + 27 * b * b) % p:
                c = PrimeFieldCurve(p, a, b)
                assert curve_order(c) == point_count_exhaustive(c)


@given(st.sampled_from(primes_in_interval(400, 3000)), st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_bsgs_order_oracle(p, a, b):
    if (4 * a**3 + 27 * b * b) % p == 0:
        return
    c = PrimeFieldCurve(p, a, b)
    assert curve_order_bsgs(c) == curve_order(c)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 19, 31, 37])
def test_group_shape_invariants_and_exponent_oracle(p):
    for c in curves_over(p):
        n = curve_order(c)
        g = group_shape(c, n)
        assert g.order == n
        assert (p - 1) % g.N1 == 0 and n % (g.N1**2) == 0
        assert exponent_by_scan(c, n) == g.exponent


@given(st.integers(0, 60), st.integers(0, 60), st.integers(-50, 50), st.integers(-50, 50))
@settings(max_examples=60, deadline=None)
def test_scalar_multiplication(a, b, n, m):
    p = 61
    if (4 * a**3 + 27 * b * b) % p == 0:
        return
    c = PrimeFieldCurve(p, a, b)
    N = curve_order(c)
    for P in list(c.points())[:5]:
        assert c.on_curve(P)
        assert c.mul(n + m, P) == c.add(c.mul(n, P), c.mul(m, P))
        assert N % order_from_multiple(c, P, N) == 0
        assert c.mul(N, P) is None


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 23])
def test_shape_table_orbit_reduction_matches_naive(p):
    assert shape_table(p) == shape_table_naive(p)


def test_mass_formula():
    for p in primes_in_interval(4, 100):
        t = shape_table(p)
        assert sum(t.values()) == p * p - p
        total = sum(weighted_count_with_group(p, GroupShape(n1, N // (n1 * n1)), t) for (N, n1) in t)
        assert total == p


def test_weighted_count_examples():
    assert weighted_count_with_group(5, GroupShape(1, 7)) == Fraction(1, 2)
    assert weighted_count_with_group(5, GroupShape(1, 13)) == 0
    assert weighted_count_with_torsion(5, 7, 1) == Fraction(1, 2)
    assert weighted_count_with_torsion(7, 9, 3) == Fraction(1, 6)
    assert weighted_count_with_torsion(11, 9, 3) == 0


def test_full_three_torsion_over_f7_is_rational():
    # 3 | 7 - 1, so Z/3 x Z/3 occurs over F_7; its mass equals H(-3) = 1/6
    assert weighted_count_with_group(7, GroupShape(3, 1), shape_table_naive(7)) == Fraction(1, 6)
    exps = {exponent_by_scan(c) for c in curves_over(7) if curve_order(c) == 9}
    assert 3 in exps


def test_weighted_count_with_torsion_rejects():
    with pytest.raises(ValueError):
        weighted_count_with_torsion(7, 9, 2)
