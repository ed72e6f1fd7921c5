import math
import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from eccensus.arith import (
    _kronecker_jacobi_vec,
    _kronecker_multiplicative,
    divisors,
    ell_free_part,
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    kronecker_periodic,
    lcm_many,
    moebius,
    primes_in_interval,
    sqrt_count_mod_prime_power,
    valuation,
)


@pytest.mark.parametrize(
    "n, expected",
    [(1, []), (12, [(2, 2), (3, 1)]), (2**61 - 1, [(2**61 - 1, 1)])],
)
def test_factorize_examples(n, expected):
    assert factorize(n) == expected


@given(st.integers(min_value=1, max_value=2**63))
@settings(max_examples=200, deadline=None)
def test_factorize_matches_sympy(n):
    assert factorize(n) == sorted(sympy.factorint(n).items())


def test_factorize_semiprime_of_large_primes():
    p, q = 1000000007, 998244353
    assert factorize(p * q) == [(q, 1), (p, 1)]
    assert factorize(2**32 * 4294967291) == [(2, 32), (4294967291, 1)]


def test_factorize_rejects_nonpositive():
    with pytest.raises(ValueError):
        factorize(0)


def test_is_prime_small_range():
    assert [n for n in range(-5, 5000) if is_prime(n)] == list(sympy.primerange(0, 5000))


@given(st.integers(min_value=0, max_value=2**64))
@settings(max_examples=300, deadline=None)
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_is_prime_strong_pseudoprimes():
    # strong pseudoprimes to several small bases
    for n in (2047, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383, 341550071728321, 3825123056546413051):
        assert not is_prime(n)


@pytest.mark.parametrize("n, ell, nu, free", [(9, 3, 2, 1), (45, 3, 2, 5), (7, 3, 0, 7), (-48, 2, 4, -3)])
def test_valuation_examples(n, ell, nu, free):
    assert valuation(n, ell) == nu
    assert ell_free_part(n, ell) == free


def test_valuation_errors():
    with pytest.raises(ValueError):
        valuation(0, 3)
    with pytest.raises(ValueError):
        valuation(12, 4)


def test_phi_moebius_examples():
    assert (euler_phi(1), moebius(1)) == (1, 1)
    assert (euler_phi(36), moebius(36)) == (12, 0)
    assert euler_phi(4900) == 1680
    assert moebius(30) == -1


def test_phi_by_direct_count():
    n = np.arange(1, 10**5 + 1)
    # phi(n) = #{1 <= k <= n : gcd(k, n) = 1}, checked by direct count on a sample plus sympy everywhere
    for m in list(range(1, 300)) + random.Random(5).sample(range(300, 10**5), 50):
        assert euler_phi(m) == sum(1 for k in range(1, m + 1) if math.gcd(k, m) == 1)
    tot = [euler_phi(int(m)) for m in n[:20000]]
    assert tot == [int(sympy.totient(int(m))) for m in n[:20000]]


def test_moebius_sum_over_divisors():
    for n in range(1, 10**4 + 1):
        assert sum(moebius(d) for d in divisors(n)) == (1 if n == 1 else 0)


def test_divisors_match_sympy():
    for n in range(1, 2000):
        assert divisors(n) == sympy.divisors(n)


@pytest.mark.parametrize("a, n, expected", [(5, 1, 1), (3, 9, 0), (2, 15, 1), (1, 0, 1), (-1, 0, 1), (2, 0, 0), (-1, -1, -1), (3, 2, -1), (7, 2, 1)])
def test_kronecker_examples(a, n, expected):
    assert kronecker(a, n) == expected


def test_kronecker_euler_criterion():
    for p in sympy.primerange(3, 500):
        for a in range(p):
            e = pow(a, (p - 1) // 2, p)
            assert kronecker(a, p) == (e if e <= 1 else -1)


def test_kronecker_matches_jacobi():
    rng = random.Random(11)
    for _ in range(3000):
        n = rng.randrange(1, 10**6, 2)
        a = rng.randrange(-(10**6), 10**6)
        assert kronecker(a, n) == sympy.jacobi_symbol(a, n)


def test_kronecker_multiplicative():
    rng = random.Random(12)
    for _ in range(10**4):
        a, b = rng.randrange(-500, 500), rng.randrange(-500, 500)
        n = rng.randrange(-500, 500)
        assert kronecker(a, n) * kronecker(b, n) == kronecker(a * b, n)


@pytest.mark.parametrize("d", [-3, -4, -7, -8, -15, -20, -9996, -9999, 5, 12, 1, -1, 0, 2, -2])
def test_kronecker_periodic_routes(d):
    expect = [kronecker(d, n) for n in range(3000)]
    assert _kronecker_multiplicative(d, 3000).tolist() == expect
    assert _kronecker_jacobi_vec(d, 3000).tolist() == expect
    assert kronecker_periodic(d, 3000).tolist() == expect


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_sqrt_count_brute(ell):
    for e in range(0, 7 if ell == 2 else 5):
        mod = ell**e
        counts = np.bincount(np.arange(mod) ** 2 % mod, minlength=mod) if mod > 1 else [1]
        for c in range(mod):
            assert sqrt_count_mod_prime_power(c, ell, e) == counts[c], (c, ell, e)


@pytest.mark.parametrize("lo, hi, expected", [(4, 16, [5, 7, 11, 13]), (0, 2, []), (2, 3, []), (1, 3, [2])])
def test_primes_in_interval_examples(lo, hi, expected):
    assert primes_in_interval(lo, hi) == expected


def test_primes_in_interval_near_million():
    ps = primes_in_interval(10**6, 10**6 + 100)
    assert len(ps) == 6 and ps[0] == 1000003
    assert ps == [n for n in range(10**6 + 1, 10**6 + 100) if all(n % k for k in range(2, math.isqrt(n) + 1))]


@given(st.integers(min_value=0, max_value=10**7), st.integers(min_value=0, max_value=5000), st.sampled_from([7, 64, 1 << 20]))
@settings(max_examples=100, deadline=None)
def test_primes_in_interval_matches_sympy(lo, width, segment):
    hi = lo + width
    assert primes_in_interval(lo, hi, segment) == list(sympy.primerange(lo + 1, hi))


def test_primes_in_interval_rejects_bad():
    with pytest.raises(ValueError):
        primes_in_interval(10, 5)


def test_lcm_many():
    assert lcm_many([4, 6, 10]) == 60
    assert lcm_many([]) == 1


fractions_st = st.fractions(max_denominator=10**6).filter(lambda x: abs(x.numerator) < 10**12)


@given(fractions_st, fractions_st, fractions_st)
def test_rationals_exact_and_canonical(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    for v in (x + y, x * y, x - z):
        assert math.gcd(v.numerator, v.denominator) == 1 and v.denominator > 0
