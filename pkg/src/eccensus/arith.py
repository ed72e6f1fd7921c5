"""Integer primitives: factorization, multiplicative functions, Kronecker symbol, sieves.

All functions are pure. Rationals throughout the package are ``fractions.Fraction``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np

Factorization = List[Tuple[int, int]]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 10**6
_SMALL_LIMIT = 1 << 20


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags).astype(np.int64)


@lru_cache(maxsize=None)
def _small_primes() -> Tuple[int, ...]:
    return tuple(int(q) for q in _simple_sieve(_TRIAL_LIMIT))


@lru_cache(maxsize=None)
def _spf_table() -> np.ndarray:
    """Smallest prime factor for every n below _SMALL_LIMIT."""
    spf = np.zeros(_SMALL_LIMIT, dtype=np.int32)
    for q in range(2, math.isqrt(_SMALL_LIMIT - 1) + 1):
        if spf[q] == 0:
            block = spf[q * q :: q]
            block[block == 0] = q
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the fixed witness set is exact below 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n (Pollard rho, Brent cycle)."""
    for c in range(1, n):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")


def factorize(n: int) -> Factorization:
    """Prime factorization of 1 <= n as a sorted list of (prime, exponent)."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out: dict[int, int] = {}
    if n < _SMALL_LIMIT:
        spf = _spf_table()
        while n > 1:
            q = int(spf[n])
            n //= q
            out[q] = out.get(q, 0) + 1
        return sorted(out.items())
    for q in _small_primes():
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out[q] = e
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if is_prime(m):
                out[m] = out.get(m, 0) + 1
            else:
                d = _brent(m)
                stack.extend((d, m // d))
    return sorted(out.items())


def prime_factors(n: int) -> List[int]:
    return [q for q, _ in factorize(n)]


def divisors(n: int) -> List[int]:
    divs = [1]
    for q, e in factorize(n):
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _check_prime(ell: int) -> None:
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")


def valuation(n: int, ell: int) -> int:
    """Exponent of the prime ell in n (n != 0)."""
    _check_prime(ell)
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def ell_free_part(n: int, ell: int) -> int:
    """n with every factor of ell removed."""
    return n // ell ** valuation(n, ell)


def euler_phi(n: int) -> int:
    result = n
    for q, _ in factorize(n):
        result = result // q * (q - 1)
    return result


def moebius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers.

    Conventions: (a/0) = 1 iff a = +-1; (a/-1) = -1 iff a < 0;
    (a/2) = 0 for even a, 1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
    """
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_periodic(d: int, count: int) -> np.ndarray:
    """Vector of (d/n) for n = 0..count-1 with d fixed."""
    if count <= _SMALL_LIMIT:
        return _kronecker_multiplicative(d, count)
    return _kronecker_jacobi_vec(d, count)


def _kronecker_multiplicative(d: int, count: int) -> np.ndarray:
    """(d/n) is completely multiplicative in n > 0: evaluate at primes, spread by smallest prime factor."""
    out = np.ones(count, dtype=np.int64)
    if count == 0:
        return out
    spf = _spf_table()[:count].astype(np.int64)
    ps = np.flatnonzero((spf == np.arange(count)) & (np.arange(count) >= 2))
    at_p = np.zeros(count, dtype=np.int64)
    if len(ps):
        odd = ps[ps > 2]
        # Euler's criterion d^((p-1)/2) mod p, vectorised square-and-multiply
        base = d % odd
        exp = (odd - 1) // 2
        acc = np.ones_like(odd)
        while exp.any():
            acc = np.where(exp & 1, acc * base % odd, acc)
            base = base * base % odd
            exp >>= 1
        at_p[odd] = np.where(acc == 1, 1, np.where(acc == 0, 0, -1))
        if ps[0] == 2:
            at_p[2] = 0 if d % 2 == 0 else (1 if d % 8 in (1, 7) else -1)
    m = np.arange(count, dtype=np.int64)
    m[0] = 1
    while True:
        big = m > 1
        if not big.any():
            break
        p = spf[m[big]]
        out[big] *= at_p[p]
        m[big] //= p
    out[0] = 1 if abs(d) == 1 else 0
    return out


def _kronecker_jacobi_vec(d: int, count: int) -> np.ndarray:
    """Vector of (d/n) for n = 0..count-1 by a vectorised Jacobi reduction."""
    n = np.arange(count, dtype=np.int64)
    out = np.ones(count, dtype=np.int64)
    out[0] = 1 if abs(d) == 1 else 0
    # strip powers of two from n
    m = n.copy()
    m[0] = 1
    twos = np.zeros(count, dtype=np.int64)
    even = (m % 2 == 0)
    while even.any():
        m[even] //= 2
        twos[even] += 1
        even = (m % 2 == 0)
    if d % 2 == 0:
        out[(twos > 0)] = 0
    elif d % 8 in (3, 5):
        out[(twos % 2) == 1] *= -1
    # Jacobi (d/m) for odd m > 0
    a = d % m
    b = m.copy()
    active = a != 0
    while active.any():
        # strip all factors of two at once
        low = np.where(active, a & -a, 1)
        tz = np.log2(low.astype(np.float64)).astype(np.int64)
        a = a >> tz
        flip = (tz % 2 == 1) & ((b % 8 == 3) | (b % 8 == 5))
        out[flip] *= -1
        flip = active & (a % 4 == 3) & (b % 4 == 3)
        out[flip] *= -1
        na = np.where(active, b % np.where(active, a, 1), a)
        b = np.where(active, a, b)
        a = np.where(active, na, 0)
        active = a != 0
    out[(b != 1) & (n != 0)] = 0
    out[0] = 1 if abs(d) == 1 else 0
    return out


def sqrt_count_mod_prime_power(c: int, ell: int, e: int) -> int:
    """Number of y mod ell^e with y^2 = c mod ell^e."""
    if e == 0:
        return 1
    mod = ell**e
    c %= mod
    if ell == 2:
        if c == 0:
            return 2 ** (e // 2)
        k = (c & -c).bit_length() - 1
        if k % 2:
            return 0
        u = c >> k
        r = e - k  # precision left for the odd part
        half = k // 2
        # y = 2^half * t, t odd, t^2 = u mod 2^r; t is defined mod 2^(e-half)
        if r == 1:
            sols = 1
        elif r == 2:
            sols = 2 if u % 4 == 1 else 0
        else:
            sols = 4 if u % 8 == 1 else 0
        return sols * 2 ** (e - half - r) if sols else 0
    if c == 0:
        return ell ** (e // 2)
    k = 0
    while c % ell == 0:
        c //= ell
        k += 1
    if k % 2 or kronecker(c, ell) != 1:
        return 0
    return 2 * ell ** (k // 2)


def primes_in_interval(lo: int, hi: int, segment: int = 1 << 20) -> List[int]:
    """Primes p with lo < p < hi, by segmented sieve of Eratosthenes."""
    if lo < 0 or hi < lo:
        raise ValueError(f"bad interval ({lo}, {hi})")
    start, stop = lo + 1, hi  # half-open [start, stop)
    if stop <= 2 or start >= stop:
        return []
    start = max(start, 2)
    root = math.isqrt(stop - 1)
    if root > 10**7:
        # base primes out of reach; the interval must be narrow
        return [x for x in range(start, stop) if is_prime(x)]
    base = _simple_sieve(root)
    out: List[int] = []
    for seg_lo in range(start, stop, segment):
        seg_hi = min(seg_lo + segment, stop)
        flags = np.ones(seg_hi - seg_lo, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= seg_hi:
                break
            first = max(q * q, -(-seg_lo // q) * q)
            flags[first - seg_lo :: q] = False
        out.extend((np.flatnonzero(flags) + seg_lo).tolist())
    return out


def lcm_many(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
