"""Counting b with D_N(b) = a f^2 modulo 4 n f^2, locally and globally.

Completing the square, D_N(z) = (z - (N+1))^2 - 4N, so at an odd prime
power the condition reads y^2 = a f^2 + 4N with y = z - (N+1), and z is a
unit exactly when y is not congruent to -(N+1) modulo the prime.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from .arith import factorize, kronecker, sqrt_count_mod_prime_power, valuation


def _check_odd(**kw: int) -> None:
    for name, v in kw.items():
        if v % 2 == 0:
            raise ValueError(f"{name} must be odd, got {v}")


def local_modulus_exponent(n: int, f: int, ell: int) -> int:
    """nu_ell(4 n f^2)."""
    return (2 if ell == 2 else 0) + valuation(n, ell) + 2 * valuation(f, ell)


# --- direct enumeration (oracles) ------------------------------------------


def d_histogram(N_mod: int, ell: int, e: int) -> np.ndarray:
    """hist[r] = #{z unit mod ell^e : D_N(z) = r mod ell^e}."""
    q = ell**e
    z = np.arange(q, dtype=np.int64)
    z = z[z % ell != 0]
    D = ((z + 1 - N_mod) % q) ** 2 % q - 4 * z % q
    return np.bincount(D % q, minlength=q)


_d_histogram = lru_cache(maxsize=64)(d_histogram)


def local_C_enum(N: int, a: int, n: int, f: int, ell: int) -> int:
    """#C_N^(ell)(a, n, f) by enumerating units z mod ell^(nu_ell(4nf^2))."""
    e = local_modulus_exponent(n, f, ell)
    if e == 0:
        return 1
    q = ell**e
    return int(_d_histogram(N % q, ell, e)[a * f * f % q])


def big_C_count_direct(N: int, a: int, n: int, f: int) -> int:
    """#{b in (Z/4nf^2)^x : D_N(b) = a f^2 mod 4nf^2} by scanning all b."""
    _check_odd(N=N, f=f)
    M = 4 * n * f * f
    b = np.arange(M, dtype=np.int64)
    b = b[np.gcd(b, M) == 1]
    Nm = N % M
    D = ((b + 1 - Nm) % M) ** 2 % M - 4 * b % M
    return int(np.count_nonzero(D % M == a * f * f % M))


# --- completed-square counting ---------------------------------------------


def local_C_count(N: int, a: int, n: int, f: int, ell: int) -> int:
    """#C_N^(ell)(a, n, f) without enumeration (ell = 2 uses a table mod 2^e)."""
    e = local_modulus_exponent(n, f, ell)
    if e == 0:
        return 1
    if ell == 2:
        return local_C_enum(N, a, n, f, 2)
    q = ell**e
    c = (a * f * f + 4 * N) % q
    roots = sqrt_count_mod_prime_power(c, ell, e)
    y0 = -(N + 1) % ell
    if y0 == 0:
        return roots if c % ell else 0
    if c % ell and (c - y0 * y0) % ell == 0:
        roots -= 1  # the root y = y0 mod ell gives z = 0 mod ell
    return roots


def big_C_count_fast(N: int, a: int, n: int, f: int) -> int:
    """Same count as big_C_count_direct via CRT over the prime powers of 4nf^2."""
    _check_odd(N=N, f=f)
    total = 1
    for ell, _ in factorize(4 * n * f * f):
        total *= local_C_count(N, a, n, f, ell)
        if total == 0:
            break
    return total


@lru_cache(maxsize=None)
def _legendre_vec(ell: int) -> np.ndarray:
    chi = -np.ones(ell, dtype=np.int64)
    chi[0] = 0
    chi[(np.arange(1, ell, dtype=np.int64) ** 2) % ell] = 1
    return chi


def local_counts_odd_vec(c: np.ndarray, ell: int, e: int, y0: int) -> np.ndarray:
    """Vectorised local_C_count: units z mod ell^e with (z + y0')^2 = c, y0 = -(N+1) mod ell."""
    q = ell**e
    c = c % q
    zero = c == 0
    k = np.zeros_like(c)
    u = np.where(zero, 1, c)
    div = u % ell == 0
    while div.any():
        u = np.where(div, u // ell, u)
        k += div
        div = u % ell == 0
    chi = _legendre_vec(ell)
    ok = (k % 2 == 0) & (chi[u % ell] == 1)
    roots = np.where(ok, 2 * ell ** (k // 2), 0)
    roots = np.where(zero, ell ** (e // 2), roots)
    unit_c = (~zero) & (k == 0)
    if y0 % ell == 0:
        return np.where(unit_c, roots, 0)
    return roots - (unit_c & ((c - y0 * y0) % ell == 0))


# --- the 2-adic part ----------------------------------------------------------


def s2_closed(n: int, a: int) -> int:
    """The three-branch S_2(n, a); needs a = 1 mod 4."""
    if a % 4 != 1:
        raise ValueError(f"a must be 1 mod 4, got {a}")
    if n % 2:
        return 2
    return 4 if a % 8 == 5 else 0


def kron2_power(a: int, k: int) -> int:
    """(a/2)^k for odd a."""
    if k == 0:
        return 1
    return -1 if (a % 8 in (3, 5) and k % 2) else 1


@lru_cache(maxsize=None)
def two_adic_sum(N_mod: int, nu: int) -> int:
    """Sum over a = 1 mod 4 mod 2^(2+nu) of (a/2)^nu #C^(2)(a, 2^nu, 1); depends on N mod 2^(2+nu)."""
    e = 2 + nu
    hist = _d_histogram(N_mod, 2, e)
    total = 0
    for a in range(1, 2**e, 4):
        total += kron2_power(a, nu) * int(hist[a])
    return total


# --- literal character sum c_{N,f}(n) ----------------------------------------


def c_char_sum(N: int, f: int, n: int) -> int:
    """Sum over a in (Z/4n)^x, a = 1 mod 4, of (a/n) S_2(n,a) prod_{ell | n odd} #C^(ell)(a,n,f), by enumeration."""
    _check_odd(N=N, f=f)
    tables = []
    for ell, _ in factorize(n):
        if ell != 2:
            e = local_modulus_exponent(n, f, ell)
            tables.append((ell**e, d_histogram(N % ell**e, ell, e)))
    total = 0
    for a in range(1, 4 * n, 4):
        if math.gcd(a, n) != 1:
            continue
        term = kronecker(a, n) * s2_closed(n, a)
        for q, hist in tables:
            if term == 0:
                break
            term *= int(hist[a * f * f % q])
        total += term
    return total


def s2_enumeration_report(nmax: int, N: int = 9, f: int = 1) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """(n, a mod 8) -> (2 S_2(n,a), #C^(2)(a,n,f) by enumeration) wherever the two differ."""
    diffs = {}
    for n in range(1, nmax + 1):
        for a in range(1, 4 * n, 4):
            stated = 2 * s2_closed(n, a)
            seen = local_C_enum(N, a, n, f, 2)
            if stated != seen:
                diffs.setdefault((n, a % 8), (stated, seen))
    return diffs
