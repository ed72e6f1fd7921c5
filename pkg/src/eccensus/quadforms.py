"""Class numbers of imaginary quadratic orders and the Kronecker class number H(D).

H here is the weighted sum of h(d)/w(d) over the orders containing the one of
discriminant D. This is half of the usual Hurwitz-Kronecker normalisation
(which weights by 2/w), and it is the normalisation that counts elliptic
curves with mass 1/#Aut(E).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.special import digamma

from .arith import kronecker_periodic

Form = Tuple[int, int, int]


@dataclass(frozen=True)
class ClassData:
    h: int
    w: int


def check_discriminant(d: int) -> int:
    if d > -3 or d % 4 not in (0, 1):
        raise ValueError(f"{d} is not a negative discriminant (need d <= -3, d = 0,1 mod 4)")
    return d


def unit_count(d: int) -> int:
    return {-3: 6, -4: 4}.get(d, 2)


def reduced_forms(d: int) -> List[Form]:
    """Primitive reduced forms (a, b, c) of discriminant d, enumerated by a then b."""
    check_discriminant(d)
    D = -d
    forms = []
    a = 1
    while 3 * a * a <= D:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b + D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_number_by_b(d: int) -> int:
    """Independent recount: loop over |b| first, then the divisors a of (b^2-d)/4."""
    check_discriminant(d)
    D = -d
    bound = math.isqrt(D // 3)
    h = 0
    for b in range(d % 2, bound + 1, 2):
        q = (b * b + D) // 4
        for a in range(max(b, 1), math.isqrt(q) + 1):
            if q % a:
                continue
            c = q // a
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            # (a, b, c) and (a, -b, c) are both reduced unless b = 0, b = a or a = c
            if b == 0 or b == a or a == c:
                h += 1
            else:
                h += 2
    return h


@lru_cache(maxsize=None)
def class_data(d: int) -> ClassData:
    return ClassData(h=len(reduced_forms(d)), w=unit_count(d))


@lru_cache(maxsize=None)
def kronecker_class_number(D: int) -> Fraction:
    """Sum of h(D/f^2)/w(D/f^2) over f with f^2 | D and D/f^2 = 0,1 mod 4."""
    check_discriminant(D)
    total = Fraction(0)
    f = 1
    while f * f <= -D:
        if D % (f * f) == 0:
            d = D // (f * f)
            if d % 4 in (0, 1) and d <= -3:
                cd = class_data(d)
                total += Fraction(cd.h, cd.w)
        f += 1
    return total


def dirichlet_L1(d: int, U: int) -> float:
    """Partial sum of (d/n)/n over 1 <= n <= U.

    n -> (d/n) is periodic mod |d| for a discriminant d, so the sum is grouped
    by residue class; each class is a shifted harmonic sum, evaluated with the
    digamma function. Small U is summed term by term.
    """
    if U < 1:
        raise ValueError("U must be positive")
    q = abs(d)
    if U <= 4 * q:
        chi = kronecker_periodic(d, q + 1)
        n = np.arange(1, U + 1)
        return float(np.sum(chi[((n - 1) % q) + 1] / n))
    chi = kronecker_periodic(d, q + 1)[1:]  # residues r = 1..q
    r = np.arange(1, q + 1, dtype=np.float64)
    terms = (U - np.arange(1, q + 1)) // q  # last k with r + k q <= U
    s = (digamma(r / q + terms + 1) - digamma(r / q)) / q
    return float(np.dot(chi.astype(np.float64), s))


def class_number_formula_residual(d: int, U: int) -> float:
    """|2 pi h(d) / (w(d) sqrt|d|) - L_U(1, chi_d)|."""
    cd = class_data(d)
    exact = 2 * math.pi * cd.h / (cd.w * math.sqrt(-d))
    return abs(exact - dirichlet_L1(d, U))


def class_table(dmin: int) -> List[Tuple[int, int, int, Fraction]]:
    """(d, h, w, H) rows for all discriminants dmin <= d <= -3, descending from -3."""
    rows = []
    for d in range(-3, dmin - 1, -1):
        if d % 4 in (0, 1):
            cd = class_data(d)
            rows.append((d, cd.h, cd.w, kronecker_class_number(d)))
    return rows
