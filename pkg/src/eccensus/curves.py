"""Elliptic curves y^2 = x^3 + a x + b over F_p, p > 3, by brute force.

Weighted counts use the model-counting mass identity: for p > 3 an
F_p-isomorphism class E has exactly (p-1)/#Aut(E) short Weierstrass models,
so sum over classes of 1/#Aut(E) equals (number of models)/(p-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .arith import factorize, is_prime, kronecker, lcm_many

Point = Optional[Tuple[int, int]]  # None is the point at infinity
ShapeTable = Dict[Tuple[int, int], int]  # (order N, N1) -> number of models


@dataclass(frozen=True)
class GroupShape:
    """G = Z/N1 x Z/N1N2."""

    N1: int
    N2: int

    def __post_init__(self):
        if self.N1 < 1 or self.N2 < 1:
            raise ValueError(f"bad group shape ({self.N1}, {self.N2})")

    @property
    def order(self) -> int:
        return self.N1 * self.N1 * self.N2

    @property
    def exponent(self) -> int:
        return self.N1 * self.N2

    @classmethod
    def parse(cls, text: str) -> "GroupShape":
        """'N1xM' means Z/N1 x Z/M, so N2 = M / N1."""
        left, _, right = text.lower().partition("x")
        if not right:
            return cls(1, int(left))
        n1, m = int(left), int(right)
        if n1 < 1 or m % n1:
            raise ValueError(f"{text}: first factor must divide the second")
        return cls(n1, m // n1)

    def __str__(self) -> str:
        return f"{self.N1}x{self.exponent}"


def _check_p(p: int) -> None:
    if p <= 3 or not is_prime(p):
        raise ValueError(f"p must be a prime > 3, got {p}")


@dataclass(frozen=True)
class PrimeFieldCurve:
    p: int
    a: int
    b: int

    def __post_init__(self):
        _check_p(self.p)
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if (4 * self.a**3 + 27 * self.b**2) % self.p == 0:
            raise ValueError(f"singular curve {self}")

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def on_curve(self, P: Point) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - self.rhs(x)) % self.p == 0

    def add(self, P: Point, Q: Point) -> Point:
        if P is None:
            return Q
        if Q is None:
            return P
        p = self.p
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            lam = (3 * x1 * x1 + self.a) * pow(2 * y1, -1, p) % p
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (lam * lam - x1 - x2) % p
        return x3, (lam * (x1 - x3) - y1) % p

    def neg(self, P: Point) -> Point:
        return None if P is None else (P[0], -P[1] % self.p)

    def mul(self, k: int, P: Point) -> Point:
        if k < 0:
            return self.mul(-k, self.neg(P))
        R: Point = None
        while k:
            if k & 1:
                R = self.add(R, P)
            P = self.add(P, P)
            k >>= 1
        return R

    def points(self) -> Iterator[Point]:
        """Affine points in (x, then y) order, then infinity."""
        p = self.p
        for x in range(p):
            v = self.rhs(x)
            if v == 0:
                yield (x, 0)
            elif kronecker(v, p) == 1:
                r = _sqrt_mod(v, p)
                yield (x, min(r, p - r))
                yield (x, max(r, p - r))
        yield None


def _sqrt_mod(v: int, p: int) -> int:
    """Tonelli-Shanks square root of a quadratic residue v mod odd prime p."""
    v %= p
    if v == 0:
        return 0
    if p % 4 == 3:
        return pow(v, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while kronecker(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(v, q, p), pow(v, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def curve_order(c: PrimeFieldCurve) -> int:
    """#E(F_p) = p + 1 + sum over x of (x^3 + a x + b / p)."""
    p = c.p
    if p < 5000:
        chi = _legendre_table(p)
        return p + 1 + sum(chi[c.rhs(x)] for x in range(p))
    return p + 1 + sum(kronecker(c.rhs(x), p) for x in range(p))


def point_count_exhaustive(c: PrimeFieldCurve) -> int:
    """Oracle: count (x, y) pairs with y^2 = x^3 + a x + b, plus infinity."""
    p = c.p
    squares: Dict[int, int] = {}
    for y in range(p):
        squares[y * y % p] = squares.get(y * y % p, 0) + 1
    return 1 + sum(squares.get(c.rhs(x), 0) for x in range(p))


def order_from_multiple(c: PrimeFieldCurve, P: Point, M: int) -> int:
    """Exact order of P given that M * P = O."""
    order = M
    for q, _ in factorize(M):
        while order % q == 0 and c.mul(order // q, P) is None:
            order //= q
    return order


def bsgs_window_multiple(c: PrimeFieldCurve, P: Point) -> List[int]:
    """All M in the Hasse interval [p+1-2sqrt p, p+1+2sqrt p] with M P = O, by baby-step giant-step."""
    p = c.p
    lo = p + 1 - 2 * math.isqrt(p) - 2
    hi = p + 1 + 2 * math.isqrt(p) + 2
    width = hi - lo
    m = math.isqrt(width) + 1
    baby: Dict[Point, List[int]] = {}
    R: Point = None
    for j in range(m):
        baby.setdefault(R, []).append(j)
        R = c.add(R, P)
    # want lo*P + i*m*P - j*P = O  <=>  lo*P + i*m*P = j*P
    step = c.mul(m, P)
    Q = c.mul(lo, P)
    hits = []
    for i in range(m + 1):
        for j in baby.get(Q, ()):
            M = lo + i * m - j
            if lo <= M <= hi and (M - (p + 1)) ** 2 <= 4 * p:
                hits.append(M)
        Q = c.add(Q, step)
    return sorted(set(hits))


def curve_order_bsgs(c: PrimeFieldCurve, max_points: int = 64) -> int:
    """Independent order computation: intersect BSGS window multiples over several points."""
    candidates: Optional[set] = None
    for k, P in enumerate(c.points()):
        if P is None or k % 3:
            continue
        hits = set(bsgs_window_multiple(c, P))
        candidates = hits if candidates is None else candidates & hits
        if len(candidates) == 1 or k > 3 * max_points:
            break
    if not candidates or len(candidates) != 1:
        raise ArithmeticError(f"BSGS could not pin the order of {c}: {sorted(candidates or ())}")
    return candidates.pop()


def max_possible_n1(p: int, N: int) -> int:
    """Largest n with n^2 | N and n | p-1."""
    n = 1
    for q, e in factorize(N):
        k = min(e // 2, _val(p - 1, q))
        n *= q**k
    return n


def _val(n: int, q: int) -> int:
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def sylow_rank_split(c: PrimeFieldCurve, N: int, q: int) -> Tuple[int, int]:
    """(a, b) with a <= b such that the q-Sylow subgroup of E(F_p) is Z/q^a x Z/q^b.

    Points are projected into the Sylow subgroup in (x, y) order and the
    subgroup they generate is grown until it has the full size q^v.
    """
    v = _val(N, q)
    full = q**v
    cof = N // full
    H = {None}
    b = 0
    for P in c.points():
        if len(H) == full:
            break
        R = c.mul(cof, P)
        if R in H:
            continue
        k_order = order_from_multiple(c, R, full)
        b = max(b, _val(k_order, q))
        layer = set(H)
        S = R
        while S not in H:
            layer.update(c.add(h, S) for h in H)
            S = c.add(S, R)
        H = layer
    if len(H) != full:
        raise ArithmeticError(f"Sylow {q}-subgroup of {c} has {len(H)} != {full} elements")
    return v - b, b


def group_shape(c: PrimeFieldCurve, order: Optional[int] = None) -> GroupShape:
    """(N1, N2) with E(F_p) = Z/N1 x Z/N1N2.

    Only primes q with q^2 | N and q | p - 1 can divide N1; for those the
    Sylow q-subgroup is determined exactly from rational points.
    """
    N = curve_order(c) if order is None else order
    nmax = max_possible_n1(c.p, N)
    n1 = 1
    for q, _ in factorize(nmax):
        a, _ = sylow_rank_split(c, N, q)
        n1 *= q**a
    return GroupShape(n1, N // (n1 * n1))


def exponent_by_scan(c: PrimeFieldCurve, order: Optional[int] = None) -> int:
    """Oracle: lcm of the orders of all points."""
    N = curve_order(c) if order is None else order
    return lcm_many(order_from_multiple(c, P, N) for P in c.points())


def _legendre_table(p: int) -> List[int]:
    chi = [-1] * p
    chi[0] = 0
    for y in range(1, (p + 1) // 2):
        chi[y * y % p] = 1
    return chi


def shape_table(p: int) -> ShapeTable:
    """Number of models (a, b) in F_p^2 for every (order, N1), over all nonsingular curves.

    Each isomorphism class is handled once through its orbit
    {(u^4 a, u^6 b): u in F_p^*}, whose size is its number of models.
    """
    _check_p(p)
    chi = _legendre_table(p)
    cubes = [x * x * x % p for x in range(p)]
    # distinct (u^4, u^6) pairs generate the orbits
    scal = sorted({(pow(u, 4, p), pow(u, 6, p)) for u in range(1, p)})
    seen = bytearray(p * p)
    table: ShapeTable = {}
    for a in range(p):
        for b in range(p):
            if seen[a * p + b] or (4 * a * a * a + 27 * b * b) % p == 0:
                continue
            orbit = {(s4 * a % p, s6 * b % p) for s4, s6 in scal}
            for x, y in orbit:
                seen[x * p + y] = 1
            N = p + 1 + sum(chi[(cubes[x] + a * x + b) % p] for x in range(p))
            n1 = 1
            if max_possible_n1(p, N) > 1:
                n1 = group_shape(PrimeFieldCurve(p, a, b), N).N1
            table[(N, n1)] = table.get((N, n1), 0) + len(orbit)
    return table


def shape_table_naive(p: int) -> ShapeTable:
    """Oracle: classify every model separately, no orbit reduction."""
    _check_p(p)
    table: ShapeTable = {}
    for a in range(p):
        for b in range(p):
            if (4 * a**3 + 27 * b * b) % p == 0:
                continue
            c = PrimeFieldCurve(p, a, b)
            N = point_count_exhaustive(c)
            g = group_shape(c, N)
            table[(N, g.N1)] = table.get((N, g.N1), 0) + 1
    return table


def weighted_count_with_group(p: int, G: GroupShape, table: Optional[ShapeTable] = None) -> Fraction:
    """M_p(G): models with group G, divided by p - 1."""
    table = shape_table(p) if table is None else table
    return Fraction(table.get((G.order, G.N1), 0), p - 1)


def weighted_count_with_torsion(p: int, N: int, m: int, table: Optional[ShapeTable] = None) -> Fraction:
    """M_p(N; m): models of order N with full rational m-torsion (m | N1), divided by p - 1."""
    if N % (m * m):
        raise ValueError(f"m^2 = {m * m} does not divide N = {N}")
    table = shape_table(p) if table is None else table
    count = sum(k for (order, n1), k in table.items() if order == N and n1 % m == 0)
    return Fraction(count, p - 1)
