"""Hasse-window sweeps, the global censuses M(G) and M(N; m), and prime statistics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .arith import divisors, euler_phi, moebius, primes_in_interval, sqrt_count_mod_prime_power, factorize
from .curves import GroupShape, weighted_count_with_group, weighted_count_with_torsion
from .quadforms import kronecker_class_number
from .store import ShapeStore, default_store

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HasseWindow:
    """Primes p with (sqrt N - 1)^2 < p < (sqrt N + 1)^2.

    lo and hi are integers with the same prime content as the real open
    interval: lo = floor((sqrt N - 1)^2), hi = ceil((sqrt N + 1)^2).
    """

    N: int
    lo: int
    hi: int

    def contains(self, p: int) -> bool:
        return (p + 1 - self.N) ** 2 < 4 * p

    def all_primes(self) -> List[int]:
        return [p for p in primes_in_interval(self.lo, self.hi) if self.contains(p)]

    def primes(self) -> List[int]:
        """Window primes usable for a census (p > 3); smaller ones are logged and dropped."""
        ps = self.all_primes()
        small = [p for p in ps if p <= 3]
        if small:
            log.warning("N=%d: window primes %s <= 3 excluded from census", self.N, small)
        return [p for p in ps if p > 3]


def _ceil_sqrt(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1


def hasse_window(N: int) -> HasseWindow:
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    s = _ceil_sqrt(4 * N)  # ceil(2 sqrt N)
    return HasseWindow(N, max(N + 1 - s, 0), N + 1 + s)


def discriminant_poly(N: int, p: int) -> int:
    return (p + 1 - N) ** 2 - 4 * p


def d_reduced(N: int, p: int, f: int) -> int:
    D = discriminant_poly(N, p)
    if D % (f * f):
        raise ValueError(f"f^2 = {f * f} does not divide D_{N}({p}) = {D}")
    return D // (f * f)


@dataclass(frozen=True)
class CensusRecord:
    N: int
    N1: int
    N2: int
    m: int
    p: Optional[int]
    weighted: Fraction
    class_value: Fraction

    @property
    def match(self) -> bool:
        return self.weighted == self.class_value


def _check_odd_torsion(N: int, m: int) -> None:
    if N % 2 == 0 or m % 2 == 0:
        raise ValueError(f"N and m must be odd (N={N}, m={m})")
    if m < 1 or N % (m * m):
        raise ValueError(f"m^2 must divide N (N={N}, m={m})")


def class_side(N: int, m: int, p: int) -> Fraction:
    """H(D_N(p)/m^2) when m | p - 1, else 0."""
    if (p - 1) % m:
        return Fraction(0)
    return kronecker_class_number(d_reduced(N, p, m))


def remark_precondition_holds(N: int, m: int, p: int) -> bool:
    """m | p - 1 and m^2 | N force m^2 | D_N(p)."""
    if (p - 1) % m or N % (m * m):
        return True
    return discriminant_poly(N, p) % (m * m) == 0


def schoof_identity_check(N: int, m: int, store: Optional[ShapeStore] = None) -> List[CensusRecord]:
    """Curve-sweep M_p(N; m) against the class-number side for every window prime."""
    _check_odd_torsion(N, m)
    store = store or default_store()
    primes = hasse_window(N).primes()
    store.prefetch(primes)
    out = []
    for p in primes:
        brute = weighted_count_with_torsion(p, N, m, store.get(p))
        out.append(CensusRecord(N, m, N // (m * m), m, p, brute, class_side(N, m, p)))
    return out


def census_by_prime(G: GroupShape, store: Optional[ShapeStore] = None) -> Dict[int, Fraction]:
    store = store or default_store()
    primes = hasse_window(G.order).primes()
    store.prefetch(primes)
    return {p: weighted_count_with_group(p, G, store.get(p)) for p in primes}


def global_census_M_of_G(G: GroupShape, store: Optional[ShapeStore] = None) -> Fraction:
    """M(G) summed over window primes by curve sweeps."""
    return sum(census_by_prime(G, store).values(), Fraction(0))


def class_route_by_prime(N: int, m: int) -> Dict[int, Fraction]:
    _check_odd_torsion(N, m)
    return {p: class_side(N, m, p) for p in hasse_window(N).primes()}


def global_census_M_of_N_m(N: int, m: int) -> Fraction:
    """M(N; m) through class numbers only, no curves."""
    return sum(class_route_by_prime(N, m).values(), Fraction(0))


def square_divisors(n: int) -> List[int]:
    """k >= 1 with k^2 | n."""
    return [k for k in divisors(n) if n % (k * k) == 0] if n > 0 else []


@dataclass
class InclusionExclusionReport:
    G: GroupShape
    curve_side: Fraction
    class_side: Fraction
    terms: Dict[int, Fraction] = field(default_factory=dict)  # k -> mu(k) M(N; k N1)
    per_prime: Dict[int, Tuple[Fraction, Fraction]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.curve_side == self.class_side


def inclusion_exclusion_check(G: GroupShape, store: Optional[ShapeStore] = None) -> Tuple[bool, InclusionExclusionReport]:
    if G.order % 2 == 0:
        raise ValueError(f"#G must be odd, got {G.order}")
    N = G.order
    curve = census_by_prime(G, store)
    per_class: Dict[int, Fraction] = {p: Fraction(0) for p in curve}
    terms = {}
    for k in square_divisors(G.N2):
        mu = moebius(k)
        if mu == 0:
            continue
        route = class_route_by_prime(N, k * G.N1)
        terms[k] = mu * sum(route.values(), Fraction(0))
        for p, v in route.items():
            per_class[p] += mu * v
    rep = InclusionExclusionReport(
        G,
        sum(curve.values(), Fraction(0)),
        sum(terms.values(), Fraction(0)),
        terms,
        {p: (curve[p], per_class[p]) for p in curve},
    )
    return rep.ok, rep


def odd_group_shapes(max_order: int) -> List[GroupShape]:
    """All (N1, N2) with N1^2 N2 odd and at most max_order."""
    out = []
    n1 = 1
    while n1 * n1 <= max_order:
        if n1 % 2:
            for n2 in range(1, max_order // (n1 * n1) + 1, 2):
                out.append(GroupShape(n1, n2))
        n1 += 1
    return sorted(out, key=lambda g: (g.order, g.N1))


# --- short-interval prime statistics ---------------------------------------


def interval_primes(X: float, Y: float) -> List[int]:
    """Primes p with X < p < X + Y."""
    lo, hi = math.floor(X), math.ceil(X + Y)
    return [p for p in primes_in_interval(max(lo, 0), hi) if X < p < X + Y]


def theta_and_discrepancy(X: float, Y: float, q: int, a: int, primes: Optional[List[int]] = None) -> Tuple[float, float]:
    """theta = sum of log p over X < p < X+Y with p = a mod q; E = theta - Y/phi(q)."""
    if not (0 < Y <= X) or q < 1:
        raise ValueError(f"need 0 < Y <= X and q >= 1 (X={X}, Y={Y}, q={q})")
    ps = interval_primes(X, Y) if primes is None else primes
    theta = math.fsum(math.log(p) for p in ps if (p - a) % q == 0)
    return theta, theta - Y / euler_phi(q)


@dataclass
class ThetaReconciliation:
    X: float
    Y: float
    q: int
    class_primes: List[int]
    expected_primes: List[int]
    class_sum: float
    expected_sum: float

    @property
    def ok(self) -> bool:
        return self.class_primes == self.expected_primes and self.class_sum == self.expected_sum


def theta_partition_check(X: float, Y: float, q: int) -> ThetaReconciliation:
    """Union over units a mod q of the theta classes versus all primes not dividing q."""
    ps = interval_primes(X, Y)
    collected: List[int] = []
    for a in range(q):
        if math.gcd(a, q) == 1:
            collected.extend(p for p in ps if p % q == a)
    collected.sort()
    expected = [p for p in ps if q % p != 0]
    # fsum is correctly rounded, so equal multisets give bit-equal sums
    return ThetaReconciliation(
        X, Y, q, collected, expected,
        math.fsum(math.log(p) for p in collected),
        math.fsum(math.log(p) for p in expected),
    )


@dataclass
class BDHReport:
    X: float
    Y: float
    Q: int
    variance: float
    comparator: float  # Y Q log X

    @property
    def ratio(self) -> float:
        return self.variance / self.comparator


def bdh_variance_sum(X: float, Y: float, Q: int) -> BDHReport:
    """Sum over q <= Q and units a mod q of E(X, Y; q, a)^2."""
    if not (1 <= Q <= Y <= X):
        raise ValueError(f"need 1 <= Q <= Y <= X (X={X}, Y={Y}, Q={Q})")
    ps = np.array(interval_primes(X, Y), dtype=np.int64)
    logs = np.log(ps.astype(np.float64))
    terms = []
    for q in range(1, Q + 1):
        theta = np.bincount(ps % q, weights=logs, minlength=q) if len(ps) else np.zeros(q)
        units = np.array([math.gcd(a, q) == 1 for a in range(q)])
        E = theta[units] - Y / euler_phi(q)
        terms.append(float(np.dot(E, E)))
    return BDHReport(X, Y, Q, math.fsum(terms), Y * Q * math.log(X))


def delta_root_count(N: int, u: int, v: int) -> int:
    """#{l mod v : (l - N/u)^2 - 4N/u^2 = 0 mod v}, by CRT over prime powers of v."""
    if u < 1 or N % (u * u):
        raise ValueError(f"u^2 must divide N (N={N}, u={u})")
    if v < 1:
        raise ValueError("v must be positive")
    # shifting l by N/u leaves the count unchanged: count square roots of 4N/u^2
    B = 4 * N // (u * u)
    count = 1
    for ell, e in factorize(v):
        count *= sqrt_count_mod_prime_power(B, ell, e)
    return count


def delta_root_count_scan(N: int, u: int, v: int) -> int:
    """Oracle: direct scan over l mod v."""
    A, B = N // u, 4 * N // (u * u)
    l = np.arange(v, dtype=np.int64)
    return int(np.count_nonzero(((l - A) ** 2 - B) % v == 0))


@dataclass
class MainTheoremRow:
    G: GroupShape
    M: Fraction
    prediction: float
    ratio: float


def main_theorem_report(G: GroupShape, L: int = 10**4, store: Optional[ShapeStore] = None) -> Optional[MainTheoremRow]:
    """M(G) beside K(G) (#G)^2 / (#Aut(G) log #G); None for the trivial group."""
    from .constants import K_of_G, aut_ratio

    if G.order == 1:
        return None
    if G.order % 2 == 0:
        raise ValueError(f"#G must be odd, got {G.order}")
    M = global_census_M_of_G(G, store)
    kg = K_of_G(G, "erratum", L)
    n_aut = Fraction(G.order) / aut_ratio(G)
    pred = kg.value * G.order**2 / (float(n_aut) * math.log(G.order))
    return MainTheoremRow(G, M, pred, float(M) / pred if pred else math.nan)
