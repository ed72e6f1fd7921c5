"""The constants K(N), K(N,m), K(G), K_0(N,m), their local factors, and related oracles.

Formulas come in two variants: "erratum" (the corrected ones, used for every
acceptance identity) and "original" (kept for differential reports).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .arith import (
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    moebius,
    prime_factors,
    primes_in_interval,
    valuation,
    ell_free_part,
)
from .congruence import (
    _legendre_vec,
    big_C_count_direct,
    big_C_count_fast,
    c_char_sum,
    local_C_count,
    local_counts_odd_vec,
    two_adic_sum,
)
from .curves import GroupShape

log = logging.getLogger(__name__)

VARIANTS = ("original", "erratum")
KINDS = ("F0", "F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "Klocal")
C_NORMALIZATION = 2  # c_{N,f}(1) as literally defined; see c_normalization()


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def _check_odd_prime(ell: int) -> None:
    if ell == 2 or not is_prime(ell):
        raise ValueError(f"{ell} is not an odd prime")


@dataclass(frozen=True)
class TruncationParams:
    U: int
    V: int
    L: int = 10**4

    def __post_init__(self):
        if self.U < 1 or self.V < 1 or self.L < 3:
            raise ValueError(f"bad truncation {self}")


@dataclass(frozen=True)
class EulerValue:
    """Exact finite part times a float product over ell not dividing N, ell <= L."""

    finite: Fraction
    tail: float
    L: int
    tail_bound: float  # relative error bound for the omitted ell > L

    @property
    def value(self) -> float:
        return float(self.finite) * self.tail


def big_C_count(N: int, a: int, n: int, f: int) -> int:
    """#{b in (Z/4nf^2)^x : D_N(b) = a f^2 mod 4nf^2}.

    a may be any integer; only a mod 4n matters.
    """
    if N % 2 == 0 or f % 2 == 0:
        raise ValueError(f"N and f must be odd (N={N}, f={f})")
    if n < 1:
        raise ValueError("n must be positive")
    return big_C_count_fast(N, a, n, f)


def local_C_closed(N: int, ell: int, alpha: int) -> int:
    """#C_N^(ell)(1, 1, ell^alpha) by the four-branch closed form."""
    _check_odd_prime(ell)
    if N % 2 == 0 or alpha < 1:
        raise ValueError(f"need odd N and alpha >= 1 (N={N}, alpha={alpha})")
    nu = valuation(N, ell)
    if nu == 0:
        return 1 + kronecker(N * (N - 1) ** 2, ell)
    if nu < 2 * alpha and nu % 2 == 0 and kronecker(ell_free_part(N, ell), ell) == 1:
        return 2 * ell ** (nu // 2)
    if 2 * alpha <= nu:
        return ell**alpha
    return 0


def C_of_f(N: int, f: int, ell: int) -> int:
    """#C_N^(ell)(1, 1, f), which only sees ell^nu_ell(f)."""
    j = valuation(f, ell)
    return local_C_closed(N, ell, j) if j else 1


# --- c_{N,f}(ell^alpha) -------------------------------------------------------


def c_bracket(N: int, f: int, ell: int, alpha: int, variant: str = "erratum") -> Tuple[bool, Fraction]:
    """(has_C, B) with c_{N,f}(ell^alpha)/ell^(alpha-1) = B, times #C^(ell)(1,1,f) when has_C."""
    check_variant(variant)
    if N % 2 == 0 or f % 2 == 0:
        raise ValueError(f"N and f must be odd (N={N}, f={f})")
    if alpha < 1:
        raise ValueError("alpha must be positive")
    if ell == 2:
        return False, Fraction(2 * (-1) ** alpha)
    _check_odd_prime(ell)
    even = alpha % 2 == 0
    nu, j = valuation(N, ell), valuation(f, ell)
    if j and not nu:
        return True, Fraction(ell - 1 if even else 0)
    if nu and not j:
        return False, Fraction(ell - 2)
    if not nu and not j:
        s = kronecker(N - 1, ell) ** 2
        if even:
            return False, Fraction(ell - 1 - kronecker(N, ell) - s)
        return False, Fraction(-1 - s)
    if 2 * j < nu:
        return True, Fraction(ell - 1)
    if nu < 2 * j:
        return True, Fraction(ell - 1 if even else 0)
    Nl = ell_free_part(N, ell)
    chi, chi_neg = kronecker(Nl, ell), kronecker(-Nl, ell)
    if variant == "erratum":
        return True, Fraction(ell - 1 - chi if even else -1)
    return True, Fraction(ell - 1 - chi + chi_neg if even else chi_neg - 1)


def c_closed_prime_power(N: int, f: int, ell: int, alpha: int, variant: str = "erratum") -> Fraction:
    """c_{N,f}(ell^alpha)/ell^(alpha-1) by the case analysis for the chosen variant."""
    has_C, b = c_bracket(N, f, ell, alpha, variant)
    return b * C_of_f(N, f, ell) if has_C else b


def c_normalization(pairs: Iterable[Tuple[int, int]]) -> int:
    """The literal c_{N,f}(1) over the given (N, f); raises unless it is one constant."""
    values = {c_char_sum(N, f, 1) for N, f in pairs}
    if len(values) != 1:
        raise ArithmeticError(f"c_{{N,f}}(1) is not constant: {sorted(values)}")
    return values.pop()


def c_brute_ratio(N: int, f: int, ell: int, alpha: int, norm: int = C_NORMALIZATION) -> Fraction:
    """c_char_sum(N, f, ell^alpha) / (ell^(alpha-1) norm)."""
    return Fraction(c_char_sum(N, f, ell**alpha), ell ** (alpha - 1) * norm)


def is_erratum_case(N: int, f: int, ell: int) -> bool:
    return N % ell == 0 and f % ell == 0 and valuation(N, ell) == 2 * valuation(f, ell)


# --- local factors ----------------------------------------------------------------


def _F0(ell: int) -> Fraction:
    return 1 + Fraction(ell - 2, (ell - 1) ** 2)


def _F1(ell: int, N: int) -> Fraction:
    s = kronecker(N - 1, ell) ** 2
    return 1 - Fraction(s * ell + kronecker(N, ell) + s + 1, (ell - 1) * (ell * ell - 1))


def f_factor(kind: str, ell: int, N: int, m_or_f: Optional[int] = None, variant: str = "erratum") -> Fraction:
    """One local factor. F2 takes f; F5 and Klocal take m; the rest ignore m_or_f."""
    check_variant(variant)
    _check_odd_prime(ell)
    if kind not in KINDS:
        raise ValueError(f"unknown factor kind {kind!r}")
    if N % 2 == 0:
        raise ValueError(f"N must be odd, got {N}")
    nu = valuation(N, ell)
    Nl = ell_free_part(N, ell)
    chi_neg = kronecker(-Nl, ell)

    if kind == "F0":
        return _F0(ell)
    if kind in ("F1", "F3"):
        if nu:
            raise ValueError(f"{kind} needs ell not dividing N")
        F1 = _F1(ell, N)
        if kind == "F1":
            return F1
        return 1 + Fraction(1 + kronecker(N * (N - 1) ** 2, ell), 1) / (F1 * (ell + 1) * (ell - 1) ** 2)
    if kind == "F2":
        f = m_or_f
        if f is None or f % ell:
            raise ValueError("F2 needs f divisible by ell")
        j = valuation(f, ell)
        if nu < 2 * j:
            return 1 + Fraction(1, ell * (ell + 1))
        if nu > 2 * j:
            return 1 + Fraction(1, ell)
        chi = kronecker(Nl, ell)
        if variant == "erratum":
            return 1 - Fraction(chi + 1, ell * (ell * ell - 1))
        return 1 + Fraction(chi_neg * ell + chi_neg - chi - 1, ell * (ell * ell - 1))
    if not nu:
        raise ValueError(f"{kind} needs ell dividing N")
    F0 = _F0(ell)
    if kind == "F4":
        extra = chi_neg if (variant == "original" and nu % 2 == 0) else 0
        return 1 + Fraction(ell**nu - ell + extra, 1) / (F0 * ell**nu * (ell - 1) ** 2)
    if kind in ("F5", "Klocal"):
        m = m_or_f
        if m is None or m % ell or N % (m * m):
            raise ValueError(f"{kind} needs ell | m and m^2 | N")
        mu = valuation(m, ell)
        if kind == "Klocal":
            if variant == "erratum" or nu % 2:
                return Fraction(ell ** (nu + 1) - ell ** (2 * mu), ell ** (nu + 1) - ell**nu - 1)
            return Fraction(
                ell ** (nu + 2) - ell ** (2 * mu + 1) + chi_neg * ell ** (2 * mu),
                ell ** (nu + 2) - ell ** (nu + 1) - ell + chi_neg,
            )
        if variant == "erratum":
            return Fraction(ell ** (nu + 1) - ell ** (2 * mu), 1) / (F0 * ell ** (nu + 2 * mu - 1) * (ell - 1) ** 2)
        if nu % 2:
            inner = Fraction(ell * (ell**nu - ell ** (2 * mu)), ell**nu * (ell - 1) ** 2)
        else:
            inner = Fraction(
                ell ** (nu + 2) - ell ** (2 * mu + 1) + chi_neg * ell ** (2 * mu),
                ell**nu * (ell - 1) ** 2,
            )
        return inner / (F0 * ell ** (2 * mu))
    if kind == "F6":
        if variant == "erratum":
            return 1 - Fraction(1, ell * ell)
        return 1 + Fraction((chi_neg - 1) * ell + chi_neg, ell**3)
    if kind == "F7":
        return 1 - Fraction(1, ell * ell)
    return 1 - Fraction(1, ell * (ell - 1))  # F8


@dataclass
class EulerFactorTable:
    kind: str
    variant: str
    N: int
    m_or_f: Optional[int]
    factors: Dict[int, Fraction] = field(default_factory=dict)
    tail: str = ""

    def rows(self) -> List[Tuple[int, str, str, int, int]]:
        return [(ell, self.kind, self.variant, v.numerator, v.denominator) for ell, v in sorted(self.factors.items())]


def euler_factor_table(kind: str, N: int, m_or_f: Optional[int], variant: str, ells: Sequence[int]) -> EulerFactorTable:
    """Evaluate one kind of factor at each listed prime; primes failing the kind's precondition are skipped."""
    t = EulerFactorTable(kind, variant, N, m_or_f, tail=f"ell > {max(ells, default=0)} not tabulated")
    for ell in ells:
        try:
            t.factors[ell] = f_factor(kind, ell, N, m_or_f, variant)
        except ValueError:
            continue
    return t


# --- local n-series ------------------------------------------------------------


def local_n_series(N: int, f: int, ell: int, variant: str = "erratum") -> Fraction:
    """Exact value of the ell-part of the n-sum, 1 + sum over alpha >= 1 of its weighted c values."""
    _check_odd_prime(ell)
    r = Fraction(1, ell)
    odd_sum = r / (1 - r * r)  # sum of r^alpha over odd alpha
    even_sum = r * r / (1 - r * r)
    _, g_odd = c_bracket(N, f, ell, 1, variant)
    _, g_even = c_bracket(N, f, ell, 2, variant)
    if f % ell:
        # weight c(ell^a) / (ell^a phi(ell^a)) = g / (ell^a (ell - 1))
        weight = Fraction(1, ell - 1)
    else:
        # extra phi((n,f))/(n,f) = (ell - 1)/ell, and #C^(ell)(1,1,f) cancels
        weight = Fraction(1, ell)
    return 1 + weight * (g_odd * odd_sum + g_even * even_sum)


def stated_n_factor(N: int, f: int, ell: int, variant: str = "erratum") -> Fraction:
    if f % ell == 0:
        return f_factor("F2", ell, N, f, variant)
    if N % ell == 0:
        return f_factor("F0", ell, N, None, variant)
    return f_factor("F1", ell, N, None, variant)


def local_n_sum_check(N: int, f: int, ell: int, variant: str = "erratum") -> bool:
    if N % 2 == 0 or f % 2 == 0:
        raise ValueError(f"N and f must be odd (N={N}, f={f})")
    return local_n_series(N, f, ell, variant) == stated_n_factor(N, f, ell, variant)


# --- K(N), K(N, m), K(G), K_0 ------------------------------------------------------


def _tail_bound(L: int) -> float:
    # factors for ell > L lie in [1 - 1/(ell-1)^2, 1]; -log(1-x) <= 2x and sum_{n>L} 1/(n-1)^2 <= 1/(L-1)
    return 2.0 / (L - 1)


def coprime_tail(N: int, L: int) -> Tuple[float, float]:
    """prod over primes ell <= L not dividing N of 1 - (((N-1)/ell)^2 ell + 1)/((ell+1)(ell-1)^2)."""
    if L < 3:
        raise ValueError("L must be at least 3")
    ells = np.array(primes_in_interval(1, L + 1), dtype=np.int64)
    ells = ells[N % ells != 0]
    s = ((N - 1) % ells != 0).astype(np.float64)
    lf = ells.astype(np.float64)
    logs = np.log1p(-(s * lf + 1) / ((lf + 1) * (lf - 1) ** 2))
    bound = _tail_bound(L)
    log.info("ell > %d omitted from the coprime product; relative error <= %.3g", L, bound)
    return float(np.exp(math.fsum(logs.tolist()))), bound


def coprime_factor(N: int, ell: int) -> Fraction:
    """The ell-not-dividing-N factor shared by K(N) and K(G)."""
    s = kronecker(N - 1, ell) ** 2
    return 1 - Fraction(s * ell + 1, (ell + 1) * (ell - 1) ** 2)


def K_N_local(N: int, ell: int, variant: str = "erratum") -> Fraction:
    nu = valuation(N, ell)
    if nu == 0:
        return coprime_factor(N, ell)
    if variant == "erratum" or nu % 2:
        return 1 - Fraction(1, ell**nu * (ell - 1))
    chi_neg = kronecker(-ell_free_part(N, ell), ell)
    return 1 - Fraction(ell - chi_neg, ell ** (nu + 1) * (ell - 1))


def K_of_N(N: int, variant: str = "erratum", L: int = 10**4) -> EulerValue:
    check_variant(variant)
    if N < 3 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 3, got {N}")
    finite = Fraction(1)
    for ell in prime_factors(N):
        finite *= K_N_local(N, ell, variant)
    tail, bound = coprime_tail(N, L)
    return EulerValue(finite, tail, L, bound)


def _check_m(N: int, m: int) -> None:
    if N % 2 == 0 or m % 2 == 0 or m < 1 or N % (m * m):
        raise ValueError(f"need N, m odd with m^2 | N (N={N}, m={m})")


def K_of_N_m(N: int, m: int, variant: str = "erratum") -> Fraction:
    check_variant(variant)
    _check_m(N, m)
    out = Fraction(1)
    for ell in prime_factors(m):
        out *= f_factor("Klocal", ell, N, m, variant)
    return out


def K_G_finite(G: GroupShape, variant: str = "erratum") -> Fraction:
    check_variant(variant)
    N1, N2 = G.N1, G.N2
    out = Fraction(1)
    if variant == "erratum":
        for ell in prime_factors(N1):
            out *= 1 - Fraction(1, ell * ell)
        for ell in prime_factors(N2):
            if N1 % ell:
                out *= 1 - Fraction(1, ell * (ell - 1))
        return out
    for ell in prime_factors(G.order):
        out *= 1 - Fraction(1, ell * (ell - 1))
    for ell in prime_factors(N1):
        out *= 1 + Fraction(1, ell * (ell * ell - ell - 1))
        if N2 % ell:
            out *= 1 + Fraction(kronecker(-N2, ell), ell * (ell - 1))
    return out


def K_of_G(G: GroupShape, variant: str = "erratum", L: int = 10**4) -> EulerValue:
    if G.order % 2 == 0:
        raise ValueError(f"#G must be odd, got {G.order}")
    tail, bound = coprime_tail(G.order, L)
    return EulerValue(K_G_finite(G, variant), tail, L, bound)


def K0_euler(N: int, m: int, variant: str = "erratum", L: int = 10**4) -> EulerValue:
    _check_m(N, m)
    kn = K_of_N(N, variant, L)
    finite = Fraction(N, euler_phi(N) * m * m) * kn.finite * K_of_N_m(N, m, variant)
    return EulerValue(finite, kn.tail, L, kn.tail_bound)


def K0_from_F_factors(N: int, m: int, variant: str = "erratum") -> Fraction:
    """prod over ell | N of F0 times F5 (ell | m) or F4 (ell not dividing m).

    This should equal the finite part of K0_euler.
    """
    _check_m(N, m)
    out = Fraction(1)
    for ell in prime_factors(N):
        out *= f_factor("F0", ell, N, None, variant)
        out *= f_factor("F5", ell, N, m, variant) if m % ell == 0 else f_factor("F4", ell, N, None, variant)
    return out


def kG_assembly_sides(G: GroupShape, variant: str = "erratum") -> Tuple[Fraction, Fraction]:
    """(sum over k^2 | N2 of mu(k) finite K_0(N, k N1), finite K(G) * #G/#Aut(G)); the coprime tails cancel."""
    N = G.order
    lhs = Fraction(0)
    for k in _square_divisors(G.N2):
        mu = moebius(k)
        if mu:
            m = k * G.N1
            lhs += mu * Fraction(N, euler_phi(N) * m * m) * _K_N_finite(N, variant) * K_of_N_m(N, m, variant)
    return lhs, K_G_finite(G, variant) * aut_ratio(G)


def kG_assembly_check(G: GroupShape, variant: str = "erratum") -> bool:
    if G.order % 2 == 0:
        raise ValueError(f"#G must be odd, got {G.order}")
    lhs, rhs = kG_assembly_sides(G, variant)
    return lhs == rhs


def _K_N_finite(N: int, variant: str) -> Fraction:
    out = Fraction(1)
    for ell in prime_factors(N):
        out *= K_N_local(N, ell, variant)
    return out


def _square_divisors(n: int) -> List[int]:
    """k >= 1 with k^2 | n."""
    out = [1]
    for q, e in factorize(n):
        out = [d * q**k for d in out for k in range(e // 2 + 1)]
    return sorted(out)


# --- K_0 by truncated summation -------------------------------------------------


def K0_truncated(N: int, m: int, U: int, V: int, checkpoints: Optional[Sequence[int]] = None):
    """The literal triple sum over f <= mV (odd multiples of m) and n <= U, exactly.

    With checkpoints, returns {U_i: partial sum over n <= U_i} for each U_i <= U
    (U itself is always included); otherwise returns the single Fraction.
    """
    _check_m(N, m)
    if U < 1 or V < 1:
        raise ValueError("U and V must be positive")
    marks = sorted({u for u in (checkpoints or ()) if 1 <= u <= U} | {U})
    fs = list(range(m, m * V + 1, 2 * m))
    f_fac = {f: dict(factorize(f)) for f in fs}

    b_memo: Dict[Tuple[int, int, int], int] = {}

    def b_sum(ell: int, k: int, j: int) -> int:
        # sum over a mod ell^k of (a/ell)^k #C^(ell)(a, ell^k, ell^j); the unit part of f drops out
        key = (ell, k, j)
        if key not in b_memo:
            a = np.arange(ell**k, dtype=np.int64)
            chi = _legendre_vec(ell)[a % ell] ** k
            e = k + 2 * j
            q = ell**e
            c = (a * ell ** (2 * j) + 4 * N) % q
            counts = local_counts_odd_vec(c, ell, e, -(N + 1))
            b_memo[key] = int(np.dot(chi, counts))
        return b_memo[key]

    def c_f(ell: int, j: int) -> int:
        key = (ell, 0, -j)
        if key not in b_memo:
            b_memo[key] = local_C_count(N, 1, 1, ell**j, ell)
        return b_memo[key]

    nums: List[Tuple[int, int, int]] = []  # (n, numerator, denominator)
    for n in range(1, U + 1):
        nfac = factorize(n)
        nu2 = 0
        odd_part = []
        for ell, k in nfac:
            if ell == 2:
                nu2 = k
            else:
                odd_part.append((ell, k))
        a2 = two_adic_sum(N % 2 ** (2 + nu2), nu2)
        if a2 == 0:
            continue
        for f in fs:
            ff = f_fac[f]
            inner = a2
            for ell, k in odd_part:
                inner *= b_sum(ell, k, ff.get(ell, 0))
                if inner == 0:
                    break
            if inner == 0:
                continue
            nset = {ell for ell, _ in odd_part}
            for ell, j in ff.items():
                if ell not in nset:
                    inner *= c_f(ell, j)
            if inner == 0:
                continue
            nums.append((n, inner, f * n * euler_phi(4 * n * f * f)))

    if not nums:
        zero = Fraction(0)
        return {u: zero for u in marks} if checkpoints is not None else zero
    D = math.lcm(*{d for _, _, d in nums})
    out: Dict[int, Fraction] = {}
    acc = 0
    idx = 0
    for u in marks:
        while idx < len(nums) and nums[idx][0] <= u:
            _, num, den = nums[idx]
            acc += num * (D // den)
            idx += 1
        out[u] = Fraction(acc, D)
    return out if checkpoints is not None else out[U]


def K0_truncated_literal(N: int, m: int, U: int, V: int) -> Fraction:
    """Oracle for small U, V: every a and every count by direct enumeration."""
    _check_m(N, m)
    total = Fraction(0)
    for f in range(m, m * V + 1, 2 * m):
        for n in range(1, U + 1):
            s = 0
            for a in range(1, 4 * n + 1, 4):
                chi = kronecker(a, n)
                if chi:
                    s += chi * big_C_count_direct(N, a, n, f)
            if s:
                total += Fraction(s, f * n * euler_phi(4 * n * f * f))
    return total


# --- automorphisms -------------------------------------------------------------------


def aut_ratio(G: GroupShape) -> Fraction:
    """#G / #Aut(G)."""
    N, N1, N2 = G.order, G.N1, G.N2
    out = Fraction(N, euler_phi(N) * N1 * N1)
    for ell in prime_factors(N1):
        if N2 % ell:
            out *= Fraction(ell * ell, ell * ell - 1)
        else:
            out *= Fraction(ell, ell - 1)
    return out


BRUTE_AUT_LIMIT = 10**4


def brute_aut_count(G: GroupShape) -> int:
    """Count pairs (x, y) of images of the standard generators that give an automorphism."""
    N1, M = G.N1, G.exponent
    if G.order > BRUTE_AUT_LIMIT:
        raise ValueError(f"#G = {G.order} exceeds {BRUTE_AUT_LIMIT}")
    g1, g2 = np.meshgrid(np.arange(N1), np.arange(M), indexing="ij")
    Y1, Y2 = g1.ravel(), g2.ravel()
    # nonzero elements of order dividing a prime in Z/N1 x Z/M
    socle = []
    for q in prime_factors(M):
        s1_vals = [i * (N1 // q) for i in range(q)] if N1 % q == 0 else [0]
        for s1 in s1_vals:
            for j in range(q):
                s2 = j * (M // q)
                if s1 or s2:
                    socle.append((s1, s2))
    count = 0
    # x must satisfy N1 x = 0: x = (a, N2 t)
    for xa in range(N1):
        for t in range(N1):
            xb = G.N2 * t
            ok = np.ones(Y1.shape, dtype=bool)
            for s1, s2 in socle:
                z1 = (s1 * xa + s2 * Y1) % N1
                z2 = (s1 * xb + s2 * Y2) % M
                ok &= (z1 != 0) | (z2 != 0)
            count += int(np.count_nonzero(ok))
    return count


# --- GL_2 census ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GL2Result:
    ell: int
    N_residue: int
    count: int
    group_order: int
    ratio: Fraction  # count * ell / #GL_2
    factor: Fraction  # coprime_factor(N, ell)

    @property
    def applicable(self) -> bool:
        """The factor describes the census only when ell does not divide N."""
        return self.N_residue % self.ell != 0

    @property
    def ok(self) -> bool:
        return self.ratio == self.factor


GL2_MAX_ELL = 31


def gl2_census(N_residue: int, ell: int) -> GL2Result:
    _check_odd_prime(ell)
    if ell > GL2_MAX_ELL:
        raise ValueError(f"ell = {ell} too large for the brute census (max {GL2_MAX_ELL})")
    r = np.arange(ell, dtype=np.int64)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij")
    det = (a * d - b * c) % ell
    tr = (a + d) % ell
    inv = det != 0
    hit = inv & ((det + 1 - tr - N_residue) % ell == 0)
    order = (ell * ell - 1) * (ell * ell - ell)
    count = int(np.count_nonzero(hit))
    return GL2Result(ell, N_residue % ell, count, order, Fraction(count * ell, order), coprime_factor(N_residue, ell))


def gl2_divisible_ratio(ell: int) -> Fraction:
    """Census ratio at N = 0 mod ell, which is not the coprime factor."""
    return Fraction(ell**3 - 2 * ell, (ell - 1) ** 2 * (ell + 1))


# --- MPS average --------------------------------------------------------------------------------


@dataclass(frozen=True)
class MPSReport:
    x: int
    L: int
    partial_sum: float
    comparator: float  # x / (3 log x)

    @property
    def ratio(self) -> float:
        return self.partial_sum / self.comparator


def K_of_N_array(x: int, L: int = 10**4) -> np.ndarray:
    """Erratum K(N) for every N <= x (odd entries meaningful), ell-not-dividing-N product cut at L."""
    if x < 3:
        raise ValueError("x must be at least 3")
    logK = np.zeros(x + 1)
    ps = primes_in_interval(1, max(x, L) + 1)
    for ell in ps:
        if ell == 2:
            logK += math.log(2 / 3)  # every odd N has 2 | N - 1
            continue
        lf = float(ell)
        generic = math.log1p(-(lf + 1) / ((lf + 1) * (lf - 1) ** 2)) if ell <= L else 0.0
        if generic:
            logK += generic
        if ell <= L:
            # ell | N - 1 drops the Legendre term
            logK[1::ell] += math.log1p(-1 / ((lf + 1) * (lf - 1) ** 2)) - generic
        if ell > x:
            continue
        prev = generic
        pk, nu = ell, 1
        while pk <= x:
            cur = math.log1p(-1 / (lf**nu * (lf - 1)))
            logK[pk::pk] += cur - prev
            prev = cur
            pk *= ell
            nu += 1
    return np.exp(logK)


def phi_array(x: int) -> np.ndarray:
    phi = np.arange(x + 1, dtype=np.int64)
    for ell in primes_in_interval(1, x + 1):
        phi[ell::ell] -= phi[ell::ell] // ell
    return phi


def mps_average_report(x: int, L: int = 10**4) -> MPSReport:
    """Sum over odd 3 <= N <= x of K(N) N/(phi(N) log N), beside x/(3 log x)."""
    if x < 3 or x > 10**6:
        raise ValueError("x must lie in [3, 10^6]")
    K = K_of_N_array(x, L)
    phi = phi_array(x)
    N = np.arange(3, x + 1, 2)
    terms = K[N] * N / (phi[N] * np.log(N))
    return MPSReport(x, L, math.fsum(terms.tolist()), x / (3 * math.log(x)))
