"""Imaginary quadratic orders O_d = Z[(d + sqrt d)/2].

Everything the LV side needs: splitting types, the count R_d(A)
of ideals of norm A, the genus factor rho~_d and the local factor eps_d.
Only fundamental discriminants are accepted where ideal counting is
involved; the general case would need conductor-aware ideal theory.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from math import gcd

from .arith import (
    Rational,
    factorize,
    hilbert_symbol,
    is_square_int,
    kronecker,
    prime_divisors,
    squarefree,
    valuation,
)

BRUTE_FORCE_BOUND = 2000


class SplitType(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def is_discriminant(d: int) -> bool:
    return d % 4 in (0, 1) and not is_square_int(d)


def is_fundamental(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def _require_fundamental(d: int) -> None:
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")


def split_type(d: int, p: int) -> SplitType:
    """Behaviour of p in O_d for any discriminant d, from (d|p).

    O_d / p = F_p[x]/(x^2 - d x + (d^2 - d)/4), whose discriminant is d,
    so the Kronecker symbol decides it for orders as well.  A prime
    dividing the conductor comes out as RAMIFIED.
    """
    k = kronecker(d, p)
    if k == 1:
        return SplitType.SPLIT
    if k == -1:
        return SplitType.INERT
    return SplitType.RAMIFIED


def splitting_in_order(d: int, p: int) -> SplitType:
    _require_fundamental(d)
    return split_type(d, p)


def _local_count(d: int, p: int, e: int) -> int:
    t = split_type(d, p)
    if t is SplitType.SPLIT:
        return e + 1
    if t is SplitType.INERT:
        return 1 if e % 2 == 0 else 0
    return 1


def count_ideals_of_norm(d: int, A: Rational) -> int:
    """R_d(A): number of integral ideals of O_d of norm A.

    Non-integral A gives 0, so R(N / l) vanishes when l does not divide N.
    """
    _require_fundamental(d)
    if isinstance(A, Fraction):
        if A.denominator != 1:
            return 0
        A = A.numerator
    if A <= 0:
        raise ValueError("norm must be positive")
    total = 1
    for p, e in factorize(A):
        total *= _local_count(d, p, e)
        if total == 0:
            break
    return total


def count_ideals_brute(d: int, A: int, bound: int = BRUTE_FORCE_BOUND) -> int:
    """R_d(A) by enumerating index-A sublattices of Z + Z w closed under w.

    Sublattices are taken in Hermite normal form Z a + Z (b + c w) with
    a c = A and 0 <= b < a.  Test oracle for :func:`count_ideals_of_norm`.
    """
    _require_fundamental(d)
    if A < 1 or A > bound:
        raise ValueError(f"A must lie in [1, {bound}]")
    # w^2 = d w - (d^2 - d)/4
    w2_const = -(d * d - d) // 4

    count = 0
    for a in range(1, A + 1):
        if A % a:
            continue
        c = A // a

        def contains(u: int, v: int) -> bool:
            # u + v w lies in Z a + Z (b + c w)
            if v % c:
                return False
            return (u - (v // c) * b) % a == 0

        for b in range(a):
            # closed under w: w*a = a w and w*(b + c w) = c*w2_const + (b + c d) w
            if contains(0, a) and contains(c * w2_const, b + c * d):
                count += 1
    return count


def eps_d(d: int, p: int, A: int) -> int:
    """Local factor eps_d(p, A) of the LV formula; requires p | A."""
    _require_fundamental(d)
    if A % p:
        raise ValueError(f"{p} does not divide {A}")
    e = valuation(A, p)
    t = split_type(d, p)
    if t is SplitType.INERT:
        return (1 + (-1) ** e) // 2
    if t is SplitType.SPLIT:
        return e + 1
    return 2 if hilbert_symbol(d, -A, p) == 1 else 0


def rho_tilde(d: int, A: int, ell: int) -> int:
    """Genus factor rho~_d(A) with the prime ell excluded."""
    _require_fundamental(d)
    for p in prime_divisors(d):
        if p != ell and hilbert_symbol(d, -A, p) == -1:
            return 0
    g = gcd(d, A)
    common = prime_divisors(g) if g > 1 else []
    return 2 ** sum(1 for p in common if p != ell)
