"""Exact integer and local arithmetic.

Factorization, Kronecker symbols, Hilbert symbols at every place of Q,
square tests in Q_p and p-adic square roots.  Everything operates on
Python ints or :class:`fractions.Fraction`; nothing here touches floats.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

Rational = Union[int, Fraction]
Factorization = list[tuple[int, int]]

INFINITY = "inf"


def is_prime(n: int) -> bool:
    return n > 1 and bool(isprime(n))


@lru_cache(maxsize=65536)
def _factor_cached(m: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(m).items()))


def factorize(m: int) -> Factorization:
    """Prime factorization of |m| as an ascending list of (prime, exponent)."""
    if m == 0:
        raise ValueError("cannot factor 0")
    return list(_factor_cached(abs(int(m))))


def prime_divisors(m: int) -> list[int]:
    return [p for p, _ in factorize(m)]


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero integer or rational."""
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    if isinstance(x, Fraction):
        return valuation(x.numerator, p) - valuation(x.denominator, p)
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def is_square_int(n: int) -> bool:
    if n < 0:
        return False
    from math import isqrt

    r = isqrt(n)
    return r * r == n


def squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n))


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if a == 0 and n == 0:
        raise ValueError("kronecker(0, 0) is undefined")
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # factor 2 out of n; (a|2) is 0 for even a, else depends on a mod 8
    v2 = 0
    while n % 2 == 0:
        n //= 2
        v2 += 1
    if v2:
        if a % 2 == 0:
            return 0
        if v2 % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n) for odd positive n
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


def legendre(a: int, p: int) -> int:
    return kronecker(a, p)


def _square_class_int(x: Rational) -> int:
    # a/b and a*b differ by the square b^2
    if isinstance(x, Fraction):
        return x.numerator * x.denominator
    return int(x)


def _split_unit(x: int, p: int) -> tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def hilbert_symbol(a: Rational, b: Rational, place) -> int:
    """Hilbert symbol (a, b)_v for nonzero rationals a, b.

    ``place`` is a rational prime or :data:`INFINITY`.  Uses the closed
    forms: the sign rule at the real place, the Legendre formula at odd
    primes and the epsilon/omega exponent formula at 2.
    """
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    a = _square_class_int(a)
    b = _square_class_int(b)
    if place == INFINITY:
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    alpha, u = _split_unit(a, p)
    beta, v = _split_unit(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_v = ((v - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_v = ((v * v - 1) // 8) % 2
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    s = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        s *= legendre(u, p)
    if alpha % 2:
        s *= legendre(v, p)
    return s


def is_square_in_completion(a: Rational, p: int) -> bool:
    """True iff a is a square in Q_p."""
    if a == 0:
        raise ValueError("0 is excluded")
    v, u = _split_unit(_square_class_int(a), p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return legendre(u, p) == 1


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int | None:
    """Smallest r >= 0 with r^2 = a mod p^k, or None.  p must be odd."""
    if p == 2:
        raise ValueError("p must be odd")
    if a % p == 0:
        raise ValueError("p divides a; strip the valuation first")
    roots = sqrt_mod(a, p**k, all_roots=True)
    return min(roots) if roots else None


def hensel_sqrt(a: int, p: int, k: int, residue: int) -> int:
    """The p-adic square root of a congruent to ``residue``, reduced mod p^k.

    For odd p, ``residue`` is a root mod p.  For p = 2 the input must be
    1 mod 8 and ``residue`` (1 or 3) picks the root by its class mod 4.
    """
    if p == 2:
        return _sqrt_2adic(a, k, residue)
    r = residue % p
    if (r * r - a) % p:
        raise ValueError(f"{residue} is not a square root of {a} mod {p}")
    prec = 1
    while prec < k:
        prec = min(2 * prec, k)
        mod = p**prec
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r % p**k


def _sqrt_2adic(a: int, k: int, residue: int) -> int:
    if a % 8 != 1:
        raise ValueError("odd 2-adic squares are 1 mod 8")
    # invariant: r^2 = a mod 2^(j+1)
    r, j = 1, 2
    while j < k:
        if (r * r - a) % 2 ** (j + 2):
            r += 2**j
        j += 1
    mod = 2 ** max(k, 2)
    r %= mod
    if r % 4 != residue % 4:
        r = (-r) % mod
    return r % 2**k
