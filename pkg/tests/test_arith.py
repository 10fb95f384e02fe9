import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcompare.arith import (
    INFINITY,
    factorize,
    hensel_sqrt,
    hilbert_symbol,
    is_prime,
    is_square_in_completion,
    kronecker,
    legendre,
    prime_divisors,
    sqrt_mod_prime_power,
    squarefree,
    valuation,
)
from oracles import hilbert_brute, is_prime_naive, legendre_enum, sqrt_mod_enum, trial_factor

SMALL_PRIMES = [p for p in range(3, 200) if is_prime_naive(p)]


def test_factorize_examples():
    assert factorize(12) == [(2, 2), (3, 1)]
    assert factorize(1) == []
    assert factorize(9991) == trial_factor(9991) == [(97, 1), (103, 1)]
    with pytest.raises(ValueError):
        factorize(0)


@given(st.integers(min_value=-10**9, max_value=10**9).filter(bool))
def test_factorize_recombines(m):
    out = factorize(m)
    prod = 1
    for p, e in out:
        assert is_prime(p) and e > 0
        prod *= p**e
    assert prod == abs(m)
    assert [p for p, _ in out] == sorted(p for p, _ in out)


def test_is_prime_matches_naive():
    assert all(is_prime(n) == is_prime_naive(n) for n in range(-5, 2000))


def test_valuation():
    assert valuation(48, 2) == 4
    assert valuation(Fraction(9, 16), 2) == -4
    assert valuation(Fraction(9, 16), 3) == 2
    with pytest.raises(ValueError):
        valuation(0, 3)


def test_squarefree():
    assert squarefree(5) and squarefree(-30) and not squarefree(12) and not squarefree(-9)


def test_kronecker_examples():
    assert kronecker(5, 11) == 1
    assert kronecker(22, 11) == 0
    assert kronecker(17, 1) == 1


def test_kronecker_matches_enumeration():
    for p in SMALL_PRIMES:
        for a in range(-30, 31):
            assert kronecker(a, p) == legendre_enum(a, p) == legendre(a, p)


def test_kronecker_multiplicative_in_modulus():
    for a in (-20, -15, -8, -7, -4, -3, 5, 12, 13):
        for m in range(1, 40):
            for n in range(1, 40):
                assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, INFINITY) == -1
    assert hilbert_symbol(2, 3, 7) == 1
    assert hilbert_symbol(5, -1, 5) == hilbert_brute(5, -1, 5) == 1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(3, 5, INFINITY) == 1


def test_hilbert_matches_brute_force():
    checked = 0
    for a in range(-20, 21):
        for b in range(-20, 21):
            if a == 0 or b == 0:
                continue
            for p in prime_divisors(2 * a * b):
                assert hilbert_symbol(a, b, p) == hilbert_brute(a, b, p), (a, b, p)
                checked += 1
    assert checked > 3000


def _places(*xs):
    ps = {2}
    for x in xs:
        ps |= set(prime_divisors(x))
    return [INFINITY] + sorted(ps)


def test_hilbert_product_formula():
    for a in range(-50, 51):
        for b in range(-50, 51):
            if a and b:
                prod = 1
                for v in _places(a, b):
                    prod *= hilbert_symbol(a, b, v)
                assert prod == 1, (a, b)


def test_hilbert_bilinear_symmetric_sample():
    rng = random.Random(20240611)
    nz = [x for x in range(-60, 61) if x]
    for _ in range(1000):
        a, b, c = rng.choice(nz), rng.choice(nz), rng.choice(nz)
        for v in _places(a, b, c):
            assert hilbert_symbol(a * b, c, v) == hilbert_symbol(a, c, v) * hilbert_symbol(b, c, v)
            assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)


@settings(max_examples=300)
@given(
    st.integers(-300, 300).filter(bool),
    st.integers(-300, 300).filter(bool),
    st.integers(-30, 30).filter(bool),
    st.integers(-30, 30).filter(bool),
)
def test_hilbert_norm_invariance(a, b, x, y):
    # (a, b) = (a, b N) for N = x^2 - a y^2 a nonzero norm from Q(sqrt a)
    nrm = x * x - a * y * y
    if nrm == 0:
        return
    for v in _places(a, b, nrm):
        assert hilbert_symbol(a, b * nrm, v) == hilbert_symbol(a, b, v)


def test_hilbert_rational_arguments():
    assert hilbert_symbol(Fraction(5, 4), -1, 5) == hilbert_symbol(5, -1, 5)
    assert hilbert_symbol(Fraction(3, 2), 7, 2) == hilbert_symbol(6, 7, 2)


def test_square_in_completion():
    assert is_square_in_completion(9, 7)
    assert not is_square_in_completion(5, 2)
    assert is_square_in_completion(17, 2)
    assert not is_square_in_completion(7, 7)
    for p in SMALL_PRIMES[:10]:
        for a in range(1, p):
            assert is_square_in_completion(a, p) == (legendre_enum(a, p) == 1)


def test_sqrt_mod_prime_power():
    assert sqrt_mod_prime_power(2, 7, 1) == 3
    assert sqrt_mod_prime_power(1, 11, 3) == 1
    assert sqrt_mod_prime_power(3, 5, 1) is None
    for p in (3, 5, 7, 11):
        for k in (1, 2, 3):
            m = p**k
            for a in range(1, m):
                if a % p == 0:
                    continue
                roots = sqrt_mod_enum(a, m)
                assert sqrt_mod_prime_power(a, p, k) == (min(roots) if roots else None)


def test_hensel_sqrt():
    for p in (3, 5, 13):
        for a in range(1, 60):
            if legendre_enum(a, p) != 1:
                continue
            r0 = sqrt_mod_enum(a, p)[0]
            r = hensel_sqrt(a, p, 6, r0)
            assert (r * r - a) % p**6 == 0 and (r - r0) % p == 0
    for a in (1, 17, 41, -7, -15):
        r = hensel_sqrt(a, 2, 8, 1)
        assert (r * r - a) % 2**8 == 0
