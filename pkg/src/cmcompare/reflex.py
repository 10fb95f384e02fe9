"""Arithmetic in the reflex side: F~ = Q(sqrt Dt) and K~ = F~(sqrt(2A + 2 sqrt Dt)).

Ideals of O_F~ are exponent maps on primes; every valuation is reduced to
rational arithmetic.  Split primes are handled through the p-adic
embedding sqrt(Dt) -> r with r a Hensel-lifted root, inert and ramified
primes through norms.  Primes over 2 are unramified in F~ because
Dt = 1 mod 4; squareness there is decided in O_F~ / 8 by enumeration.

The BY side of the comparison lives here and depends only on
:mod:`cmcompare.arith`; it never consults d_u, d_x or the quadratic orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, Optional

from sympy.ntheory import sqrt_mod

from .arith import hensel_sqrt, kronecker, legendre, prime_divisors, valuation
from .quadorder import SplitType


@dataclass(frozen=True)
class ReflexPrime:
    """A prime of O_F~ over p.

    For split primes ``root`` is the residue of the image of sqrt(Dt)
    (mod p, or mod 4 when p = 2); it tells the two primes over p apart.
    """

    p: int
    kind: SplitType
    root: Optional[int] = None

    @property
    def f(self) -> int:
        return 2 if self.kind is SplitType.INERT else 1

    @property
    def e(self) -> int:
        return 2 if self.kind is SplitType.RAMIFIED else 1

    @property
    def norm(self) -> int:
        return self.p**self.f

    def __str__(self) -> str:
        if self.kind is SplitType.SPLIT:
            return f"P({self.p}, sqrtDt={self.root})"
        return f"P({self.p}, {self.kind.value})"

    def __lt__(self, other):
        return (self.p, self.root or -1) < (other.p, other.root or -1)


ReflexIdeal = Dict[ReflexPrime, int]


@dataclass(frozen=True)
class ReflexElement:
    """(x + y sqrt Dt) / z, normalized so that gcd(x, y, z) = 1 and z > 0."""

    x: int
    y: int
    z: int = 1

    def __post_init__(self):
        if self.z == 0:
            raise ZeroDivisionError("denominator 0")
        g = gcd(gcd(self.x, self.y), self.z)
        sign = -1 if self.z < 0 else 1
        object.__setattr__(self, "x", sign * self.x // g)
        object.__setattr__(self, "y", sign * self.y // g)
        object.__setattr__(self, "z", sign * self.z // g)

    @classmethod
    def from_parts(cls, c0: Fraction, c1: Fraction) -> "ReflexElement":
        c0, c1 = Fraction(c0), Fraction(c1)
        z = c0.denominator * c1.denominator // gcd(c0.denominator, c1.denominator)
        return cls(int(c0 * z), int(c1 * z), z)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def norm_numerator(self, Dt: int) -> int:
        return self.x * self.x - self.y * self.y * Dt

    def norm(self, Dt: int) -> Fraction:
        return Fraction(self.norm_numerator(Dt), self.z * self.z)


def ideal_norm(ideal: ReflexIdeal) -> Fraction:
    out = Fraction(1)
    for P, e in ideal.items():
        out *= Fraction(P.norm) ** e
    return out


def ideal_mul(a: ReflexIdeal, b: ReflexIdeal) -> ReflexIdeal:
    out = dict(a)
    for P, e in b.items():
        out[P] = out.get(P, 0) + e
    return {P: e for P, e in out.items() if e}


def is_integral(ideal: ReflexIdeal) -> bool:
    return all(e >= 0 for e in ideal.values())


def _ideal_json(ideal: ReflexIdeal) -> list:
    return [[str(P), e] for P, e in sorted(ideal.items())]


@dataclass
class BYPaths:
    """Both evaluations of B_N(ell); ``local`` is None when the closed form does not apply."""

    definitional: Fraction
    local: Optional[Fraction]
    trace: list

    @property
    def agree(self) -> bool:
        return self.local is None or self.local == self.definitional


class ReflexField:
    """Per-field context: F~, the generator 2A + 2 sqrt(Dt) of K~ / F~, and D.

    Caches live on the instance; instances are only ever filled with
    values that are pure functions of (Dt, a2, D).
    """

    def __init__(self, Dt: int, a2: int, D: int):
        if Dt % 4 != 1 or Dt <= 1 or isqrt(Dt) ** 2 == Dt:
            raise ValueError(f"Dt = {Dt} must be a positive non-square, 1 mod 4")
        self.Dt = Dt
        self.a2 = a2
        self.D = D
        self.alpha = ReflexElement(a2, 2, 1)
        self._primes: dict[int, list[ReflexPrime]] = {}
        self._classes: dict[ReflexPrime, SplitType] = {}
        self._different: Optional[ReflexIdeal] = None
        self._sq8: Optional[tuple[frozenset, frozenset]] = None

    @classmethod
    def of(cls, field) -> "ReflexField":
        return _reflex_field(field.Dt, field.a2, field.D)

    # primes and valuations

    def primes_over(self, p: int) -> list[ReflexPrime]:
        if p not in self._primes:
            self._primes[p] = factor_prime_in_Ftilde(self.Dt, p)
        return self._primes[p]

    def _root(self, P: ReflexPrime, k: int) -> int:
        return hensel_sqrt(self.Dt, P.p, k, P.root)

    def valuation(self, elt: ReflexElement, P: ReflexPrime) -> int:
        if elt.is_zero():
            raise ValueError("valuation of zero")
        p = P.p
        vz = valuation(elt.z, p)
        nn = elt.norm_numerator(self.Dt)
        vn = valuation(nn, p)
        if P.kind is SplitType.INERT:
            return vn // 2 - vz
        if P.kind is SplitType.RAMIFIED:
            return vn - 2 * vz
        # x + y sqrt(Dt) is integral, so each split valuation is at most v_p(norm)
        k = vn + 1
        w = (elt.x + elt.y * self._root(P, k)) % p**k
        return valuation(w, p) - vz

    def ideal_of(self, elt: ReflexElement) -> ReflexIdeal:
        """Principal ideal (elt) as an exponent map."""
        nn = elt.norm_numerator(self.Dt)
        ps = sorted(set(prime_divisors(nn)) | set(prime_divisors(elt.z) if elt.z > 1 else []))
        out: ReflexIdeal = {}
        for p in ps:
            for P in self.primes_over(p):
                v = self.valuation(elt, P)
                if v:
                    out[P] = v
        return out

    # splitting in K~

    def _squares_mod_8(self) -> tuple[frozenset, frozenset]:
        # (a + b w)^2 with w^2 = w + (Dt - 1)/4, in the basis {1, w}
        if self._sq8 is None:
            c = (self.Dt - 1) // 4
            sq8, sq4 = set(), set()
            for a in range(8):
                for b in range(8):
                    if (a % 2, b % 2) == (0, 0):
                        continue
                    u0, u1 = a * a + b * b * c, 2 * a * b + b * b
                    sq8.add((u0 % 8, u1 % 8))
                    sq4.add((u0 % 4, u1 % 4))
            self._sq8 = (frozenset(sq8), frozenset(sq4))
        return self._sq8

    def _classify_unit_at_inert_2(self, u: ReflexElement) -> SplitType:
        # basis {1, w}: (x + y sqrt Dt)/z = ((x - y) + 2y w)/z
        c0 = Fraction(u.x - u.y, u.z)
        c1 = Fraction(2 * u.y, u.z)
        r0 = c0.numerator * pow(c0.denominator, -1, 8) % 8
        r1 = c1.numerator * pow(c1.denominator, -1, 8) % 8
        sq8, sq4 = self._squares_mod_8()
        if (r0, r1) in sq8:
            return SplitType.SPLIT
        if (r0 % 4, r1 % 4) in sq4:
            return SplitType.INERT
        return SplitType.RAMIFIED

    def classify(self, P: ReflexPrime) -> SplitType:
        """Splitting type of P in K~ = F~(sqrt alpha)."""
        if P in self._classes:
            return self._classes[P]
        a = self.alpha
        p = P.p
        if P.kind is SplitType.SPLIT:
            k = valuation(a.norm_numerator(self.Dt), p) + 4
            w = (a.x + a.y * self._root(P, k)) % p**k
            v = valuation(w, p)
            if v >= k - 3:
                raise ArithmeticError(f"precision exhausted at {P}")
            u = w // p**v
            if v % 2:
                t = SplitType.RAMIFIED
            elif p == 2:
                t = (SplitType.SPLIT if u % 8 == 1
                     else SplitType.INERT if u % 4 == 1 else SplitType.RAMIFIED)
            else:
                t = SplitType.SPLIT if legendre(u, p) == 1 else SplitType.INERT
        elif P.kind is SplitType.INERT:
            nn = a.norm_numerator(self.Dt)
            v = valuation(nn, p) // 2
            if v % 2:
                t = SplitType.RAMIFIED
            elif p == 2:
                t = self._classify_unit_at_inert_2(ReflexElement(a.x, a.y, a.z * 2**v))
            else:
                unit_norm = nn // p ** (2 * v)
                t = SplitType.SPLIT if legendre(unit_norm, p) == 1 else SplitType.INERT
        else:
            v = self.valuation(a, P)
            if v % 2:
                t = SplitType.RAMIFIED
            else:
                # divide by p^(v/2); sqrt(Dt) is a uniformizer so the residue is x/z
                c0 = Fraction(a.x, a.z * p ** (v // 2))
                t = SplitType.SPLIT if legendre(c0.numerator * c0.denominator, p) == 1 else SplitType.INERT
        self._classes[P] = t
        return t

    def different(self) -> ReflexIdeal:
        """Relative discriminant of K~ / F~ as an exponent map.

        Ramification can only occur over 2 or at primes dividing alpha,
        whose norm is a2^2 - 4 Dt = (2B)^2 D.  Odd primes are tame
        (exponent 1).  Over 2, F~ is unramified, so the exponent is 3 when
        v_P(alpha) is odd and 2 for a unit that is not a square mod 4.
        """
        if self._different is None:
            nn = self.alpha.norm_numerator(self.Dt)
            cands = sorted(set(prime_divisors(2 * nn)))
            out: ReflexIdeal = {}
            for p in cands:
                for P in self.primes_over(p):
                    if self.classify(P) is not SplitType.RAMIFIED:
                        continue
                    if p != 2:
                        out[P] = 1
                    else:
                        out[P] = 3 if self.valuation(self.alpha, P) % 2 else 2
            self._different = out
        return self._different

    def different_norm(self) -> int:
        return int(ideal_norm(self.different()))

    def different_ok(self) -> bool:
        """Norm(different) = D with no (wild) ramification over 2."""
        d = self.different()
        return all(P.p != 2 for P in d) and self.different_norm() == self.D

    # the index set and N

    def index_element(self, delta: int, n: int) -> ReflexElement:
        return ReflexElement(n, delta, 2 * self.D)

    def is_in_inverse_different(self, delta: int, n: int) -> bool:
        t = self.index_element(delta, n)
        if t.is_zero():
            return True
        diff = self.different()
        ps = set(prime_divisors(2 * self.D)) | {P.p for P in diff}
        for p in ps:
            for P in self.primes_over(p):
                if self.valuation(t, P) + diff.get(P, 0) < 0:
                    return False
        return True

    def in_index_set(self, delta: int, n: int) -> bool:
        return n * n < delta * delta * self.Dt and self.is_in_inverse_different(delta, n)

    def reflex_ideal_of_index(self, delta: int, n: int) -> tuple[ReflexIdeal, ReflexIdeal]:
        """The ideals (frak N, frak N * different) for an index pair."""
        if not self.in_index_set(delta, n):
            raise ValueError(f"(delta, n) = ({delta}, {n}) is not in the index set")
        frakN = self.ideal_of(self.index_element(delta, n))
        return frakN, ideal_mul(frakN, self.different())

    # counting

    def R(self, ideal: ReflexIdeal) -> int:
        """Number of integral ideals of O_K~ with relative norm ``ideal``."""
        if not is_integral(ideal):
            return 0
        out = 1
        for P, v in ideal.items():
            if v == 0:
                continue
            t = self.classify(P)
            if t is SplitType.INERT:
                out *= 1 if v % 2 == 0 else 0
            elif t is SplitType.SPLIT:
                out *= v + 1
            if out == 0:
                return 0
        return out

    def eps(self, p: int, ideal: ReflexIdeal) -> int:
        out = 1
        for P, v in ideal.items():
            if P.p != p or v <= 0:
                continue
            t = self.classify(P)
            if t is SplitType.INERT:
                out *= (1 + (-1) ** v) // 2
            elif t is SplitType.SPLIT:
                out *= v + 1
        return out

    def b_paths(self, delta: int, n: int, ell: int) -> BYPaths:
        frakN, ND = self.reflex_ideal_of_index(delta, n)
        total = Fraction(0)
        over = self.primes_over(ell)
        for l in over:
            if self.classify(l) is SplitType.SPLIT:
                continue
            v = frakN.get(l, 0)
            rest = ideal_mul(ND, {l: -1})
            total += Fraction(v + 1, 2) * self.R(rest) * l.f

        support_primes = sorted({P.p for P, e in ND.items() if e > 0})
        trace = []
        for p in support_primes:
            for P in self.primes_over(p):
                if ND.get(P, 0) > 0:
                    trace.append({
                        "p": p,
                        "prime": str(P),
                        "ktilde": self.classify(P).value,
                        "v": ND[P],
                        "eps": self.eps(p, ND),
                    })

        supp = [l for l in over if ND.get(l, 0) > 0]
        local: Optional[Fraction]
        if not supp:
            local = Fraction(0)
        elif len(supp) == 1 and self.classify(supp[0]) is not SplitType.RAMIFIED:
            l = supp[0]
            v = frakN.get(l, 0)
            if self.classify(l) is SplitType.INERT and v % 2 == 1:
                local = Fraction(v + 1, 2) * l.f
                for p in support_primes:
                    if p != ell:
                        local *= self.eps(p, ND)
            else:
                local = Fraction(0)
        else:
            local = None
        return BYPaths(total, local, trace)

    def B_summand(self, delta: int, n: int, ell: int) -> Fraction:
        paths = self.b_paths(delta, n, ell)
        if not paths.agree:
            raise ArithmeticError(
                f"B_N({ell}) paths disagree at delta={delta}, n={n}: "
                f"{paths.definitional} vs {paths.local}"
            )
        return paths.definitional


@lru_cache(maxsize=4096)
def _reflex_field(Dt: int, a2: int, D: int) -> ReflexField:
    return ReflexField(Dt, a2, D)


def factor_prime_in_Ftilde(Dt: int, p: int) -> list[ReflexPrime]:
    """Primes of O_F~ over p, F~ = Q(sqrt Dt), Dt squarefree and 1 mod 4."""
    if p == 2:
        if Dt % 8 == 1:
            return [ReflexPrime(2, SplitType.SPLIT, 1), ReflexPrime(2, SplitType.SPLIT, 3)]
        return [ReflexPrime(2, SplitType.INERT)]
    k = kronecker(Dt, p)
    if k == 0:
        return [ReflexPrime(p, SplitType.RAMIFIED)]
    if k == -1:
        return [ReflexPrime(p, SplitType.INERT)]
    r = sqrt_mod(Dt % p, p)
    return sorted([ReflexPrime(p, SplitType.SPLIT, r), ReflexPrime(p, SplitType.SPLIT, p - r)])


# functional surface over CmField


def valuation_at(field, elt: ReflexElement, P: ReflexPrime) -> int:
    return ReflexField.of(field).valuation(elt, P)


def classify_in_Ktilde(field, P: ReflexPrime) -> SplitType:
    return ReflexField.of(field).classify(P)


def relative_different(field) -> ReflexIdeal:
    return dict(ReflexField.of(field).different())


def is_in_inverse_different(field, delta: int, n: int) -> bool:
    return ReflexField.of(field).is_in_inverse_different(delta, n)


def reflex_ideal_of_index(field, delta: int, n: int) -> tuple[ReflexIdeal, ReflexIdeal]:
    return ReflexField.of(field).reflex_ideal_of_index(delta, n)


def R_reflex(field, ideal: ReflexIdeal) -> int:
    return ReflexField.of(field).R(ideal)


def eps_reflex(field, p: int, ideal: ReflexIdeal) -> int:
    return ReflexField.of(field).eps(p, ideal)


def B_summand(field, delta: int, n: int, ell: int) -> Fraction:
    return ReflexField.of(field).B_summand(delta, n, ell)


def inverse_different_index_set(field, delta: int) -> list[int]:
    """n with |n| < delta sqrt(Dt) and (n + delta sqrt Dt)/(2D) in the inverse different."""
    rf = ReflexField.of(field)
    b = isqrt(delta * delta * field.Dt)
    return [n for n in range(-b, b + 1) if rf.is_in_inverse_different(delta, n)]
