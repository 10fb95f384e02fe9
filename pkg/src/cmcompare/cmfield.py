"""Primitive quartic CM fields K = F(sqrt(A + B sqrt D)), F = Q(sqrt D).

A field is given by the integers (D, 2A, 2B) so half-integral A, B stay
exact.  This module validates the data, derives the relative integral
basis quantities alpha0, alpha1, beta0, beta1 and c_K, and enumerates the
(delta, n) index set shared by both intersection formulas.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .arith import is_prime, is_square_int, squarefree
from .quadorder import is_fundamental


class EtaCase(enum.Enum):
    # eta = (1 + sqrt(A + B sqrt D)) / 2
    CASE1 = 1
    # eta = (2B + sqrt D + 2 sqrt(A + B sqrt D)) / 4
    CASE2 = 2


class FieldRejected(ValueError):
    """Raised by :func:`build_cm_field`; ``reasons`` lists every failed check."""

    def __init__(self, D: int, a2: int, b2: int, reasons: list[str]):
        self.D, self.a2, self.b2 = D, a2, b2
        self.reasons = reasons
        super().__init__(f"(D, 2A, 2B) = ({D}, {a2}, {b2}) rejected: " + "; ".join(reasons))


@dataclass(frozen=True)
class CmField:
    D: int
    a2: int
    b2: int
    Dt: int
    eta_case: EtaCase
    alpha0: int
    alpha1: int
    beta0: int
    beta1: int
    cK: int

    @property
    def A(self) -> Fraction:
        return Fraction(self.a2, 2)

    @property
    def B(self) -> Fraction:
        return Fraction(self.b2, 2)

    @property
    def params(self) -> tuple[int, int, int]:
        return (self.D, self.a2, self.b2)


@dataclass(frozen=True)
class IndexData:
    delta: int
    s: int
    n: int
    N: int
    du: int
    dx: int
    tu: Fraction
    tx: Fraction
    txu: Fraction

    @property
    def cross_term(self) -> Fraction:
        """t_x t_u - 2 t_{xu^vee}."""
        return self.tx * self.tu - 2 * self.txu


def rejection_reasons(D: int, a2: int, b2: int) -> list[str]:
    reasons = []
    if not is_prime(D):
        reasons.append("D is not prime")
    if D % 4 != 1:
        reasons.append("D is not 1 mod 4")
    if (a2 - b2) % 2:
        reasons.append("2A and 2B have different parity")
        return reasons
    num = a2 * a2 - b2 * b2 * D
    if num % 4:
        reasons.append("A^2 - B^2 D is not an integer")
        return reasons
    Dt = num // 4
    if Dt <= 0:
        reasons.append(f"Dt = {Dt} is not positive")
    else:
        if is_square_int(Dt):
            reasons.append(f"Dt = {Dt} is a perfect square (K not primitive)")
        elif not squarefree(Dt):
            reasons.append(f"Dt = {Dt} is not squarefree")
        if Dt % 4 != 1:
            reasons.append(f"Dt = {Dt} is not 1 mod 4")
    # A + B sqrt D totally negative; with Dt > 0 this reduces to a2 < 0
    if not (a2 < 0 and a2 * a2 > b2 * b2 * D):
        reasons.append("A + B sqrt D is not totally negative (K not totally imaginary)")
    half = a2 % 2 == 1
    if half:
        if D % 8 != 5:
            reasons.append("half-integral A, B need D = 5 mod 8")
        elif (b2 * b2 + D - 2 * a2) % 16:
            reasons.append("beta0 = (4B^2 + D - 4A)/16 is not integral")
    else:
        if b2 % 4:
            reasons.append("beta1 = -B/2 is not integral")
        elif (2 - a2 + b2 * D) % 8:
            reasons.append("beta0 = (1 - A + BD)/4 is not integral")
    return reasons


def build_cm_field(D: int, a2: int, b2: int) -> CmField:
    reasons = rejection_reasons(D, a2, b2)
    if reasons:
        raise FieldRejected(D, a2, b2, reasons)
    Dt = (a2 * a2 - b2 * b2 * D) // 4
    if a2 % 2 == 0:
        case = EtaCase.CASE1
        alpha0, alpha1 = 1, 0
        beta0 = (2 - a2 + b2 * D) // 8
        beta1 = -b2 // 4
    else:
        case = EtaCase.CASE2
        # alpha0 = B - D/2 = (2B - D)/2, an integer since 2B and D are odd
        alpha0, alpha1 = (b2 - D) // 2, 1
        beta0 = (b2 * b2 + D - 2 * a2) // 16
        beta1 = 0
    cK = (
        alpha0 * alpha0
        + alpha0 * alpha1 * D
        + alpha1 * alpha1 * (D * D - D) // 4
        - 4 * beta0
        - 2 * beta1 * D
    )
    f = CmField(D, a2, b2, Dt, case, alpha0, alpha1, beta0, beta1, cK)
    if cK % 2 != 1 or (2 * cK - a2) % D:
        raise AssertionError(f"c_K congruences fail for {f}")
    return f


def enumerate_deltas(D: int) -> list[int]:
    """All delta > 0 with D - 4 delta a square, ascending."""
    if D % 4 != 1:
        raise ValueError("D must be 1 mod 4")
    return sorted((D - x * x) // 4 for x in range(1, isqrt(D) + 1, 2) if D - x * x > 0)


def enumerate_ns(f: CmField, delta: int) -> list[int]:
    """n with n = -delta c_K mod 2D, 4D | delta^2 Dt - n^2 and |n| < delta sqrt(Dt)."""
    m = 2 * f.D
    bound = isqrt(delta * delta * f.Dt)  # delta^2 Dt is never a square
    start = -bound + ((-delta * f.cK + bound) % m)
    out = []
    for n in range(start, bound + 1, m):
        if (delta * delta * f.Dt - n * n) % (4 * f.D) == 0:
            out.append(n)
    return out


def index_set(f: CmField) -> list[tuple[int, int]]:
    return [(delta, n) for delta in enumerate_deltas(f.D) for n in enumerate_ns(f, delta)]


def _display_quantities(f: CmField, delta: int, s: int, n: int):
    """t_u, t_x, d_u, d_x, t_{xu^vee} from the integral-basis displays.

    The congruence uses n + c_K delta, which is what makes these agree with
    the closed forms below.
    """
    D = f.D
    q = Fraction(n + f.cK * delta, 2 * D)
    half_ds = Fraction(D - s, 2)
    tu = Fraction(f.alpha1 * delta)
    tx = f.alpha0 + half_ds * f.alpha1
    du = tu * tu + 4 * q * delta
    dx = tx * tx - 4 * (f.beta0 + half_ds * f.beta1 + q)
    txu = f.beta1 * delta + s * q
    return tu, tx, du, dx, txu


def index_data(f: CmField, delta: int, n: int) -> IndexData:
    D = f.D
    sq = D - 4 * delta
    s = isqrt(sq) if sq >= 0 else -1
    if delta <= 0 or s < 0 or s * s != sq:
        raise ValueError(f"delta = {delta} is not admissible for D = {D}")
    num = delta * delta * f.Dt - n * n
    if (n + delta * f.cK) % (2 * D) or num % (4 * D) or num <= 0:
        raise ValueError(f"n = {n} is outside the index set for delta = {delta}")
    N = num // (4 * D)

    A, B = f.A, f.B
    du = Fraction(delta * (2 * n + delta * f.a2), D)
    dx = A - B * s - Fraction(2 * n + delta * f.a2, D)
    cross = B * delta - Fraction(s * (2 * n + delta * f.a2), 2 * D)
    if du.denominator != 1 or dx.denominator != 1:
        raise ArithmeticError(f"non-integral d_u/d_x at delta={delta}, n={n}: {du}, {dx}")

    tu, tx, du2, dx2, txu = _display_quantities(f, delta, s, n)
    if (du2, dx2, tx * tu - 2 * txu) != (du, dx, cross):
        raise ArithmeticError(f"closed forms disagree with displays at delta={delta}, n={n}")
    if num != D * (du * dx - cross * cross):
        raise ArithmeticError(f"norm identity fails at delta={delta}, n={n}")
    return IndexData(delta, s, n, N, int(du), int(dx), tu, tx, txu)


def all_index_data(f: CmField) -> list[IndexData]:
    return [index_data(f, delta, n) for delta, n in index_set(f)]


@dataclass
class AssumptionReport:
    """Pass/fail per hypothesis of the comparison theorem, with witnesses."""

    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]

    def to_json(self) -> dict:
        out = {"passed": self.passed, "checks": dict(self.checks)}
        if self.witnesses:
            out["witnesses"] = {k: v for k, v in self.witnesses.items()}
        return out


def check_assumptions(f: CmField) -> AssumptionReport:
    from .reflex import ReflexField

    rep = AssumptionReport()
    rep.checks["D_prime"] = is_prime(f.D) and f.D % 4 == 1
    rep.checks["Dt_squarefree_1mod4"] = squarefree(f.Dt) and f.Dt % 4 == 1

    rf = ReflexField.of(f)
    diff_norm = rf.different_norm()
    rep.checks["different_norm_is_D"] = rf.different_ok()
    if not rep.checks["different_norm_is_D"]:
        rep.witnesses["different_norm_is_D"] = {
            "norm": diff_norm,
            "ramified_over": sorted({P.p for P in rf.different()}),
        }

    rep.checks["du_fundamental"] = True
    for delta, n in index_set(f):
        du = delta * (2 * n + delta * f.a2) // f.D
        if not is_fundamental(du):
            rep.checks["du_fundamental"] = False
            rep.witnesses["du_fundamental"] = {"delta": delta, "n": n, "du": du}
            break
    return rep


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
